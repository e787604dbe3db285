#!/usr/bin/env python3
"""Run the full pipeline over the bundled fixture corpus and score it.

Annotates the Alberta-towns tables against the bundled snapshot, then
evaluates both tasks against the bundled gold files. A handy end-to-end
sanity check and a template for running your own corpora:

    python scripts/run_fixture_pipeline.py [--out out-fixture] [--cache-dir DIR]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tabkg.cli import main as tabkg_main

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "alberta"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out-fixture", help="output directory")
    parser.add_argument("--cache-dir", help="optional lookup cache directory")
    parser.add_argument("--concurrency", type=int, default=4)
    args = parser.parse_args()

    annotate = [
        "annotate",
        "--tables", str(FIXTURE / "tables"),
        "--targets-cta", str(FIXTURE / "targets_cta.csv"),
        "--targets-cea", str(FIXTURE / "targets_cea.csv"),
        "--backend", "snapshot",
        "--snapshot", str(FIXTURE / "snapshot.jsonl"),
        "--out", args.out,
        "--concurrency", str(args.concurrency),
    ]
    if args.cache_dir:
        annotate.extend(["--cache-dir", args.cache_dir])
    code = tabkg_main(annotate)
    if code != 0:
        return code

    out = Path(args.out)
    for task, gold in (("cta", "gold_cta.csv"), ("cea", "gold_cea.csv")):
        code = tabkg_main([
            "evaluate", "--task", task,
            "--pred", str(out / f"{task}.csv"),
            "--gold", str(FIXTURE / gold),
            "--json-out", str(out / f"{task}_report.json"),
        ])
        if code != 0:
            return code
    print(f"outputs and reports under {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
