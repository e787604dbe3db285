"""Command-line entry points: annotate, evaluate, snapshot fetch, cache purge.

``annotate`` runs pre-processing, then CTA over the target columns, then
CEA with the CTA classes feeding disambiguation, and writes ``cta.csv``,
``cea.csv``, and a ``manifest.json`` echoing the config, warning totals,
and timings. Per-table problems are logged and skipped; only a bad config
(exit 1) or an unreadable corpus (exit 2) aborts the run.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import threading
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from tabkg import cea, cta, evaluator, submission
from tabkg.config import (
    BACKEND_REMOTE,
    BACKEND_SNAPSHOT,
    RunConfig,
    resolve_config,
)
from tabkg.errors import (
    BackendUnavailable,
    DuplicatePredictionError,
    EmptyTableError,
    MalformedRowError,
)
from tabkg.kg_backend import (
    KgBackend,
    SnapshotBackend,
    WikidataBackend,
    record_to_json,
)
from tabkg.lookup_cache import CachedBackend, CacheStore
from tabkg.spellcheck import SpellChecker
from tabkg.table_io import Table, load_table

log = logging.getLogger("tabkg")


class WarningCounter:
    """Thread-safe named warning totals for the run manifest."""

    def __init__(self):
        self._counts: Counter = Counter()
        self._lock = threading.Lock()

    def __call__(self, name: str) -> None:
        with self._lock:
            self._counts[name] += 1

    def totals(self) -> dict:
        with self._lock:
            return dict(sorted(self._counts.items()))


def _build_backend(cfg: RunConfig) -> tuple[KgBackend, KgBackend, SnapshotBackend | None]:
    """(backend used by annotators, real backend, snapshot or None)."""
    if cfg.backend == BACKEND_SNAPSHOT:
        inner: KgBackend = SnapshotBackend.load(cfg.snapshot_path)
        snapshot = inner
    else:
        inner = WikidataBackend(base_url=cfg.api_base_url, user_agent=cfg.user_agent)
        snapshot = None
    if cfg.cache_dir is not None:
        return CachedBackend(inner, CacheStore(cfg.cache_dir)), inner, snapshot
    return inner, inner, snapshot


def _build_spellchecker(cfg: RunConfig, snapshot: SnapshotBackend | None) -> SpellChecker:
    terms: list[str] = []
    if snapshot is not None:
        terms.extend(snapshot.vocabulary())
    if cfg.wordlist is not None:
        terms.extend(
            line.strip()
            for line in Path(cfg.wordlist).read_text(encoding="utf-8").splitlines()
        )
    return SpellChecker(terms, threshold=cfg.threshold, search_limit=cfg.limit)


def _load_corpus(cfg: RunConfig, warn: WarningCounter) -> dict[str, Table]:
    paths = sorted(Path(cfg.tables_dir).glob("*.csv"))
    tables: dict[str, Table] = {}
    for path in paths:
        try:
            table = load_table(path)
        except EmptyTableError:
            log.warning("skipping empty table %s", path.name)
            warn("table_skipped")
            continue
        except OSError as exc:
            log.warning("skipping unreadable table %s: %s", path.name, exc)
            warn("table_skipped")
            continue
        tables[table.table_id] = table
    return tables


def run_annotate(cfg: RunConfig) -> int:
    try:
        cfg.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("run 'tabkg annotate --help' for usage", file=sys.stderr)
        return 1

    started = time.monotonic()
    warn = WarningCounter()
    try:
        backend, inner, snapshot = _build_backend(cfg)
    except (OSError, ValueError) as exc:
        print(f"error: cannot initialize backend: {exc}", file=sys.stderr)
        return 1
    spell = _build_spellchecker(cfg, snapshot)

    try:
        if not Path(cfg.tables_dir).is_dir():
            raise OSError("not a directory")
        tables = _load_corpus(cfg, warn)
    except OSError as exc:
        print(f"error: tables directory not readable: {cfg.tables_dir} ({exc})", file=sys.stderr)
        return 2

    try:
        cta_targets = (
            submission.read_targets_cta(cfg.targets_cta) if cfg.targets_cta else []
        )
        cea_targets = (
            submission.read_targets_cea(cfg.targets_cea) if cfg.targets_cea else []
        )
    except (MalformedRowError, OSError) as exc:
        print(f"error: cannot read targets: {exc}", file=sys.stderr)
        return 1
    for table_id in {t[0] for t in cta_targets} | {t[0] for t in cea_targets}:
        if table_id not in tables:
            log.warning("targets reference unknown table %r", table_id)
            warn("unknown_table")

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    cta_annotations: list[cta.ColumnAnnotation] = []
    if cta_targets:
        with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
            runs = {
                table_id: pool.submit(
                    cta.annotate_table_cta,
                    table, cta_targets, backend, spell, cfg.limit, warn,
                )
                for table_id, table in tables.items()
            }
            for table_id in sorted(runs):
                cta_annotations.extend(runs[table_id].result())
        submission.write_cta_csv(cta_annotations, out_dir / "cta.csv")

    class_by_column: dict[tuple[str, int], str] = {
        (a.table_id, a.col): a.class_id for a in cta_annotations
    }

    cea_annotations: list[cea.CellAnnotation] = []
    if cea_targets:
        with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
            runs = {}
            for table_id, table in tables.items():
                col_classes = {
                    col: class_id
                    for (tid, col), class_id in class_by_column.items()
                    if tid == table_id
                }
                runs[table_id] = pool.submit(
                    cea.annotate_table_cea,
                    table, cea_targets, col_classes, backend, spell,
                    cfg.limit, warn,
                )
            for table_id in sorted(runs):
                cea_annotations.extend(runs[table_id].result())
        submission.write_cea_csv(cea_annotations, out_dir / "cea.csv")

    manifest = {
        "config": cfg.echo(),
        "tables": len(tables),
        "cta_targets": len(cta_targets),
        "cea_targets": len(cea_targets),
        "cta_annotations": len(cta_annotations),
        "cea_annotations": len(cea_annotations),
        "warnings": warn.totals(),
        "backend_calls": dict(sorted(inner.calls.items())),
        "elapsed_seconds": round(time.monotonic() - started, 3),
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")
    return 0


def run_evaluate(task: str, predictions: Path, gold: Path, json_out: Path | None = None) -> int:
    try:
        report = evaluator.score(predictions, gold, task)
    except (DuplicatePredictionError, MalformedRowError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(report.summary())
    if json_out is not None:
        with open(json_out, "w", encoding="utf-8") as handle:
            json.dump(report.to_json(), handle, indent=2)
            handle.write("\n")
    return 0


def run_snapshot_fetch(
    labels_path: Path,
    out_path: Path,
    backend: KgBackend,
    limit: int = 10,
) -> int:
    """Fetch top candidates for each label and write a snapshot file.

    Writes atomically via a temp file, so a failed run leaves no partial
    snapshot behind. Per-label failures go to a sidecar report; the run
    fails (exit 3) only when nothing could be fetched at all.
    """
    labels = [
        line.strip()
        for line in Path(labels_path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if not labels:
        print("error: labels file is empty", file=sys.stderr)
        return 1

    records: dict[str, dict] = {}
    failures: list[dict] = []
    for label in labels:
        try:
            result = backend.search_entities(label, limit)
        except (BackendUnavailable, ValueError) as exc:
            failures.append({"label": label, "error": str(exc)})
            continue
        if not result.candidates:
            failures.append({"label": label, "error": "no candidates"})
            continue
        for record in result.candidates:
            records.setdefault(record.id, record_to_json(record))

    report = {
        "labels": len(labels),
        "records": len(records),
        "failures": failures,
    }
    report_path = out_path.with_suffix(out_path.suffix + ".report.json")
    with open(report_path, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2)
        handle.write("\n")

    if not records:
        print("error: no records fetched; snapshot not written", file=sys.stderr)
        return 3

    tmp_path = out_path.with_suffix(out_path.suffix + ".tmp")
    with open(tmp_path, "w", encoding="utf-8") as handle:
        for entity_id in sorted(records, key=lambda i: int(i[1:])):
            handle.write(json.dumps(records[entity_id], ensure_ascii=False) + "\n")
    tmp_path.replace(out_path)
    print(f"wrote {len(records)} records to {out_path} ({len(failures)} failures)")
    return 0


def run_cache_purge(cache_dir: Path) -> int:
    removed = CacheStore(cache_dir).purge()
    print(f"removed {removed} cache entries from {cache_dir}")
    return 0


# ---------------------------------------------------------------------------

def _add_remote_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--api-url", dest="api_base_url", help="KG API base URL")
    parser.add_argument("--user-agent", dest="user_agent", help="User-Agent header")
    parser.add_argument("--limit", type=int, help="candidate limit per lookup (1..50)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tabkg",
        description="Annotate CSV tables with knowledge-graph classes and entities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    annotate = sub.add_parser("annotate", help="run CTA and/or CEA over a corpus")
    annotate.add_argument("--tables", dest="tables_dir", help="directory of CSV tables")
    annotate.add_argument("--targets-cta", dest="targets_cta", help="CTA targets CSV")
    annotate.add_argument("--targets-cea", dest="targets_cea", help="CEA targets CSV")
    annotate.add_argument(
        "--backend", choices=[BACKEND_SNAPSHOT, BACKEND_REMOTE], help="lookup backend"
    )
    annotate.add_argument("--snapshot", dest="snapshot_path", help="snapshot JSON-Lines file")
    annotate.add_argument("--threshold", type=int, help="fuzzy accept threshold (0..100)")
    annotate.add_argument("--concurrency", type=int, help="worker threads over tables")
    annotate.add_argument("--cache-dir", dest="cache_dir", help="lookup cache directory")
    annotate.add_argument("--out", dest="out_dir", help="output directory")
    annotate.add_argument("--wordlist", help="extra dictionary terms, one per line")
    annotate.add_argument("--config", help="JSON config file with RunConfig keys")
    _add_remote_flags(annotate)

    evaluate = sub.add_parser("evaluate", help="score annotations against gold")
    evaluate.add_argument("--task", choices=["cta", "cea"], required=True)
    evaluate.add_argument("--pred", required=True, help="predicted annotation CSV")
    evaluate.add_argument("--gold", required=True, help="gold annotation CSV")
    evaluate.add_argument("--json-out", help="also write the report as JSON")

    snapshot = sub.add_parser("snapshot", help="snapshot management")
    snapshot_sub = snapshot.add_subparsers(dest="snapshot_command", required=True)
    fetch = snapshot_sub.add_parser("fetch", help="build a snapshot from the remote API")
    fetch.add_argument("--labels", required=True, help="file of labels, one per line")
    fetch.add_argument("--out", required=True, help="snapshot file to write")
    _add_remote_flags(fetch)

    cache = sub.add_parser("cache", help="cache management")
    cache_sub = cache.add_subparsers(dest="cache_command", required=True)
    purge = cache_sub.add_parser("purge", help="drop all cached lookups")
    purge.add_argument("--cache-dir", dest="cache_dir", help="cache directory")

    return parser


_CONFIG_KEYS = (
    "tables_dir", "targets_cta", "targets_cea", "backend", "snapshot_path",
    "api_base_url", "user_agent", "limit", "threshold", "concurrency",
    "cache_dir", "out_dir", "wordlist",
)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)

    if args.command == "annotate":
        cli_values = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
        try:
            cfg = resolve_config(
                cli_values,
                Path(args.config) if args.config else None,
            )
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        return run_annotate(cfg)

    if args.command == "evaluate":
        return run_evaluate(
            args.task,
            Path(args.pred),
            Path(args.gold),
            Path(args.json_out) if args.json_out else None,
        )

    if args.command == "snapshot" and args.snapshot_command == "fetch":
        cli_values = {
            "api_base_url": args.api_base_url,
            "user_agent": args.user_agent,
            "limit": args.limit,
        }
        cfg = resolve_config(cli_values)
        try:
            backend = WikidataBackend(
                base_url=cfg.api_base_url, user_agent=cfg.user_agent
            )
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        try:
            return run_snapshot_fetch(
                Path(args.labels), Path(args.out), backend, cfg.limit
            )
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1

    if args.command == "cache" and args.cache_command == "purge":
        cli_values = {"cache_dir": args.cache_dir}
        cfg = resolve_config(cli_values)
        if cfg.cache_dir is None:
            print("error: no cache directory configured", file=sys.stderr)
            return 1
        return run_cache_purge(Path(cfg.cache_dir))

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
