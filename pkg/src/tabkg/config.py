"""Run configuration for annotation runs.

Settings resolve with precedence: CLI flags > environment variables >
config-file values > built-in defaults. Only the API base URL and the
cache directory can come from the environment (``TABKG_API_URL`` and
``TABKG_CACHE_DIR``).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from tabkg.kg_backend import WIKIDATA_API_URL

ENV_API_URL = "TABKG_API_URL"
ENV_CACHE_DIR = "TABKG_CACHE_DIR"

DEFAULT_USER_AGENT = "tabkg/0.1 (table annotation research tool)"

BACKEND_SNAPSHOT = "snapshot"
BACKEND_REMOTE = "remote"

_PATH_FIELDS = {
    "tables_dir", "targets_cta", "targets_cea", "snapshot_path",
    "cache_dir", "out_dir", "wordlist",
}


@dataclass
class RunConfig:
    """Everything an annotation run needs, with sane defaults."""

    tables_dir: Path | None = None
    targets_cta: Path | None = None
    targets_cea: Path | None = None
    backend: str = BACKEND_SNAPSHOT
    snapshot_path: Path | None = None
    api_base_url: str = WIKIDATA_API_URL
    user_agent: str = DEFAULT_USER_AGENT
    limit: int = 10
    threshold: int = 90
    concurrency: int = 4
    cache_dir: Path | None = None
    out_dir: Path = field(default_factory=lambda: Path("out"))
    wordlist: Path | None = None

    def validate(self) -> None:
        if self.tables_dir is None:
            raise ValueError("a tables directory is required")
        if self.backend not in (BACKEND_SNAPSHOT, BACKEND_REMOTE):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == BACKEND_SNAPSHOT and self.snapshot_path is None:
            raise ValueError("backend=snapshot requires a snapshot path")
        if not 0 <= self.threshold <= 100:
            raise ValueError(f"threshold must be in 0..100, got {self.threshold}")
        if self.concurrency < 1:
            raise ValueError(f"concurrency must be >= 1, got {self.concurrency}")
        if not 1 <= self.limit <= 50:
            raise ValueError(f"limit must be in 1..50, got {self.limit}")

    def echo(self) -> dict:
        """JSON-safe view of the config for the run manifest."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = str(value) if isinstance(value, Path) else value
        return out


def resolve_config(cli_values: dict, config_file: Path | None = None) -> RunConfig:
    """Merge config-file values, environment overrides, and CLI flags.

    ``cli_values`` holds only flags the user actually passed (absent flags
    map to None and are ignored).
    """
    merged: dict = {}
    if config_file is not None:
        with open(config_file, encoding="utf-8") as handle:
            file_values = json.load(handle)
        if not isinstance(file_values, dict):
            raise ValueError(f"{config_file}: config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(file_values) - known
        if unknown:
            raise ValueError(f"{config_file}: unknown config keys {sorted(unknown)}")
        merged.update(file_values)

    if os.environ.get(ENV_API_URL):
        merged["api_base_url"] = os.environ[ENV_API_URL]
    if os.environ.get(ENV_CACHE_DIR):
        merged["cache_dir"] = os.environ[ENV_CACHE_DIR]

    merged.update({k: v for k, v in cli_values.items() if v is not None})

    for name in _PATH_FIELDS & set(merged):
        if merged[name] is not None:
            merged[name] = Path(merged[name])
    return RunConfig(**merged)
