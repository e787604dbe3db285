"""Persistent memoization of backend lookups.

The store is a directory of one JSON file per entry, named by the SHA-256
of the cache key; writes go through a temp file plus atomic rename, so a
killed process can never leave the store unreadable. Each file holds
``{"key", "stored_at", "payload"}``. Empty results and missing entities
are cached too, since negative lookups dominate noisy corpora.

Cache failures are deliberately silent on the annotation path: a corrupt
entry reads as a miss and is evicted, a failed write just leaves the
entry uncached.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
from datetime import datetime, timezone
from pathlib import Path

from tabkg import kg_backend
from tabkg.errors import NotFound
from tabkg.kg_backend import CandidateSet, EntityRecord, KgBackend

log = logging.getLogger(__name__)

KEY_SEP = "\x1f"


def search_key(query: str, limit: int) -> str:
    return f"search{KEY_SEP}{limit}{KEY_SEP}{query}"


def entity_key(entity_id: str) -> str:
    return f"entity{KEY_SEP}{entity_id}"


class CacheStore:
    """Directory-backed key/payload store with last-write-wins semantics."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
        return self.root / f"{digest}.json"

    def get(self, key: str):
        """Stored payload for ``key``, or None. Corrupt entries are evicted."""
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as handle:
                entry = json.load(handle)
            if entry.get("key") != key:
                raise ValueError("key mismatch")
            return entry["payload"]
        except FileNotFoundError:
            return None
        except (OSError, ValueError, KeyError):
            log.warning("evicting unreadable cache entry for %r", key)
            try:
                path.unlink()
            except OSError:
                pass
            return None

    def put(self, key: str, payload) -> None:
        """Store ``payload`` durably; failures are logged, never raised."""
        entry = {
            "key": key,
            "stored_at": datetime.now(timezone.utc).isoformat(),
            "payload": payload,
        }
        path = self._path(key)
        try:
            with self._lock:
                fd, tmp_name = tempfile.mkstemp(dir=self.root, suffix=".tmp")
                try:
                    with os.fdopen(fd, "w", encoding="utf-8") as handle:
                        json.dump(entry, handle, ensure_ascii=False)
                    os.replace(tmp_name, path)
                except BaseException:
                    try:
                        os.unlink(tmp_name)
                    except OSError:
                        pass
                    raise
        except (OSError, TypeError, ValueError) as exc:
            log.warning("cache write failed for %r: %s", key, exc)

    def purge(self) -> int:
        """Delete every entry (and stray temp files); returns entries removed."""
        removed = 0
        for path in self.root.glob("*.json"):
            try:
                path.unlink()
                removed += 1
            except OSError:
                pass
        for path in self.root.glob("*.tmp"):
            try:
                path.unlink()
            except OSError:
                pass
        return removed


_MISSING = "missing"


class CachedBackend(KgBackend):
    """A KgBackend that consults a CacheStore before its inner backend.

    With an unchanged inner backend the annotations produced through the
    cache equal the uncached ones; on a warm cache the inner backend is
    never called at all.
    """

    def __init__(self, inner: KgBackend, store: CacheStore):
        super().__init__()
        self.inner = inner
        self.store = store

    def search_entities(self, query: str, limit: int = 10) -> CandidateSet:
        self.check_search_args(query, limit)
        key = search_key(query, limit)
        payload = self.store.get(key)
        if isinstance(payload, dict):
            try:
                return kg_backend.candidate_set_from_json(payload)
            except (KeyError, TypeError, ValueError):
                log.warning("undecodable cached search for %r", query)
        self._count("search_entities")
        result = self.inner.search_entities(query, limit)
        self.store.put(key, kg_backend.candidate_set_to_json(result))
        return result

    def get_entity(self, entity_id: str) -> EntityRecord:
        key = entity_key(entity_id)
        payload = self.store.get(key)
        if isinstance(payload, dict):
            if payload.get(_MISSING):
                raise NotFound(entity_id)
            try:
                return kg_backend.record_from_json(payload)
            except (KeyError, TypeError, ValueError):
                log.warning("undecodable cached entity %s", entity_id)
        self._count("get_entity")
        try:
            record = self.inner.get_entity(entity_id)
        except NotFound:
            self.store.put(key, {_MISSING: entity_id})
            raise
        self.store.put(key, kg_backend.record_to_json(record))
        return record
