"""Knowledge-graph lookup backends.

Two interchangeable implementations of the same lookup surface:

* ``SnapshotBackend``: a read-only store loaded from a JSON-Lines file,
  for deterministic offline runs.
* ``WikidataBackend``: a client for the public Wikidata web API
  (``wbsearchentities`` for search, ``wbgetentities`` for structured
  claims), with retries, backoff, and a bounded in-flight request count.

An entity's classes are the deduplicated union of its P31 (instance of),
P279 (subclass of), and P361 (part of) claim targets, in that property
order.
"""

from __future__ import annotations

import json
import re
import threading
import time
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import requests

from tabkg.errors import BackendUnavailable, NotFound, RateLimited

ENTITY_ID_RE = re.compile(r"^Q[0-9]+$")
PROPERTY_ID_RE = re.compile(r"^P[0-9]+$")
CLASS_PROPERTIES = ("P31", "P279", "P361")

WIKIDATA_API_URL = "https://www.wikidata.org/w/api.php"
MAX_SEARCH_LIMIT = 50

KIND_ENTITY = "entity"
KIND_LITERAL = "literal"
KIND_QUANTITY = "quantity"


def qid_number(entity_id: str) -> int:
    """Numeric part of a Q-id, for deterministic ordering."""
    return int(entity_id[1:])


@dataclass(frozen=True)
class ClaimValue:
    """One claim value: an entity reference, a text literal, or a quantity."""

    kind: str
    entity_id: str | None = None
    entity_label: str = ""
    text: str = ""
    amount: Decimal | None = None

    def __post_init__(self):
        if self.kind == KIND_ENTITY:
            if not self.entity_id or not ENTITY_ID_RE.match(self.entity_id):
                raise ValueError(f"bad entity reference: {self.entity_id!r}")
        elif self.kind == KIND_QUANTITY:
            if self.amount is None or not self.amount.is_finite():
                raise ValueError(f"quantity amount must be finite: {self.amount!r}")
        elif self.kind != KIND_LITERAL:
            raise ValueError(f"unknown claim kind: {self.kind!r}")

    @classmethod
    def entity_ref(cls, entity_id: str, label: str = "") -> "ClaimValue":
        return cls(kind=KIND_ENTITY, entity_id=entity_id, entity_label=label)

    @classmethod
    def literal(cls, text: str) -> "ClaimValue":
        return cls(kind=KIND_LITERAL, text=text)

    @classmethod
    def quantity(cls, amount: Decimal | int | str) -> "ClaimValue":
        return cls(kind=KIND_QUANTITY, amount=Decimal(amount))


def classes_from_claims(claims: Mapping[str, tuple[ClaimValue, ...]]) -> tuple[str, ...]:
    """Union of P31/P279/P361 target ids: property order, claim order, deduped."""
    seen: dict[str, None] = {}
    for prop in CLASS_PROPERTIES:
        for value in claims.get(prop, ()):
            if value.kind == KIND_ENTITY and value.entity_id not in seen:
                seen[value.entity_id] = None
    return tuple(seen)


@dataclass(frozen=True)
class EntityRecord:
    """A KG entity with its label, aliases, class ids, and typed claims."""

    id: str
    label: str
    aliases: tuple[str, ...] = ()
    claims: Mapping[str, tuple[ClaimValue, ...]] = field(default_factory=dict)
    classes: tuple[str, ...] = ()

    def __post_init__(self):
        if not ENTITY_ID_RE.match(self.id):
            raise ValueError(f"bad entity id: {self.id!r}")
        if not self.label:
            raise ValueError(f"entity {self.id} has an empty label")
        for prop in self.claims:
            if not PROPERTY_ID_RE.match(prop):
                raise ValueError(f"bad property id on {self.id}: {prop!r}")
        if not self.classes:
            object.__setattr__(self, "classes", classes_from_claims(self.claims))
        for class_id in self.classes:
            if not ENTITY_ID_RE.match(class_id):
                raise ValueError(f"bad class id on {self.id}: {class_id!r}")


@dataclass(frozen=True)
class CandidateSet:
    """Entity candidates for one query, in backend relevance order."""

    query: str
    candidates: tuple[EntityRecord, ...]

    def __post_init__(self):
        ids = [record.id for record in self.candidates]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate candidate ids for {self.query!r}")


# ---------------------------------------------------------------------------
# JSON codec (snapshot lines and cache payloads share it)

def claim_to_json(value: ClaimValue) -> dict:
    if value.kind == KIND_ENTITY:
        return {"kind": KIND_ENTITY, "id": value.entity_id, "label": value.entity_label}
    if value.kind == KIND_QUANTITY:
        amount = value.amount
        if amount == amount.to_integral_value():
            return {"kind": KIND_QUANTITY, "amount": int(amount)}
        return {"kind": KIND_QUANTITY, "amount": str(amount)}
    return {"kind": KIND_LITERAL, "text": value.text}


def claim_from_json(data: dict) -> ClaimValue:
    kind = data.get("kind")
    if kind == KIND_ENTITY:
        return ClaimValue.entity_ref(data["id"], data.get("label", ""))
    if kind == KIND_QUANTITY:
        raw = data["amount"]
        return ClaimValue.quantity(Decimal(str(raw)))
    if kind == KIND_LITERAL:
        return ClaimValue.literal(data["text"])
    raise ValueError(f"unknown claim kind in payload: {kind!r}")


def record_to_json(record: EntityRecord) -> dict:
    return {
        "id": record.id,
        "label": record.label,
        "aliases": list(record.aliases),
        "classes": list(record.classes),
        "claims": {
            prop: [claim_to_json(value) for value in values]
            for prop, values in record.claims.items()
        },
    }


def record_from_json(data: dict) -> EntityRecord:
    claims = {
        prop: tuple(claim_from_json(value) for value in values)
        for prop, values in data.get("claims", {}).items()
    }
    return EntityRecord(
        id=data["id"],
        label=data["label"],
        aliases=tuple(data.get("aliases", ())),
        claims=claims,
        classes=tuple(data.get("classes", ())),
    )


def candidate_set_to_json(cands: CandidateSet) -> dict:
    return {
        "query": cands.query,
        "candidates": [record_to_json(record) for record in cands.candidates],
    }


def candidate_set_from_json(data: dict) -> CandidateSet:
    return CandidateSet(
        query=data["query"],
        candidates=tuple(record_from_json(item) for item in data["candidates"]),
    )


# ---------------------------------------------------------------------------
# Backends

class KgBackend:
    """Lookup interface both backends implement.

    ``calls`` counts real lookups per operation; the cache layer leaves it
    untouched on hits, which is how tests assert a warm run is offline.
    """

    def __init__(self):
        self.calls: Counter[str] = Counter()
        self._calls_lock = threading.Lock()

    def _count(self, op: str) -> None:
        with self._calls_lock:
            self.calls[op] += 1

    @staticmethod
    def check_search_args(query: str, limit: int) -> None:
        if not query or not query.strip():
            raise ValueError("search query must be non-empty")
        if not 1 <= limit <= MAX_SEARCH_LIMIT:
            raise ValueError(f"limit must be in 1..{MAX_SEARCH_LIMIT}, got {limit}")

    def search_entities(self, query: str, limit: int = 10) -> CandidateSet:
        raise NotImplementedError

    def get_entity(self, entity_id: str) -> EntityRecord:
        raise NotImplementedError

    def get_classes(self, entity_id: str) -> tuple[str, ...]:
        """Class ids of one entity (projection of ``get_entity``)."""
        return self.get_entity(entity_id).classes


class SnapshotBackend(KgBackend):
    """Read-only store over locally held records.

    Search is a case-insensitive exact match on labels and aliases,
    narrower than the web API's fuzzy search, which keeps offline runs
    deterministic. Equally relevant matches are ordered by ascending
    numeric id.
    """

    def __init__(self, records: Iterable[EntityRecord]):
        super().__init__()
        self._records: dict[str, EntityRecord] = {}
        self._by_text: dict[str, list[str]] = {}
        for record in records:
            if record.id in self._records:
                raise ValueError(f"duplicate id in snapshot: {record.id}")
            self._records[record.id] = record
            for text in (record.label, *record.aliases):
                ids = self._by_text.setdefault(text.casefold(), [])
                if record.id not in ids:
                    ids.append(record.id)
        for ids in self._by_text.values():
            ids.sort(key=qid_number)

    @classmethod
    def load(cls, path: str | Path) -> "SnapshotBackend":
        records = []
        with open(path, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(record_from_json(json.loads(line)))
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise ValueError(f"{path}: bad snapshot line {line_no}: {exc}") from exc
        return cls(records)

    def __len__(self) -> int:
        return len(self._records)

    def search_entities(self, query: str, limit: int = 10) -> CandidateSet:
        self.check_search_args(query, limit)
        self._count("search_entities")
        ids = self._by_text.get(query.casefold(), [])
        return CandidateSet(
            query=query,
            candidates=tuple(self._records[i] for i in ids[:limit]),
        )

    def get_entity(self, entity_id: str) -> EntityRecord:
        if not ENTITY_ID_RE.match(entity_id):
            raise ValueError(f"bad entity id: {entity_id!r}")
        self._count("get_entity")
        try:
            return self._records[entity_id]
        except KeyError:
            raise NotFound(entity_id) from None

    def vocabulary(self) -> Iterator[str]:
        """All labels and aliases, for the spell-check dictionary."""
        for record in self._records.values():
            yield record.label
            yield from record.aliases


class WikidataBackend(KgBackend):
    """Client for the Wikidata action API.

    Claims come from the structured ``wbgetentities`` payload, never from
    rendered wikitext. Transient failures are retried up to ``max_retries``
    times with exponential backoff, honoring Retry-After; a semaphore caps
    concurrent requests out of API etiquette.
    """

    def __init__(
        self,
        base_url: str = WIKIDATA_API_URL,
        user_agent: str = "",
        session: requests.Session | None = None,
        max_retries: int = 3,
        backoff_seconds: float = 0.5,
        max_in_flight: int = 4,
        timeout: float = 30.0,
    ):
        super().__init__()
        if not user_agent:
            raise ValueError("a custom User-Agent string is required")
        self.base_url = base_url
        self._headers = {"User-Agent": user_agent}
        self._session = session or requests.Session()
        self._max_retries = max_retries
        self._backoff = backoff_seconds
        self._gate = threading.Semaphore(max_in_flight)
        self._timeout = timeout
        self._sleep = time.sleep

    def search_entities(self, query: str, limit: int = 10) -> CandidateSet:
        self.check_search_args(query, limit)
        self._count("search_entities")
        data = self._get({
            "action": "wbsearchentities",
            "search": query,
            "language": "en",
            "type": "item",
            "limit": str(limit),
            "format": "json",
        })
        ids: list[str] = []
        for hit in data.get("search", []):
            hit_id = hit.get("id", "")
            if ENTITY_ID_RE.match(hit_id) and hit_id not in ids:
                ids.append(hit_id)
        records = self._fetch_records(ids) if ids else {}
        ordered = tuple(records[i] for i in ids if i in records)
        return CandidateSet(query=query, candidates=ordered)

    def get_entity(self, entity_id: str) -> EntityRecord:
        if not ENTITY_ID_RE.match(entity_id):
            raise ValueError(f"bad entity id: {entity_id!r}")
        self._count("get_entity")
        records = self._fetch_records([entity_id])
        if entity_id not in records:
            raise NotFound(entity_id)
        return records[entity_id]

    # -- wire plumbing ----------------------------------------------------

    def _fetch_records(self, ids: list[str]) -> dict[str, EntityRecord]:
        data = self._get({
            "action": "wbgetentities",
            "ids": "|".join(ids),
            "props": "claims|labels|aliases",
            "languages": "en",
            "format": "json",
        })
        records: dict[str, EntityRecord] = {}
        for entity_id, payload in data.get("entities", {}).items():
            if "missing" in payload:
                continue
            records[entity_id] = self._record_from_api(entity_id, payload)
        return records

    @staticmethod
    def _record_from_api(entity_id: str, payload: dict) -> EntityRecord:
        label = payload.get("labels", {}).get("en", {}).get("value", "") or entity_id
        aliases = tuple(
            item["value"] for item in payload.get("aliases", {}).get("en", [])
        )
        claims: dict[str, tuple[ClaimValue, ...]] = {}
        for prop, statements in payload.get("claims", {}).items():
            values = []
            for statement in statements:
                value = _claim_from_snak(statement.get("mainsnak", {}))
                if value is not None:
                    values.append(value)
            if values:
                claims[prop] = tuple(values)
        return EntityRecord(
            id=entity_id, label=label, aliases=aliases, claims=claims
        )

    def _get(self, params: dict) -> dict:
        last_error: Exception | None = None
        rate_limited = False
        skip_backoff = False
        for attempt in range(self._max_retries):
            if attempt and not skip_backoff:
                self._sleep(self._backoff * (2 ** (attempt - 1)))
            skip_backoff = False
            try:
                with self._gate:
                    response = self._session.get(
                        self.base_url,
                        params=params,
                        headers=self._headers,
                        timeout=self._timeout,
                    )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code in (429, 503):
                rate_limited = response.status_code == 429
                last_error = BackendUnavailable(f"HTTP {response.status_code}")
                retry_after = response.headers.get("Retry-After")
                if retry_after:
                    try:
                        self._sleep(min(float(retry_after), 30.0))
                        skip_backoff = True
                    except ValueError:
                        pass
                continue
            if response.status_code >= 400:
                raise BackendUnavailable(f"HTTP {response.status_code} from {self.base_url}")
            try:
                data = response.json()
            except ValueError as exc:
                last_error = exc
                continue
            if "error" in data:
                raise BackendUnavailable(f"API error: {data['error'].get('code', '?')}")
            return data
        if rate_limited:
            raise RateLimited(f"gave up after {self._max_retries} attempts") from last_error
        raise BackendUnavailable(
            f"gave up after {self._max_retries} attempts: {last_error}"
        ) from last_error


def _claim_from_snak(snak: dict) -> ClaimValue | None:
    """Map one API snak to a ClaimValue; unsupported datatypes are dropped."""
    if snak.get("snaktype") != "value":
        return None
    datavalue = snak.get("datavalue", {})
    value = datavalue.get("value")
    dtype = datavalue.get("type")
    if dtype == "wikibase-entityid":
        target = value.get("id") if isinstance(value, dict) else None
        if target and ENTITY_ID_RE.match(target):
            return ClaimValue.entity_ref(target)
        return None
    if dtype == "quantity":
        try:
            amount = Decimal(str(value.get("amount", "")))
        except InvalidOperation:
            return None
        if not amount.is_finite():
            return None
        return ClaimValue.quantity(amount)
    if dtype == "string":
        return ClaimValue.literal(str(value))
    if dtype == "monolingualtext":
        return ClaimValue.literal(str(value.get("text", "")))
    if dtype == "time":
        return ClaimValue.literal(str(value.get("time", "")))
    return None
