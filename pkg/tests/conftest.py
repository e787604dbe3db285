from __future__ import annotations

from pathlib import Path

import pytest

from tabkg.kg_backend import ClaimValue, EntityRecord, SnapshotBackend
from tabkg.spellcheck import SpellChecker
from tabkg.table_io import load_table

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = REPO_ROOT / "fixtures" / "alberta"


def make_record(entity_id, label, classes=(), aliases=(), claims=None):
    """Synthetic entity whose classes ride on P31 claims in the given order."""
    claims = dict(claims or {})
    if classes:
        claims.setdefault(
            "P31", tuple(ClaimValue.entity_ref(class_id) for class_id in classes)
        )
    return EntityRecord(
        id=entity_id, label=label, aliases=tuple(aliases), claims=claims
    )


class RecordingBackend:
    """Delegates to an inner backend while recording search queries."""

    def __init__(self, inner):
        self.inner = inner
        self.queries: list[str] = []

    def search_entities(self, query, limit=10):
        self.queries.append(query)
        return self.inner.search_entities(query, limit)

    def get_entity(self, entity_id):
        return self.inner.get_entity(entity_id)

    def get_classes(self, entity_id):
        return self.inner.get_classes(entity_id)


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture()
def snapshot() -> SnapshotBackend:
    return SnapshotBackend.load(FIXTURE_DIR / "snapshot.jsonl")


@pytest.fixture()
def spell(snapshot) -> SpellChecker:
    return SpellChecker(snapshot.vocabulary())


@pytest.fixture()
def towns_table():
    return load_table(FIXTURE_DIR / "tables" / "alberta_towns.csv")


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\n[acceptance] {name}: {outcome}", flush=True)
