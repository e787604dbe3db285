"""Column-type annotation: vote a KG class for each target column.

Every cell of the column that resolves to exactly one entity (directly,
or after a single spell-corrected retry) votes once for each class of
that entity; the class with the most votes wins, ties broken by ascending
numeric id. Cells with several candidates are skipped rather than
disambiguated; ambiguity costs a vote, not an annotation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable

from tabkg.errors import BackendUnavailable
from tabkg.kg_backend import EntityRecord, KgBackend, qid_number
from tabkg.spellcheck import SpellChecker
from tabkg.table_io import Table, column_context

WarnFn = Callable[[str], None]


def _noop_warn(_name: str) -> None:
    pass


@dataclass(frozen=True)
class ColumnAnnotation:
    """A class id assigned to one column, with its vote support."""

    table_id: str
    col: int
    class_id: str
    support: int
    coverage: float


@dataclass
class VoteTally:
    """Class-id vote counts for one column."""

    counts: Counter
    contributing_cells: int


def resolve_cell_unambiguous(
    label: str,
    kg: KgBackend,
    spell: SpellChecker,
    limit: int = 10,
    warn: WarnFn = _noop_warn,
) -> EntityRecord | None:
    """Resolve a label only when the lookup is unambiguous.

    Exactly one candidate wins; zero candidates get one spell-corrected
    retry that must itself be unambiguous; anything else resolves to None.
    """
    try:
        candidates = kg.search_entities(label, limit).candidates
    except BackendUnavailable:
        warn("backend_unavailable")
        return None
    if len(candidates) == 1:
        return candidates[0]
    if candidates:
        return None
    corrections = spell.suggest(label, kg)
    if not corrections:
        return None
    try:
        candidates = kg.search_entities(corrections[0].suggestion, limit).candidates
    except BackendUnavailable:
        warn("backend_unavailable")
        return None
    if len(candidates) == 1:
        return candidates[0]
    return None


def column_votes(
    ctx,
    kg: KgBackend,
    spell: SpellChecker,
    limit: int = 10,
    warn: WarnFn = _noop_warn,
) -> VoteTally:
    """Tally class votes over a column context's items."""
    counts: Counter = Counter()
    contributing = 0
    for label in ctx.items:
        record = resolve_cell_unambiguous(label, kg, spell, limit, warn)
        if record is None or not record.classes:
            continue
        contributing += 1
        for class_id in record.classes:
            counts[class_id] += 1
    return VoteTally(counts=counts, contributing_cells=contributing)


def annotate_column(
    ctx,
    kg: KgBackend,
    spell: SpellChecker,
    limit: int = 10,
    warn: WarnFn = _noop_warn,
) -> ColumnAnnotation | None:
    """Pick the majority class for one column, or None without votes."""
    tally = column_votes(ctx, kg, spell, limit, warn)
    if not tally.counts:
        return None
    class_id, support = min(
        tally.counts.items(), key=lambda item: (-item[1], qid_number(item[0]))
    )
    return ColumnAnnotation(
        table_id=ctx.table_id,
        col=ctx.col,
        class_id=class_id,
        support=support,
        coverage=tally.contributing_cells / len(ctx.items),
    )


def annotate_table_cta(
    table: Table,
    targets: Iterable[tuple[str, int]],
    kg: KgBackend,
    spell: SpellChecker,
    limit: int = 10,
    warn: WarnFn = _noop_warn,
) -> list[ColumnAnnotation]:
    """Annotate this table's target columns; unresolvable ones are omitted."""
    annotations = []
    for table_id, col in sorted(set(targets)):
        if table_id != table.table_id:
            continue
        if not 0 <= col < table.n_cols:
            warn("unknown_column")
            continue
        annotation = annotate_column(
            column_context(table, col), kg, spell, limit, warn
        )
        if annotation is not None:
            annotations.append(annotation)
    return annotations
