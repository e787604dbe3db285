"""Cell-entity annotation driven by row context.

The first cell of a row names the row's head entity; its claims are the
primary evidence for the other cells. A cell that matches one of the head
entity's claim values is either annotated with the referenced entity
(entity-valued claims) or confirmed-but-unannotated (literal and quantity
claims carry no entity id). Only cells with no claim match fall back to a
direct search, where the column's CTA class disambiguates multi-candidate
lookups and a single spell-corrected retry rescues empty ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Callable, Iterable, Mapping

from tabkg.errors import BackendUnavailable, NotFound
from tabkg.kg_backend import (
    KIND_ENTITY,
    KIND_QUANTITY,
    ClaimValue,
    EntityRecord,
    KgBackend,
)
from tabkg.spellcheck import SpellChecker
from tabkg.table_io import Table, normalize_cell, row_context

WarnFn = Callable[[str], None]

METHOD_PROP_LOOKUP = "prop-lookup"
METHOD_DIRECT_UNIQUE = "direct-unique"
METHOD_CLASS_FILTERED = "class-filtered"
METHOD_SPELL_CORRECTED = "spell-corrected"

_QUANTITY_REL_TOL = Decimal("1e-6")


def _noop_warn(_name: str) -> None:
    pass


@dataclass(frozen=True)
class CellAnnotation:
    """An entity id assigned to one cell, tagged with how it was found."""

    table_id: str
    row: int
    col: int
    entity_id: str
    method: str


@dataclass
class HeadEntityContext:
    """Lookup structures over the head entity's claim values.

    ``text_index`` maps normalized, case-folded claim-value text (entity
    labels and aliases, literal text, canonical quantity renderings) to
    the claim it came from; ``quantities`` supports tolerant numeric
    matching of cells that parse as decimals.
    """

    row: int
    entity: EntityRecord | None
    text_index: dict[str, ClaimValue] = field(default_factory=dict)
    quantities: list[tuple[Decimal, ClaimValue]] = field(default_factory=list)


def _index_key(text: str) -> str | None:
    normalized = normalize_cell(text).text
    return normalized.casefold() if normalized is not None else None


def _canonical_decimal(amount: Decimal) -> str:
    if amount == amount.to_integral_value():
        return str(int(amount))
    return format(amount.normalize(), "f")


def _parse_decimal(text: str) -> Decimal | None:
    try:
        amount = Decimal(text.strip())
    except (InvalidOperation, ValueError):
        return None
    return amount if amount.is_finite() else None


def build_head_context(
    row: int,
    entity: EntityRecord | None,
    kg: KgBackend | None = None,
) -> HeadEntityContext:
    """Index the head entity's claim values for cell matching.

    Entity-valued claims are keyed by the label carried on the claim and,
    when the referenced record is resolvable through ``kg``, by its label
    and aliases as well. The first claim to produce a key keeps it;
    properties are walked in ascending numeric order for determinism.
    """
    ctx = HeadEntityContext(row=row, entity=entity)
    if entity is None:
        return ctx

    def add_key(text: str, value: ClaimValue) -> None:
        key = _index_key(text)
        if key is not None:
            ctx.text_index.setdefault(key, value)

    for prop in sorted(entity.claims, key=lambda p: int(p[1:])):
        for value in entity.claims[prop]:
            if value.kind == KIND_ENTITY:
                add_key(value.entity_label, value)
                if kg is not None:
                    try:
                        referenced = kg.get_entity(value.entity_id)
                    except (NotFound, BackendUnavailable):
                        referenced = None
                    if referenced is not None:
                        add_key(referenced.label, value)
                        for alias in referenced.aliases:
                            add_key(alias, value)
            elif value.kind == KIND_QUANTITY:
                add_key(_canonical_decimal(value.amount), value)
                ctx.quantities.append((value.amount, value))
            else:
                add_key(value.text, value)
    return ctx


def _prop_match(cell_text: str, head: HeadEntityContext) -> ClaimValue | None:
    """The head claim whose value matches the cell, if any."""
    key = _index_key(cell_text)
    if key is None:
        return None
    value = head.text_index.get(key)
    if value is not None:
        return value
    amount = _parse_decimal(cell_text)
    if amount is not None:
        for claim_amount, claim in head.quantities:
            tolerance = _QUANTITY_REL_TOL * max(Decimal(1), abs(claim_amount))
            if abs(amount - claim_amount) <= tolerance:
                return claim
    return None


def prop_lookup(
    cell_text: str,
    head: HeadEntityContext,
    *,
    table_id: str,
    col: int,
) -> CellAnnotation | None:
    """Annotate a cell from the head entity's claims.

    A match on an entity-valued claim yields an annotation to the
    referenced entity; a match on a literal or quantity confirms the value
    but yields none (there is no entity id to emit); no match yields none.
    """
    matched = _prop_match(cell_text, head)
    if matched is not None and matched.kind == KIND_ENTITY:
        return CellAnnotation(
            table_id=table_id,
            row=head.row,
            col=col,
            entity_id=matched.entity_id,
            method=METHOD_PROP_LOOKUP,
        )
    return None


def _direct_resolve(
    label: str,
    col_class: str | None,
    kg: KgBackend,
    spell: SpellChecker,
    limit: int,
    warn: WarnFn,
) -> tuple[EntityRecord | None, str | None]:
    """Search cascade shared by head cells and claim-less target cells.

    One candidate wins outright. Several candidates are filtered by the
    column class when one is known: a lone survivor wins, several keep the
    backend's top-ranked one, none falls through to spell correction.
    Without a class the ambiguity stands and nothing is annotated. An
    empty lookup gets a single spell-corrected retry of the same cascade.
    """

    def attempt(query: str) -> tuple[EntityRecord | None, str | None, bool]:
        # third element: worth retrying with a spelling correction
        try:
            candidates = kg.search_entities(query, limit).candidates
        except BackendUnavailable:
            warn("backend_unavailable")
            return None, None, False
        if len(candidates) == 1:
            return candidates[0], METHOD_DIRECT_UNIQUE, False
        if not candidates:
            return None, None, True
        if col_class is None:
            return None, None, False
        survivors = [c for c in candidates if col_class in c.classes]
        if survivors:
            return survivors[0], METHOD_CLASS_FILTERED, False
        return None, None, True

    record, method, retry = attempt(label)
    if record is not None:
        return record, method
    if not retry:
        return None, None
    corrections = spell.suggest(label, kg)
    if not corrections:
        return None, None
    record, method, _ = attempt(corrections[0].suggestion)
    if record is not None:
        return record, METHOD_SPELL_CORRECTED
    return None, None


def resolve_head_entity(
    label: str,
    col0_class: str | None,
    kg: KgBackend,
    spell: SpellChecker,
    limit: int = 10,
    warn: WarnFn = _noop_warn,
) -> EntityRecord | None:
    """Resolve a row's head entity, using the first column's class to
    disambiguate multi-candidate lookups."""
    record, _method = _direct_resolve(label, col0_class, kg, spell, limit, warn)
    return record


def annotate_row(
    ctx,
    target_cols: Iterable[int],
    col_classes: Mapping[int, str | None],
    kg: KgBackend,
    spell: SpellChecker,
    limit: int = 10,
    warn: WarnFn = _noop_warn,
) -> list[CellAnnotation]:
    """Annotate the target cells of one row.

    The head entity is resolved from cell 0 whether or not that cell is a
    target; targeted later cells try the claim lookup first and fall back
    to the direct-search cascade. A claim match on a literal or quantity
    value ends the cell's processing without an annotation: the value is
    explained by the head entity, so a noisy direct search would only
    invent errors.
    """
    targets = {col for col in target_cols if 0 <= col < len(ctx.items)}
    annotations: list[CellAnnotation] = []

    head_record = None
    head_method = None
    head_cell = ctx.items[0] if ctx.items else None
    if head_cell is not None and head_cell.text is not None:
        head_record, head_method = _direct_resolve(
            head_cell.text, col_classes.get(0), kg, spell, limit, warn
        )
    head = build_head_context(ctx.row, head_record, kg)

    if 0 in targets and head_record is not None:
        annotations.append(
            CellAnnotation(
                table_id=ctx.table_id,
                row=ctx.row,
                col=0,
                entity_id=head_record.id,
                method=head_method,
            )
        )

    for col in sorted(targets - {0}):
        text = ctx.items[col].text
        if text is None:
            continue
        if head_record is not None:
            matched = _prop_match(text, head)
            if matched is not None:
                if matched.kind == KIND_ENTITY:
                    annotations.append(
                        CellAnnotation(
                            table_id=ctx.table_id,
                            row=ctx.row,
                            col=col,
                            entity_id=matched.entity_id,
                            method=METHOD_PROP_LOOKUP,
                        )
                    )
                continue
        record, method = _direct_resolve(
            text, col_classes.get(col), kg, spell, limit, warn
        )
        if record is not None:
            annotations.append(
                CellAnnotation(
                    table_id=ctx.table_id,
                    row=ctx.row,
                    col=col,
                    entity_id=record.id,
                    method=method,
                )
            )
    return annotations


def annotate_table_cea(
    table: Table,
    targets: Iterable[tuple[str, int, int]],
    col_classes: Mapping[int, str | None],
    kg: KgBackend,
    spell: SpellChecker,
    limit: int = 10,
    warn: WarnFn = _noop_warn,
) -> list[CellAnnotation]:
    """Annotate this table's target cells, sorted by (row, col).

    Rows without any target are never processed; targets addressing cells
    outside the table are reported and skipped.
    """
    by_row: dict[int, set[int]] = {}
    for table_id, row, col in set(targets):
        if table_id != table.table_id:
            continue
        if not (0 <= row < table.n_rows and 0 <= col < table.n_cols):
            warn("unknown_cell")
            continue
        by_row.setdefault(row, set()).add(col)

    annotations: list[CellAnnotation] = []
    for row in sorted(by_row):
        annotations.extend(
            annotate_row(
                row_context(table, row), by_row[row], col_classes,
                kg, spell, limit, warn,
            )
        )
    annotations.sort(key=lambda a: (a.row, a.col))
    return annotations
