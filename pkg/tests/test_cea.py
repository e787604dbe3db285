from __future__ import annotations

import pytest

from conftest import RecordingBackend, make_record
from tabkg.cea import (
    METHOD_CLASS_FILTERED,
    METHOD_DIRECT_UNIQUE,
    METHOD_PROP_LOOKUP,
    METHOD_SPELL_CORRECTED,
    _direct_resolve,
    _prop_match,
    annotate_row,
    annotate_table_cea,
    build_head_context,
    prop_lookup,
    resolve_head_entity,
)
from tabkg.kg_backend import ClaimValue, SnapshotBackend
from tabkg.table_io import CellValue, RowContext, row_context

TOWN_CLASS = "Q17343829"


def text_cell(text: str) -> CellValue:
    return CellValue(raw=text, text=text or None)


class TestResolveHeadEntity:
    def test_class_filter_separates_homonyms(self, snapshot, spell):
        record = resolve_head_entity("Peace River", TOWN_CLASS, snapshot, spell)
        assert record is not None and record.id == "Q1013064"

    def test_synthetic_homonyms_filtered_by_class(self, spell):
        backend = SnapshotBackend([
            make_record("Q41", "Grande Prairie", classes=("Q900",)),
            make_record("Q42", "Grande Prairie", classes=(TOWN_CLASS,)),
        ])
        record = resolve_head_entity("Grande Prairie", TOWN_CLASS, backend, spell)
        assert record is not None and record.id == "Q42"

    def test_unique_candidate_wins_regardless_of_class(self, snapshot, spell):
        # Grande Prairie does not carry the town class, but it is unique
        record = resolve_head_entity("Grande Prairie", TOWN_CLASS, snapshot, spell)
        assert record is not None and record.id == "Q205466"

    def test_ambiguous_without_class_stays_unresolved(self, snapshot, spell):
        assert resolve_head_entity("Peace River", None, snapshot, spell) is None

    def test_multiple_survivors_take_backend_order(self, spell):
        backend = SnapshotBackend([
            make_record("Q70", "Dupe", classes=(TOWN_CLASS,)),
            make_record("Q9", "Dupe", classes=(TOWN_CLASS,)),
        ])
        record = resolve_head_entity("Dupe", TOWN_CLASS, backend, spell)
        assert record is not None and record.id == "Q9"

    def test_zero_survivors_then_failed_correction_gives_up(self, snapshot, spell):
        record = resolve_head_entity("Peace River", "Q99999", snapshot, spell)
        assert record is None

    def test_spell_corrected_head(self, snapshot, spell):
        record = resolve_head_entity("Grande Prairi", TOWN_CLASS, snapshot, spell)
        assert record is not None and record.id == "Q205466"

    def test_method_tags_follow_the_cascade(self, snapshot, spell):
        assert _direct_resolve("Sundre", None, snapshot, spell, 10, lambda _: None)[1] == METHOD_DIRECT_UNIQUE
        assert _direct_resolve("Peace River", TOWN_CLASS, snapshot, spell, 10, lambda _: None)[1] == METHOD_CLASS_FILTERED
        assert _direct_resolve("Sundr", None, snapshot, spell, 10, lambda _: None)[1] == METHOD_SPELL_CORRECTED


class TestPropLookup:
    @pytest.fixture()
    def head(self, snapshot):
        entity = snapshot.get_entity("Q205466")
        return build_head_context(0, entity, snapshot)

    def test_literal_quantity_match_confirms_but_does_not_annotate(self, head):
        matched = _prop_match("650", head)
        assert matched is not None and matched.kind == "quantity"
        assert prop_lookup("650", head, table_id="t", col=4) is None

    def test_entity_claim_match_annotates_case_insensitively(self, head):
        annotation = prop_lookup("canada", head, table_id="t", col=2)
        assert annotation is not None
        assert annotation.entity_id == "Q16"
        assert annotation.method == METHOD_PROP_LOOKUP

    def test_unrelated_cell_matches_nothing(self, head):
        assert _prop_match("Mars", head) is None
        assert prop_lookup("Mars", head, table_id="t", col=1) is None

    def test_quantity_matching_has_relative_tolerance(self, head):
        assert _prop_match("650.0000001", head) is not None
        assert _prop_match("650.0005", head) is not None
        assert _prop_match("650.002", head) is None
        assert _prop_match("651", head) is None

    def test_aliases_of_referenced_entities_are_indexed(self, head):
        matched = _prop_match("CAN", head)
        assert matched is not None and matched.entity_id == "Q16"

    def test_claim_labels_alone_suffice_without_backend(self, snapshot):
        entity = snapshot.get_entity("Q205466")
        head = build_head_context(0, entity, kg=None)
        assert _prop_match("canada", head) is not None
        assert _prop_match("CAN", head) is None  # alias needs the backend

    def test_missing_head_entity_matches_nothing(self):
        head = build_head_context(0, None)
        assert _prop_match("anything", head) is None

    def test_claim_label_whitespace_is_normalized(self):
        record = make_record(
            "Q1", "head",
            claims={"P17": (ClaimValue.entity_ref("Q16", "  New   Zealand "),)},
        )
        head = build_head_context(0, record)
        assert _prop_match("new zealand", head) is not None


class TestAnnotateRow:
    def test_fixture_first_row(self, towns_table, snapshot, spell):
        ctx = row_context(towns_table, 0)
        annotations = annotate_row(
            ctx, {0, 2, 3, 4, 5}, {0: TOWN_CLASS}, snapshot, spell
        )
        by_col = {a.col: a for a in annotations}
        assert set(by_col) == {0, 2, 3, 5}  # the literal "650" yields nothing
        assert by_col[0].entity_id == "Q205466"
        assert by_col[0].method == METHOD_DIRECT_UNIQUE
        assert by_col[2].entity_id == "Q16"
        assert by_col[2].method == METHOD_PROP_LOOKUP
        assert by_col[3].entity_id == "Q1015487"
        assert by_col[5].entity_id == "Q1951"

    def test_literal_match_suppresses_direct_search(self, towns_table, snapshot, spell):
        recording = RecordingBackend(snapshot)
        ctx = row_context(towns_table, 0)
        annotate_row(ctx, {0, 4}, {0: TOWN_CLASS}, recording, spell)
        assert "650" not in recording.queries

    def test_ambiguous_head_filtered_by_column_class(self, towns_table, snapshot, spell):
        ctx = row_context(towns_table, 2)
        annotations = annotate_row(
            ctx, {0, 2, 3, 5}, {0: TOWN_CLASS}, snapshot, spell
        )
        by_col = {a.col: a for a in annotations}
        assert by_col[0].entity_id == "Q1013064"
        assert by_col[0].method == METHOD_CLASS_FILTERED
        assert by_col[2].entity_id == "Q16"
        assert by_col[3].entity_id == "Q1954098"

    def test_missing_head_falls_back_to_direct_lookup(self, snapshot, spell):
        ctx = RowContext(
            table_id="t", row=0,
            items=(text_cell(""), text_cell("canada"), text_cell("Sexsmith")),
        )
        annotations = annotate_row(ctx, {0, 1, 2}, {}, snapshot, spell)
        by_col = {a.col: a for a in annotations}
        assert set(by_col) == {1, 2}
        assert by_col[1].entity_id == "Q16"
        assert by_col[1].method == METHOD_DIRECT_UNIQUE
        assert by_col[2].entity_id == "Q1015487"

    def test_unresolvable_cells_are_simply_omitted(self, snapshot, spell):
        ctx = RowContext(
            table_id="t", row=0,
            items=(text_cell("Sundre"), text_cell("no such thing anywhere")),
        )
        annotations = annotate_row(ctx, {0, 1}, {}, snapshot, spell)
        assert [a.col for a in annotations] == [0]

    def test_untargeted_head_still_provides_context(self, towns_table, snapshot, spell):
        ctx = row_context(towns_table, 0)
        annotations = annotate_row(ctx, {2}, {0: TOWN_CLASS}, snapshot, spell)
        assert len(annotations) == 1
        assert annotations[0].method == METHOD_PROP_LOOKUP


class TestAnnotateTableCea:
    def fixture_targets(self):
        return [
            ("alberta_towns", row, col)
            for row in range(4)
            for col in (0, 2, 3, 5)
        ]

    def test_full_fixture_yields_sixteen_annotations(self, towns_table, snapshot, spell):
        annotations = annotate_table_cea(
            towns_table, self.fixture_targets(), {0: TOWN_CLASS}, snapshot, spell
        )
        assert len(annotations) == 16
        assert annotations == sorted(annotations, key=lambda a: (a.row, a.col))

    def test_empty_targets_yield_nothing(self, towns_table, snapshot, spell):
        assert annotate_table_cea(towns_table, [], {}, snapshot, spell) == []

    def test_literal_target_yields_no_row(self, towns_table, snapshot, spell):
        annotations = annotate_table_cea(
            towns_table, [("alberta_towns", 0, 4)], {0: TOWN_CLASS}, snapshot, spell
        )
        assert annotations == []

    def test_unknown_cell_target_warns(self, towns_table, snapshot, spell):
        warnings = []
        annotations = annotate_table_cea(
            towns_table, [("alberta_towns", 9, 9)], {}, snapshot, spell,
            warn=warnings.append,
        )
        assert annotations == []
        assert warnings == ["unknown_cell"]

    def test_other_tables_targets_ignored(self, towns_table, snapshot, spell):
        assert annotate_table_cea(
            towns_table, [("elsewhere", 0, 0)], {}, snapshot, spell
        ) == []

    def test_emitted_entities_exist_and_satisfy_claims(self, towns_table, snapshot, spell):
        annotations = annotate_table_cea(
            towns_table, self.fixture_targets(), {0: TOWN_CLASS}, snapshot, spell
        )
        heads = {
            row: resolve_head_entity(
                towns_table.cell(row, 0).text, TOWN_CLASS, snapshot, spell
            )
            for row in range(4)
        }
        for annotation in annotations:
            # no fabrication: every emitted id resolves in the backend
            record = snapshot.get_entity(annotation.entity_id)
            if annotation.method == METHOD_PROP_LOOKUP:
                # context superiority: the id appears among head claim targets
                head = heads[annotation.row]
                claim_targets = {
                    value.entity_id
                    for values in head.claims.values()
                    for value in values
                    if value.kind == "entity"
                }
                assert annotation.entity_id in claim_targets
            if annotation.method == METHOD_CLASS_FILTERED:
                assert TOWN_CLASS in record.classes
