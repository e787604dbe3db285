from __future__ import annotations

import csv

import pytest

from tabkg.cea import CellAnnotation
from tabkg.cta import ColumnAnnotation
from tabkg.errors import MalformedRowError
from tabkg.submission import (
    ENTITY_IRI_PREFIX,
    normalize_iri,
    read_annotations,
    read_targets_cea,
    read_targets_cta,
    write_cea_csv,
    write_cta_csv,
)


def test_cta_write_read_round_trip(tmp_path):
    annotations = [
        ColumnAnnotation(table_id="zeta", col=2, class_id="Q7", support=3, coverage=1.0),
        ColumnAnnotation(table_id="alpha", col=0, class_id="Q9", support=1, coverage=0.5),
    ]
    path = tmp_path / "cta.csv"
    write_cta_csv(annotations, path)
    parsed = read_annotations(path, "cta")
    assert parsed == {("alpha", 0): "Q9", ("zeta", 2): "Q7"}
    # rows come out sorted by (table, col) and carry full IRIs
    rows = list(csv.reader(open(path, encoding="utf-8")))
    assert rows[0][0] == "alpha"
    assert rows[0][2] == ENTITY_IRI_PREFIX + "Q9"


def test_cea_write_read_round_trip(tmp_path):
    annotations = [
        CellAnnotation(table_id="t", row=1, col=0, entity_id="Q5", method="direct-unique"),
        CellAnnotation(table_id="t", row=0, col=2, entity_id="Q6", method="prop-lookup"),
    ]
    path = tmp_path / "cea.csv"
    write_cea_csv(annotations, path)
    assert read_annotations(path, "cea") == {("t", 0, 2): "Q6", ("t", 1, 0): "Q5"}


def test_table_ids_with_commas_survive_quoting(tmp_path):
    annotations = [
        CellAnnotation(table_id='odd,"name"', row=0, col=0, entity_id="Q1", method="x"),
    ]
    path = tmp_path / "cea.csv"
    write_cea_csv(annotations, path)
    assert read_annotations(path, "cea") == {('odd,"name"', 0, 0): "Q1"}


def test_read_targets(tmp_path):
    cta = tmp_path / "cta_targets.csv"
    cta.write_text('"t","0"\n"t","3"\n', encoding="utf-8")
    assert read_targets_cta(cta) == [("t", 0), ("t", 3)]
    cea = tmp_path / "cea_targets.csv"
    cea.write_text('"t","0","5"\n', encoding="utf-8")
    assert read_targets_cea(cea) == [("t", 0, 5)]


def test_blank_lines_in_targets_are_skipped(tmp_path):
    cta = tmp_path / "targets.csv"
    cta.write_text('"t","0"\n\n"t","1"\n', encoding="utf-8")
    assert read_targets_cta(cta) == [("t", 0), ("t", 1)]


def test_negative_indices_are_malformed(tmp_path):
    cta = tmp_path / "targets.csv"
    cta.write_text('"t","-1"\n', encoding="utf-8")
    with pytest.raises(MalformedRowError):
        read_targets_cta(cta)


@pytest.mark.parametrize(
    "value,expected",
    [
        ("Q16", "Q16"),
        (" Q16 ", "Q16"),
        ("http://www.wikidata.org/entity/Q16", "Q16"),
        ("https://www.wikidata.org/entity/Q16", "Q16"),
        ("http://www.wikidata.org/entity/Q16/", "Q16"),
    ],
)
def test_normalize_iri_accepts_bare_and_full_forms(value, expected):
    assert normalize_iri(value, 1) == expected


@pytest.mark.parametrize("value", ["", "Q", "16", "http://example.com/thing"])
def test_normalize_iri_rejects_junk(value):
    with pytest.raises(MalformedRowError):
        normalize_iri(value, 7)
