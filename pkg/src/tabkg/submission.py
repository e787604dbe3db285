"""Readers and writers for target and annotation CSV files.

Annotation rows carry quoted fields and full entity IRIs:

    CTA:  "table id","column id","http://www.wikidata.org/entity/Q..."
    CEA:  "table id","row id","column id","http://www.wikidata.org/entity/Q..."

Target files use the same id columns without the IRI. Bare ``Q...`` ids
are accepted anywhere an IRI is.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path
from typing import Sequence

from tabkg.cea import CellAnnotation
from tabkg.cta import ColumnAnnotation
from tabkg.errors import DuplicatePredictionError, MalformedRowError

ENTITY_IRI_PREFIX = "http://www.wikidata.org/entity/"
_BARE_ID = re.compile(r"^[QPL][0-9]+$")

TASK_CTA = "cta"
TASK_CEA = "cea"


def normalize_iri(value: str, line_no: int) -> str:
    """Canonical bare id from a full IRI or an already-bare id."""
    value = value.strip()
    if not value:
        raise MalformedRowError("empty annotation IRI", line_no)
    if "/" in value:
        value = value.rstrip("/").rsplit("/", 1)[-1]
    if not _BARE_ID.match(value):
        raise MalformedRowError(f"not an entity IRI: {value!r}", line_no)
    return value


def _parse_index(value: str, what: str, line_no: int) -> int:
    try:
        index = int(value)
    except ValueError:
        raise MalformedRowError(f"{what} is not an integer: {value!r}", line_no) from None
    if index < 0:
        raise MalformedRowError(f"{what} is negative: {value!r}", line_no)
    return index


def _read_rows(path: str | Path, n_fields: int):
    with open(path, encoding="utf-8", newline="") as handle:
        for line_no, row in enumerate(csv.reader(handle), 1):
            if not row:
                continue
            if len(row) != n_fields:
                raise MalformedRowError(
                    f"expected {n_fields} fields, got {len(row)}", line_no
                )
            yield line_no, row


def read_targets_cta(path: str | Path) -> list[tuple[str, int]]:
    return [
        (row[0], _parse_index(row[1], "column id", line_no))
        for line_no, row in _read_rows(path, 2)
    ]


def read_targets_cea(path: str | Path) -> list[tuple[str, int, int]]:
    return [
        (
            row[0],
            _parse_index(row[1], "row id", line_no),
            _parse_index(row[2], "column id", line_no),
        )
        for line_no, row in _read_rows(path, 3)
    ]


def read_annotations(path: str | Path, task: str) -> dict[tuple, str]:
    """Annotation file as a key -> bare-id map; duplicate keys are an error."""
    n_fields = 3 if task == TASK_CTA else 4
    annotations: dict[tuple, str] = {}
    for line_no, row in _read_rows(path, n_fields):
        if task == TASK_CTA:
            key = (row[0], _parse_index(row[1], "column id", line_no))
        else:
            key = (
                row[0],
                _parse_index(row[1], "row id", line_no),
                _parse_index(row[2], "column id", line_no),
            )
        if key in annotations:
            raise DuplicatePredictionError(
                f"{path}: duplicate key at line {line_no}: {key}"
            )
        annotations[key] = normalize_iri(row[-1], line_no)
    return annotations


def write_cta_csv(annotations: Sequence[ColumnAnnotation], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, quoting=csv.QUOTE_ALL)
        for a in sorted(annotations, key=lambda a: (a.table_id, a.col)):
            writer.writerow([a.table_id, a.col, ENTITY_IRI_PREFIX + a.class_id])


def write_cea_csv(annotations: Sequence[CellAnnotation], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, quoting=csv.QUOTE_ALL)
        for a in sorted(annotations, key=lambda a: (a.table_id, a.row, a.col)):
            writer.writerow(
                [a.table_id, a.row, a.col, ENTITY_IRI_PREFIX + a.entity_id]
            )
