"""CSV table loading, cell normalization, and row/column context views.

Tables are plain rectangular grids of normalized strings. The first file
row is data like any other; which cells get annotated is decided by the
target files, never by header heuristics.
"""

from __future__ import annotations

import csv
import io
import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from tabkg.errors import EmptyTableError

_WS_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class CellValue:
    """One cell: the raw string as read plus its normalized form.

    ``text`` is None exactly when the normalized form is empty (a missing
    value); otherwise it is trimmed, with whitespace runs collapsed and
    control characters removed.
    """

    raw: str
    text: str | None

    @property
    def is_missing(self) -> bool:
        return self.text is None


@dataclass(frozen=True)
class Table:
    """A rectangular grid of cells with 0-based (row, col) indexing."""

    table_id: str
    cells: tuple[tuple[CellValue, ...], ...]

    def __post_init__(self):
        if not self.table_id or "/" in self.table_id or "\\" in self.table_id:
            raise ValueError(f"bad table_id: {self.table_id!r}")

    @property
    def n_rows(self) -> int:
        return len(self.cells)

    @property
    def n_cols(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def cell(self, row: int, col: int) -> CellValue:
        return self.cells[row][col]


@dataclass(frozen=True)
class ColumnContext:
    """The non-missing values of one column, in row order."""

    table_id: str
    col: int
    items: tuple[str, ...]


@dataclass(frozen=True)
class RowContext:
    """All cells of one row, missing ones included, in column order."""

    table_id: str
    row: int
    items: tuple[CellValue, ...]


def normalize_cell(raw: str) -> CellValue:
    """Normalize a raw cell string.

    Non-whitespace control characters are dropped, whitespace runs
    collapse to a single space, and the result is trimmed. An empty
    result means the cell is missing. Total: never raises.
    """
    kept = "".join(
        ch for ch in raw
        if ch.isspace() or unicodedata.category(ch) != "Cc"
    )
    text = _WS_RUN.sub(" ", kept).strip()
    return CellValue(raw=raw, text=text or None)


def load_table(path: str | Path) -> Table:
    """Load one comma-separated file as a Table.

    Decoding is UTF-8 with invalid sequences replaced (and a leading BOM
    dropped), so noisy files never abort a run. Ragged rows are padded
    with missing cells up to the widest row. Raises EmptyTableError when
    nothing but blank lines is found, OSError when the file is unreadable.
    """
    path = Path(path)
    decoded = path.read_bytes().decode("utf-8-sig", errors="replace")
    rows = [row for row in csv.reader(io.StringIO(decoded)) if row]
    if not rows:
        raise EmptyTableError(f"{path.name}: no rows after parsing")
    n_cols = max(len(row) for row in rows)
    cells = tuple(
        tuple(normalize_cell(row[i]) if i < len(row) else normalize_cell("")
              for i in range(n_cols))
        for row in rows
    )
    return Table(table_id=path.stem, cells=cells)


def column_context(table: Table, col: int) -> ColumnContext:
    """Collect the Text cells of one column, top to bottom."""
    if not 0 <= col < table.n_cols:
        raise IndexError(f"column {col} out of range for {table.table_id}")
    items = tuple(
        row[col].text for row in table.cells if row[col].text is not None
    )
    return ColumnContext(table_id=table.table_id, col=col, items=items)


def row_context(table: Table, row: int) -> RowContext:
    """Return one full row, preserving missing cells and column order."""
    if not 0 <= row < table.n_rows:
        raise IndexError(f"row {row} out of range for {table.table_id}")
    return RowContext(table_id=table.table_id, row=row, items=table.cells[row])
