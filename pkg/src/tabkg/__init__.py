"""Table-to-knowledge-graph annotation: CTA and CEA over CSV corpora."""

from tabkg.cea import CellAnnotation, annotate_table_cea, prop_lookup, resolve_head_entity
from tabkg.cta import ColumnAnnotation, annotate_column, annotate_table_cta, resolve_cell_unambiguous
from tabkg.evaluator import ScoreReport, score
from tabkg.kg_backend import (
    CandidateSet,
    ClaimValue,
    EntityRecord,
    KgBackend,
    SnapshotBackend,
    WikidataBackend,
)
from tabkg.lookup_cache import CachedBackend, CacheStore
from tabkg.spellcheck import Correction, SpellChecker, fuzzy_ratio
from tabkg.table_io import CellValue, ColumnContext, RowContext, Table, column_context, load_table, normalize_cell, row_context

__version__ = "0.1.0"

__all__ = [
    "CandidateSet",
    "CachedBackend",
    "CacheStore",
    "CellAnnotation",
    "CellValue",
    "ClaimValue",
    "ColumnAnnotation",
    "ColumnContext",
    "Correction",
    "EntityRecord",
    "KgBackend",
    "RowContext",
    "ScoreReport",
    "SnapshotBackend",
    "SpellChecker",
    "Table",
    "WikidataBackend",
    "annotate_column",
    "annotate_table_cea",
    "annotate_table_cta",
    "column_context",
    "fuzzy_ratio",
    "load_table",
    "normalize_cell",
    "prop_lookup",
    "resolve_cell_unambiguous",
    "resolve_head_entity",
    "row_context",
    "score",
]
