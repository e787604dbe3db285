"""Fuzzy string scoring and spell correction for failed lookups.

``fuzzy_ratio`` is the 0-100 similarity used to validate corrections:
total matching-block length under the Ratcliff/Obershelp longest-match
recursion, scaled by the summed lengths. Both strings are case-folded
first: "St Peter's Seminarz" vs "St Peter's seminary" scores 95 folded
but only 89 case-sensitively, and the folded behavior is the intended
one. A correction is accepted only when its ratio strictly exceeds the
threshold (default 90).
"""

from __future__ import annotations

from dataclasses import dataclass
from difflib import SequenceMatcher
from fractions import Fraction
from typing import Iterable

from tabkg.errors import BackendUnavailable
from tabkg.kg_backend import KgBackend

DEFAULT_THRESHOLD = 90
MAX_EDIT_DISTANCE = 2
MAX_CORRECTION_LENGTH = 256

SOURCE_KG_SUGGEST = "kg-suggest"
SOURCE_EDIT_DISTANCE = "edit-distance"


def fuzzy_ratio(a: str, b: str) -> int:
    """Similarity of two strings as an integer in 0..100.

    Case-folds both sides, sums the Ratcliff/Obershelp matching blocks M,
    and returns round(200*M / (len(a) + len(b))) over the folded lengths,
    ties rounding to even. The folded pair is compared in a fixed
    (sorted) order so the score is symmetric. Two empty strings score 100.
    """
    fa, fb = a.casefold(), b.casefold()
    if fa == fb:
        return 100
    first, second = sorted((fa, fb))
    matcher = SequenceMatcher(None, first, second, autojunk=False)
    matched = sum(block.size for block in matcher.get_matching_blocks())
    return round(Fraction(200 * matched, len(fa) + len(fb)))


@dataclass(frozen=True)
class Correction:
    """A spelling suggestion that passed the fuzzy-ratio filter."""

    original: str
    suggestion: str
    ratio: int
    source: str


def edit_distance_at_most(a: str, b: str, k: int = MAX_EDIT_DISTANCE) -> bool:
    """True iff the Levenshtein distance between a and b is <= k."""
    if abs(len(a) - len(b)) > k:
        return False
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, 1):
        current = [i]
        row_min = i
        for j, ch_b in enumerate(b, 1):
            cost = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ch_a != ch_b),
            )
            current.append(cost)
            row_min = min(row_min, cost)
        if row_min > k:
            return False
        previous = current
    return previous[-1] <= k


class SpellChecker:
    """Suggests corrections from KG search results and a term dictionary.

    The dictionary is typically every label and alias of the snapshot in
    use (plus an optional wordlist); it stands in for an external spelling
    service, matching terms within edit distance 2, case-insensitively.
    """

    def __init__(
        self,
        dictionary: Iterable[str] = (),
        threshold: int = DEFAULT_THRESHOLD,
        search_limit: int = 10,
    ):
        if not 0 <= threshold <= 100:
            raise ValueError(f"threshold must be in 0..100, got {threshold}")
        self.threshold = threshold
        self.search_limit = search_limit
        folded: dict[str, str] = {}
        for term in dictionary:
            term = term.strip()
            if not term:
                continue
            key = term.casefold()
            if key not in folded or term < folded[key]:
                folded[key] = term
        self._terms = sorted(folded.items())

    def suggest(self, label: str, kg: KgBackend | None = None) -> list[Correction]:
        """Correction candidates for ``label``, best first.

        Pulls suggestions from (a) the labels of a KG search for the raw
        string and (b) dictionary terms within edit distance 2, scores
        each with ``fuzzy_ratio``, and keeps only ratios strictly above
        the threshold, sorted by ratio then suggestion. The label itself
        (up to case) is never suggested, and labels longer than 256
        characters are not corrected at all.
        """
        if not label:
            raise ValueError("label must be non-empty")
        if len(label) > MAX_CORRECTION_LENGTH:
            return []
        folded_label = label.casefold()
        sources: dict[str, tuple[str, str]] = {}

        if kg is not None:
            try:
                hits = kg.search_entities(label, limit=self.search_limit)
            except BackendUnavailable:
                hits = None
            if hits is not None:
                for record in hits.candidates:
                    key = record.label.casefold()
                    if key != folded_label:
                        sources.setdefault(key, (record.label, SOURCE_KG_SUGGEST))

        for key, term in self._terms:
            if key == folded_label:
                continue
            if edit_distance_at_most(folded_label, key):
                sources.setdefault(key, (term, SOURCE_EDIT_DISTANCE))

        corrections = []
        for suggestion, source in sources.values():
            ratio = fuzzy_ratio(label, suggestion)
            if ratio > self.threshold:
                corrections.append(
                    Correction(
                        original=label, suggestion=suggestion,
                        ratio=ratio, source=source,
                    )
                )
        corrections.sort(key=lambda c: (-c.ratio, c.suggestion))
        return corrections
