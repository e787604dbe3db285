from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_fuzzy_ratio
from tabkg.errors import BackendUnavailable
from tabkg.kg_backend import SnapshotBackend
from tabkg.spellcheck import (
    SOURCE_EDIT_DISTANCE,
    SOURCE_KG_SUGGEST,
    SpellChecker,
    edit_distance_at_most,
    fuzzy_ratio,
)
from conftest import make_record

PAPER_PAIR = ("St Peter's Seminarz", "St Peter's seminary")

words = st.text(alphabet="abcde upqr", max_size=30)


class TestFuzzyRatio:
    def test_seminary_pair_scores_95(self):
        assert fuzzy_ratio(*PAPER_PAIR) == 95

    def test_identical_strings_score_100(self):
        assert fuzzy_ratio("abc", "abc") == 100

    def test_disjoint_strings_score_0(self):
        assert oracle_fuzzy_ratio("abcd", "wxyz") == 0
        assert fuzzy_ratio("abcd", "wxyz") == 0

    def test_both_empty_score_100(self):
        assert fuzzy_ratio("", "") == 100

    def test_one_empty_scores_0(self):
        assert fuzzy_ratio("", "abc") == 0

    def test_case_folding_is_applied(self):
        assert fuzzy_ratio("CANADA", "canada") == 100

    @given(words, words)
    def test_matches_brute_force_oracle(self, a, b):
        assert fuzzy_ratio(a, b) == oracle_fuzzy_ratio(a, b)

    @given(st.text(max_size=25), st.text(max_size=25))
    def test_symmetry(self, a, b):
        assert fuzzy_ratio(a, b) == fuzzy_ratio(b, a)

    @given(st.text(min_size=1, max_size=25))
    def test_reflexivity(self, a):
        assert fuzzy_ratio(a, a) == 100

    @given(st.text(max_size=25), st.text(max_size=25))
    def test_bounds(self, a, b):
        assert 0 <= fuzzy_ratio(a, b) <= 100


class TestEditDistance:
    @pytest.mark.parametrize(
        "a,b,k,expected",
        [
            ("sundre", "sundre", 2, True),
            ("sundr", "sundre", 2, True),
            ("sundte", "sundre", 2, True),
            ("snudre", "sundre", 2, True),  # transposition = 2 plain edits
            ("sun", "sundre", 2, False),
            ("peace river", "peace rivers", 2, True),
            ("abcdef", "xbcdxf", 2, True),
            ("abcdef", "xxcdxf", 2, False),
            ("", "ab", 2, True),
            ("", "abc", 2, False),
        ],
    )
    def test_known_distances(self, a, b, k, expected):
        assert edit_distance_at_most(a, b, k) is expected

    @given(st.text(alphabet="abc", max_size=8), st.text(alphabet="abc", max_size=8))
    def test_symmetry(self, a, b):
        assert edit_distance_at_most(a, b) == edit_distance_at_most(b, a)


class TestSuggest:
    def test_seminary_example_from_snapshot(self, snapshot, spell):
        corrections = spell.suggest("St Peter's Seminarz", snapshot)
        assert len(corrections) == 1
        assert corrections[0].suggestion == "St Peter's seminary"
        assert corrections[0].ratio == 95

    def test_dictionary_typo_correction(self, spell, snapshot):
        corrections = spell.suggest("town in clberta", snapshot)
        assert corrections
        best = corrections[0]
        assert best.suggestion == "town in Alberta"
        assert best.ratio == oracle_fuzzy_ratio("town in clberta", "town in Alberta")
        assert best.ratio > 90

    def test_no_near_neighbors_yields_nothing(self, spell, snapshot):
        assert spell.suggest("zzzzzz", snapshot) == []

    def test_ratio_exactly_at_threshold_is_rejected(self):
        # edit distance 1, but the fuzzy ratio lands exactly on 90
        checker = SpellChecker(["Vegreville"])
        assert fuzzy_ratio("Vegrevillx", "Vegreville") == 90
        assert checker.suggest("Vegrevillx") == []

    def test_long_strings_are_not_corrected(self, spell):
        assert spell.suggest("x" * 257) == []

    def test_empty_label_rejected(self, spell):
        with pytest.raises(ValueError):
            spell.suggest("")

    def test_label_itself_is_never_suggested(self):
        checker = SpellChecker(["Sundre"])
        assert checker.suggest("sundre") == []

    def test_backend_failure_degrades_to_dictionary(self):
        class DownBackend:
            def search_entities(self, query, limit=10):
                raise BackendUnavailable("down")

        checker = SpellChecker(["Grande Prairie"])
        corrections = checker.suggest("Grande Prairi", DownBackend())
        assert [c.suggestion for c in corrections] == ["Grande Prairie"]
        assert corrections[0].source == SOURCE_EDIT_DISTANCE

    def test_kg_labels_are_suggested(self):
        backend = SnapshotBackend([make_record("Q5", "Sundre")])

        class FuzzyFacade:
            # stands in for a backend whose search is fuzzy enough to hit
            def search_entities(self, query, limit=10):
                return backend.search_entities("Sundre", limit)

        checker = SpellChecker([])
        corrections = checker.suggest("Sundr", FuzzyFacade())
        assert [c.suggestion for c in corrections] == ["Sundre"]
        assert corrections[0].source == SOURCE_KG_SUGGEST

    def test_results_sorted_by_ratio_then_suggestion(self):
        checker = SpellChecker(["Peace Riverz", "Peace Rivera", "Peace River"])
        corrections = checker.suggest("Peace River!")
        ratios = [c.ratio for c in corrections]
        assert ratios == sorted(ratios, reverse=True)
        for earlier, later in zip(corrections, corrections[1:]):
            if earlier.ratio == later.ratio:
                assert earlier.suggestion < later.suggestion

    @settings(max_examples=50)
    @given(
        st.lists(st.text(alphabet="abcdef", min_size=1, max_size=12), max_size=12),
        st.text(alphabet="abcdef", min_size=1, max_size=12),
    )
    def test_every_correction_clears_threshold(self, dictionary, label):
        checker = SpellChecker(dictionary)
        for correction in checker.suggest(label):
            assert correction.ratio > checker.threshold
            assert correction.ratio == fuzzy_ratio(label, correction.suggestion)
