import math

import numpy as np
import pytest

from nerchart import (Analysis, InvalidAnalysisError, LabelSet, Mention, MentionRangeError,
                      SearchSpace, WeightTable, children_of, is_inside, validate_analysis)

from conftest import GPE, LABELS, PER, SENTENCES

X = 0
NESTED_TRIPLE = Analysis([Mention(X, 0, 4), Mention(X, 0, 2), Mention(X, 2, 4)])


class TestLabelSet:
    def test_order_and_lookup(self):
        labels = LabelSet(["PER", "GPE"])
        assert list(labels) == ["PER", "GPE"]
        assert labels.index("GPE") == 1
        assert labels[0] == "PER"
        assert len(labels) == 2

    @pytest.mark.parametrize("bad", [[], ["A", "A"], ["→"], ["↔"], [""]])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            LabelSet(bad)

    def test_unknown_label(self):
        with pytest.raises(KeyError):
            LABELS.index("LOC")

    def test_generic(self):
        assert list(LabelSet.generic(3)) == ["L0", "L1", "L2"]


class TestAnalysis:
    def test_canonical_order_and_dedup(self):
        a = Analysis([(0, 2, 8), (0, 0, 1), (1, 2, 8), (0, 0, 1)])
        assert a.mentions == (Mention(0, 0, 1), Mention(0, 2, 8), Mention(1, 2, 8))
        assert a == Analysis(reversed(a.mentions))
        assert hash(a) == hash(Analysis(a.mentions))

    def test_from_sorted_matches_constructor(self):
        a = SENTENCES[2][1]
        assert Analysis.from_sorted(a.mentions) == a
        assert Analysis.from_sorted(a.mentions).mentions == a.mentions

    def test_format(self):
        a = Analysis([Mention(PER, 0, 1)])
        assert a.format(LABELS) == "{<PER, 0, 1>}"


class TestInside:
    @pytest.mark.parametrize("inner, outer, expected", [
        ((1, 2), (0, 2), True),
        ((0, 2), (0, 2), False),
        ((0, 1), (0, 2), True),
        ((1, 3), (0, 2), False),
        ((0, 2), (1, 2), False),
        ((5, 6), (4, 6), True),
    ])
    def test_pairs(self, inner, outer, expected):
        assert is_inside(inner, outer) is expected

    def test_accepts_mentions(self):
        assert is_inside(Mention(GPE, 5, 6), Mention(GPE, 4, 6))


class TestValidation:
    def test_sentence_two_nested(self):
        n, gold = SENTENCES[2]
        assert validate_analysis(gold, n, SearchSpace.NESTED).valid
        assert validate_analysis(gold, n, SearchSpace.RESTRICTED_NESTED).valid
        assert not validate_analysis(gold, n, SearchSpace.NON_NESTED).valid

    def test_sentence_one_everywhere(self):
        n, gold = SENTENCES[1]
        for space in SearchSpace:
            assert validate_analysis(gold, n, space).valid

    def test_identical_spans_invalid(self):
        a = Analysis([Mention(0, 0, 2), Mention(1, 0, 2)])
        for space in SearchSpace:
            report = validate_analysis(a, 2, space)
            assert not report.valid
            assert report.conflicts == [(Mention(0, 0, 2), Mention(1, 0, 2))]

    def test_partial_overlap_invalid_when_nested(self):
        a = Analysis([Mention(0, 0, 2), Mention(0, 1, 3)])
        assert not validate_analysis(a, 3, "nested").valid

    def test_two_long_children(self):
        assert validate_analysis(NESTED_TRIPLE, 4, SearchSpace.NESTED).valid
        report = validate_analysis(NESTED_TRIPLE, 4, SearchSpace.RESTRICTED_NESTED)
        assert not report.valid
        assert report.overfull == [Mention(X, 0, 4)]
        assert "more than one child" in report.describe()

    def test_top_level_is_unrestricted(self):
        # two long first-level mentions side by side are fine
        a = Analysis([Mention(0, 0, 2), Mention(0, 2, 4)])
        assert validate_analysis(a, 4, SearchSpace.RESTRICTED_NESTED).valid

    def test_range_error_names_mention(self):
        with pytest.raises(MentionRangeError, match=r"\(0, 3, 9\)"):
            validate_analysis(Analysis([Mention(0, 3, 9)]), 8, "nested")

    def test_empty_sentence(self):
        for space in SearchSpace:
            assert validate_analysis(Analysis(), 0, space).valid

    def test_invalid_error_carries_report(self):
        report = validate_analysis(NESTED_TRIPLE, 4, "restricted")
        err = InvalidAnalysisError(report)
        assert err.report is report and "invalid under restricted" in str(err)


class TestChildren:
    def test_sentence_two(self):
        _, gold = SENTENCES[2]
        assert children_of(Mention(PER, 2, 8), gold) == {Mention(PER, 2, 3), Mention(PER, 5, 6)}

    def test_grandchild_excluded(self):
        _, gold = SENTENCES[4]
        assert children_of(Mention(PER, 2, 6), gold) == {Mention(GPE, 4, 6)}

    def test_single_mention(self):
        a = Analysis([Mention(0, 1, 3)])
        assert children_of(Mention(0, 1, 3), a) == set()

    def test_not_member(self):
        with pytest.raises(ValueError):
            children_of(Mention(0, 0, 1), Analysis())


class TestWeightTable:
    def test_lower_triangle_and_read_only(self):
        w = WeightTable.constant(3, ["A"], 0.5)
        assert w.array[0, 2, 1] == -math.inf and w.array[0, 1, 1] == -math.inf
        assert w.array[0, 1, 2] == 0.5
        with pytest.raises(ValueError):
            w.array[0, 0, 1] = 1.0

    @pytest.mark.parametrize("bad", [math.nan, math.inf])
    def test_rejects_non_finite(self, bad):
        arr = np.zeros((1, 3, 3))
        arr[0, 0, 2] = bad
        with pytest.raises(ValueError):
            WeightTable(2, ["A"], arr)

    def test_negative_infinity_allowed(self):
        arr = np.zeros((1, 3, 3))
        arr[0, 0, 2] = -math.inf
        assert WeightTable(2, ["A"], arr).weight(Mention(0, 0, 2)) == -math.inf

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            WeightTable(2, ["A", "B"], np.zeros((1, 3, 3)))

    def test_indicator_and_score(self):
        n, gold = SENTENCES[3]
        w = WeightTable.indicator(n, LABELS, gold)
        assert w.score(gold) == 3.0
        assert w.weight(Mention(PER, 1, 2)) == -1.0

    def test_replace_is_copy(self):
        w = WeightTable.constant(2, ["A"])
        w2 = w.replace(Mention(0, 0, 1), 4.0)
        assert w.weight(Mention(0, 0, 1)) == 0.0 and w2.weight(Mention(0, 0, 1)) == 4.0

    def test_by_width_layout(self):
        rng = np.random.default_rng(3)
        w = WeightTable.random(5, LabelSet.generic(2), rng)
        bw = w.by_width
        for m in w.candidates():
            assert bw[m.length, m.left, m.label] == w.weight(m)
        assert w.by_width is bw

    def test_candidates(self):
        w = WeightTable.constant(3, LabelSet.generic(2))
        cands = list(w.candidates())
        assert len(cands) == 2 * 6
        assert cands == sorted(cands, key=Mention.sort_key)
