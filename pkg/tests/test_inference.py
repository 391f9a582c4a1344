import math

import numpy as np
import pytest

from nerchart import (Algorithm, Analysis, InvalidAnalysisError, Mention, SearchSpace,
                      WeightTable, count_analyses, log_partition, map_inference, marginals, nll_loss,
                      oracle_inference, validate_analysis, viterbi_decode)

from conftest import SENTENCES, indicator, random_weights

SM, CYK, QUAD = Algorithm.SEMI_MARKOV, Algorithm.CYK, Algorithm.QUADRATIC
TRIPLE = Analysis([Mention(0, 0, 4), Mention(0, 0, 2), Mention(0, 2, 4)])


def test_log_partition_small():
    assert log_partition(SM, WeightTable.constant(1, ["A"])) == pytest.approx(math.log(2), abs=1e-15)
    assert log_partition(CYK, WeightTable.constant(2, ["A"])) == pytest.approx(math.log(8), abs=1e-14)


@pytest.mark.parametrize("alg", list(Algorithm))
@pytest.mark.parametrize("seed", range(10))
def test_log_partition_matches_oracle(alg, seed):
    w = random_weights(5, 2, seed)
    assert log_partition(alg, w) == pytest.approx(oracle_inference(alg.space, w).log_z, abs=1e-9)


class TestMap:
    def test_sentence_one(self):
        assert map_inference(SM, indicator(1)) == (2.0, SENTENCES[1][1])

    def test_sentence_three(self):
        assert map_inference(QUAD, indicator(3)) == (3.0, SENTENCES[3][1])

    @pytest.mark.parametrize("alg", list(Algorithm))
    def test_agrees_with_viterbi_decode(self, alg):
        for seed in range(5):
            w = random_weights(20, 3, seed)
            d = viterbi_decode(alg, w)
            score, analysis = map_inference(alg, w)
            assert score == d.score and analysis == d.analysis
            assert analysis.mentions == d.analysis.mentions
            assert validate_analysis(analysis, 20, alg.space).valid
            assert w.score(analysis) == pytest.approx(score, abs=1e-9)


class TestMarginals:
    def test_one_word(self):
        table = marginals(SM, WeightTable.constant(1, ["A"]))
        assert table[Mention(0, 0, 1)] == pytest.approx(0.5)

    def test_forbidden_mention(self):
        w = random_weights(4, 2, 1).replace(Mention(1, 1, 3), -math.inf)
        for alg in Algorithm:
            assert marginals(alg, w)[Mention(1, 1, 3)] == 0.0

    @pytest.mark.parametrize("alg", list(Algorithm))
    def test_expected_count_matches_oracle(self, alg):
        for seed in range(3):
            w = random_weights(5, 2, seed)
            assert marginals(alg, w).expected_count() == pytest.approx(
                oracle_inference(alg.space, w).marginals.sum(), abs=1e-8)

    @pytest.mark.parametrize("alg", list(Algorithm))
    def test_gradient_of_log_partition(self, alg):
        w = random_weights(4, 2, 7)
        table = marginals(alg, w)
        h = 1e-5
        for m in w.candidates():
            up = log_partition(alg, w.replace(m, w.weight(m) + h))
            down = log_partition(alg, w.replace(m, w.weight(m) - h))
            assert (up - down) / (2 * h) == pytest.approx(table[m], rel=1e-4, abs=1e-10)

    @pytest.mark.parametrize("alg", list(Algorithm))
    def test_monotone_in_own_weight(self, alg):
        rng = np.random.default_rng(11)
        w = random_weights(4, 2, 11)
        cands = list(w.candidates())
        for k in rng.choice(len(cands), size=6, replace=False):
            m = cands[k]
            before = marginals(alg, w)[m]
            after = marginals(alg, w.replace(m, w.weight(m) + 0.5))[m]
            assert after >= before

    def test_items_cover_candidates(self):
        table = marginals(QUAD, random_weights(3, 2, 0))
        assert [m for m, _ in table.items()] == list(random_weights(3, 2, 0).candidates())


class TestCounts:
    def test_values(self):
        assert count_analyses(SM, 3, 1) == 13
        assert count_analyses(CYK, 3, 1) == 48
        assert count_analyses(QUAD, 4, 1) < count_analyses(CYK, 4, 1)
        for alg in Algorithm:
            assert count_analyses(alg, 0, 3) == 1

    def test_semi_markov_recurrence(self):
        for labels in (1, 2, 3):
            counts = [1]
            for j in range(1, 10):
                counts.append(counts[-1] + labels * sum(counts))
            assert count_analyses(SM, 9, labels) == counts[-1]

    def test_negative_length(self):
        with pytest.raises(ValueError):
            count_analyses(SM, -1, 1)


class TestLoss:
    def test_one_word(self):
        w = WeightTable.constant(1, ["A"])
        assert nll_loss(SM, w, Analysis()) == pytest.approx(math.log(2))
        assert nll_loss(SM, w, [Mention(0, 0, 1)]) == pytest.approx(math.log(2))

    def test_gold_outside_space(self):
        w = WeightTable.constant(4, ["X"])
        assert nll_loss(CYK, w, TRIPLE) > 0
        with pytest.raises(InvalidAnalysisError) as exc:
            nll_loss(QUAD, w, TRIPLE)
        assert exc.value.report.space is SearchSpace.RESTRICTED_NESTED
        assert exc.value.report.overfull

    @pytest.mark.parametrize("alg", list(Algorithm))
    def test_non_negative(self, alg):
        w = random_weights(6, 3, 2)
        _, best = map_inference(alg, w)
        assert nll_loss(alg, w, best) >= 0
