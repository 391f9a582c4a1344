import math

import numpy as np
import pytest

from nerchart import (Analysis, InstanceTooLargeError, Mention, SearchSpace, WeightTable,
                      enumerate_analyses, oracle_inference, validate_analysis)
from nerchart.oracle import enumerate_span_sets, iter_subsets

from conftest import random_weights

NON, NESTED, RESTRICTED = SearchSpace.NON_NESTED, SearchSpace.NESTED, SearchSpace.RESTRICTED_NESTED


def brute_force(space, n, num_labels):
    """Filter every subset of candidate mentions; the slowest, most literal definition."""
    return [a for a in iter_subsets(n, num_labels) if validate_analysis(a, n, space).valid]


def test_small_sizes():
    assert len(enumerate_analyses(NON, 2, 1)) == 5
    assert len(enumerate_analyses(NESTED, 2, 1)) == 8
    for space in SearchSpace:
        assert enumerate_analyses(space, 0, 2) == [Analysis()]


@pytest.mark.parametrize("space", list(SearchSpace))
@pytest.mark.parametrize("n, num_labels", [(1, 1), (2, 2), (3, 1), (3, 2), (4, 1)])
def test_enumeration_equals_subset_filter(space, n, num_labels):
    got = enumerate_analyses(space, n, num_labels)
    assert len(set(got)) == len(got)
    assert set(got) == set(brute_force(space, n, num_labels))


def test_space_inclusion():
    for n in range(6):
        y1, y3, y2 = (set(enumerate_span_sets(s, n)) for s in (NON, RESTRICTED, NESTED))
        assert y1 <= y3 <= y2
        if n <= 3:
            assert y3 == y2
    assert len(enumerate_span_sets(RESTRICTED, 4)) < len(enumerate_span_sets(NESTED, 4))


def test_guard():
    with pytest.raises(InstanceTooLargeError):
        enumerate_analyses(NESTED, 7, 1)
    with pytest.raises(InstanceTooLargeError):
        list(iter_subsets(4, 3))


def test_one_word():
    res = oracle_inference(NON, WeightTable.constant(1, ["A"]))
    assert res.log_z == pytest.approx(math.log(2))
    assert res.count == 2
    assert res.marginals[0, 0, 1] == pytest.approx(0.5)


@pytest.mark.parametrize("space", list(SearchSpace))
@pytest.mark.parametrize("seed", range(4))
def test_factorised_oracle_matches_explicit_sum(space, seed):
    n, num_labels = 3, 2
    w = random_weights(n, num_labels, seed)
    analyses = enumerate_analyses(space, n, num_labels)
    scores = np.array([w.score(a) for a in analyses])
    log_z = math.log(math.fsum(np.exp(scores)))
    res = oracle_inference(space, w)
    assert res.log_z == pytest.approx(log_z, abs=1e-12)
    assert res.map_score == pytest.approx(scores.max(), abs=1e-12)
    assert w.score(res.map_analysis) == pytest.approx(scores.max(), abs=1e-12)
    assert res.count == len(analyses)
    probs = np.exp(scores - log_z)
    for m in w.candidates():
        expected = sum(p for p, a in zip(probs, analyses) if m in a)
        assert res.marginals[m.label, m.left, m.right] == pytest.approx(expected, abs=1e-12)


def test_forbidden_mention_excluded_from_count():
    w = WeightTable.constant(3, ["A"]).replace(Mention(0, 0, 2), -math.inf)
    res = oracle_inference(NESTED, w)
    expected = sum(1 for a in enumerate_analyses(NESTED, 3, 1) if Mention(0, 0, 2) not in a)
    assert res.count == expected
    assert res.marginals[0, 0, 2] == 0.0
