"""Brute-force reference answers obtained by enumerating a search space.

Only meant for small sentences; it certifies the charts and shares no code
with them beyond the validity predicates.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import Analysis, Mention, SearchSpace, WeightTable, validate_analysis
from .semiring import log_sum_exp

MAX_CANDIDATES = 24
MAX_SPANS = 28


class InstanceTooLargeError(ValueError):
    pass


def _spans(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n + 1)]


def enumerate_span_sets(space: SearchSpace | str, n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Every valid set of spans (one label each) in deterministic order.

    All three spaces are closed under taking subsets, so a branch is cut as
    soon as the partial set becomes invalid.
    """
    return _span_sets(SearchSpace(space), n)


@functools.lru_cache(maxsize=None)
def _span_sets(space: SearchSpace, n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    spans = _spans(n)
    if len(spans) > MAX_SPANS:
        raise InstanceTooLargeError(f"{len(spans)} candidate spans exceeds the limit of {MAX_SPANS}")
    found: list[tuple[tuple[int, int], ...]] = []

    def extend(start: int, chosen: list[tuple[int, int]]) -> None:
        found.append(tuple(chosen))
        for k in range(start, len(spans)):
            chosen.append(spans[k])
            if validate_analysis(Analysis(Mention(0, i, j) for i, j in chosen), n, space).valid:
                extend(k + 1, chosen)
            chosen.pop()

    extend(0, [])
    return tuple(found)


def enumerate_analyses(space: SearchSpace | str, n: int, num_labels: int,
                       max_candidates: int = MAX_CANDIDATES) -> list[Analysis]:
    """All analyses of the space, labelled, in deterministic order."""
    candidates = num_labels * n * (n + 1) // 2
    if candidates > max_candidates:
        raise InstanceTooLargeError(f"{candidates} candidate mentions exceeds the limit of {max_candidates}")
    out = []
    for spans in enumerate_span_sets(space, n):
        for labels in itertools.product(range(num_labels), repeat=len(spans)):
            out.append(Analysis(Mention(t, i, j) for t, (i, j) in zip(labels, spans)))
    return out


@dataclass(frozen=True)
class OracleResult:
    log_z: float
    map_score: float
    map_analysis: Analysis
    marginals: np.ndarray  # (|T|, n+1, n+1)
    count: int  # analyses with finite score


def oracle_inference(space: SearchSpace | str, weights: WeightTable) -> OracleResult:
    """logZ, MAP, marginals and support size by summing over the whole space.

    Labels are summed out span by span: the analyses sharing a span set ``S``
    contribute ``prod_{s in S} sum_t exp(w[t, s])``, so only span sets are
    enumerated.
    """
    n, num_labels = weights.n, weights.num_labels
    arr = weights.array
    span_sets = enumerate_span_sets(space, n)
    spans = _spans(n)
    col = {s: k for k, s in enumerate(spans)}

    per_span = [arr[:, i, j] for i, j in spans]
    span_lse = np.array([log_sum_exp(v) for v in per_span])
    span_max = np.array([v.max() for v in per_span])
    span_arg = [int(np.argmax(v)) for v in per_span]
    span_support = np.array([int(np.isfinite(v).sum()) for v in per_span])

    incidence = np.zeros((len(span_sets), len(spans)), dtype=bool)
    for r, s in enumerate(span_sets):
        for span in s:
            incidence[r, col[span]] = True

    def set_scores(values: np.ndarray) -> np.ndarray:
        finite = np.where(np.isfinite(values), values, 0.0)
        scores = incidence.astype(np.float64) @ finite
        dead = (incidence & ~np.isfinite(values)).any(axis=1)
        scores[dead] = -np.inf
        return scores

    lse_scores = set_scores(span_lse)
    log_z = log_sum_exp(lse_scores)

    max_scores = set_scores(span_max)
    best = int(np.argmax(max_scores))
    map_analysis = Analysis(Mention(span_arg[col[s]], *s) for s in span_sets[best])

    count = 0
    for s in span_sets:
        count += math.prod(int(span_support[col[x]]) for x in s)

    probs = np.zeros((num_labels, n + 1, n + 1))
    set_probs = np.exp(lse_scores - log_z)
    span_probs = incidence.T.astype(np.float64) @ set_probs
    for k, (i, j) in enumerate(spans):
        if span_lse[k] == -np.inf:
            continue
        probs[:, i, j] = span_probs[k] * np.exp(arr[:, i, j] - span_lse[k])
    return OracleResult(float(log_z), float(max_scores[best]), map_analysis, probs, count)


def iter_subsets(n: int, num_labels: int) -> Iterator[Analysis]:
    """Every subset of the candidate mentions, valid or not (bitmask order)."""
    cands = [Mention(t, i, j) for i, j in _spans(n) for t in range(num_labels)]
    if len(cands) > MAX_CANDIDATES:
        raise InstanceTooLargeError(f"{len(cands)} candidate mentions exceeds the limit of {MAX_CANDIDATES}")
    for mask in range(1 << len(cands)):
        yield Analysis(c for b, c in enumerate(cands) if mask >> b & 1)
