"""MAP, log-partition, marginals, counts and the CRF loss for each algorithm."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .core import (Analysis, InvalidAnalysisError, LabelSet, Mention, WeightTable,
                   validate_analysis)
from .deduction import Algorithm, inside, outside
from .semiring import COUNTING, LOG_REAL


@dataclass(frozen=True)
class MarginalTable:
    """``probabilities[t, i, j] = p(<t, i, j> in y | w)``; cells with ``i >= j`` are 0."""

    n: int
    labels: LabelSet
    probabilities: np.ndarray

    def __getitem__(self, m: Mention) -> float:
        return float(self.probabilities[m.label, m.left, m.right])

    def items(self) -> Iterator[tuple[Mention, float]]:
        for i in range(self.n):
            for j in range(i + 1, self.n + 1):
                for t in range(len(self.labels)):
                    yield Mention(t, i, j), float(self.probabilities[t, i, j])

    def expected_count(self) -> float:
        return float(self.probabilities.sum())


def log_partition(alg: Algorithm | str, weights: WeightTable) -> float:
    return float(inside(alg, weights, LOG_REAL).goal)


def map_inference(alg: Algorithm | str, weights: WeightTable) -> tuple[float, Analysis]:
    """Best analysis and its score, without materialising the derivation."""
    from ._kernels import run_map

    score, rows = run_map(Algorithm(alg), weights.by_width)
    rows = rows[np.lexsort((rows[:, 0], rows[:, 2], rows[:, 1]))]
    return float(score), Analysis.from_sorted(map(Mention._make, rows.tolist()))


def marginals(alg: Algorithm | str, weights: WeightTable) -> MarginalTable:
    alg = Algorithm(alg)
    ins = inside(alg, weights, LOG_REAL)
    out = outside(alg, weights, ins)
    log_z = ins.goal
    n, num_labels = weights.n, weights.num_labels
    probs = np.zeros((num_labels, n + 1, n + 1))
    for t in range(num_labels):
        for i in range(n):
            for j in range(i + 1, n + 1):
                probs[t, i, j] = math.exp(ins.mentions[t][i][j] + out.mentions[t][i][j] - log_z)
    return MarginalTable(n, weights.labels, probs)


def count_analyses(alg: Algorithm | str, n: int, num_labels: int) -> int:
    """Size of the algorithm's search space (one derivation per analysis)."""
    if n < 0:
        raise ValueError("sentence length must be non-negative")
    weights = WeightTable.constant(n, LabelSet.generic(num_labels))
    return inside(alg, weights, COUNTING).goal


def nll_loss(alg: Algorithm | str, weights: WeightTable, gold: Analysis | Iterable[Mention]) -> float:
    """Negative log-likelihood ``-w.y + log Z(w)`` of a gold analysis."""
    alg = Algorithm(alg)
    gold = gold if isinstance(gold, Analysis) else Analysis(gold)
    report = validate_analysis(gold, weights.n, alg.space)
    if not report.valid:
        raise InvalidAnalysisError(report)
    return -weights.score(gold) + log_partition(alg, weights)
