"""MAP decoding time per sentence as a function of sentence length."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .core import LabelSet, WeightTable
from .deduction import Algorithm
from .inference import map_inference


@dataclass(frozen=True)
class BenchConfig:
    lengths: Sequence[int]
    repetitions: int = 5
    num_labels: int = 7
    seed: int = 0
    algorithms: Sequence[Algorithm] = field(default_factory=lambda: tuple(Algorithm))

    def __post_init__(self):
        lengths = tuple(int(n) for n in self.lengths)
        if list(lengths) != sorted(lengths) or any(n < 0 for n in lengths):
            raise ValueError("lengths must be non-negative and sorted ascending")
        if self.repetitions < 3:
            raise ValueError("at least 3 repetitions are required")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "algorithms", tuple(Algorithm(a) for a in self.algorithms))


class BenchRow(NamedTuple):
    algorithm: Algorithm
    n: int
    seconds: float


def run_bench(cfg: BenchConfig) -> list[BenchRow]:
    """Median wall time of ``map_inference`` per (algorithm, length).

    One discarded warm-up call precedes the timed repetitions. Weights are
    drawn, and their span-major layout built, before timing starts.
    """
    rng = np.random.default_rng(cfg.seed)
    labels = LabelSet.generic(cfg.num_labels)
    rows = []
    for alg in cfg.algorithms:
        for n in cfg.lengths:
            tables = [WeightTable.random(n, labels, rng) for _ in range(cfg.repetitions + 1)]
            for weights in tables:
                weights.by_width
            map_inference(alg, tables[0])
            samples = []
            for weights in tables[1:]:
                start = time.perf_counter()
                map_inference(alg, weights)
                samples.append(time.perf_counter() - start)
            rows.append(BenchRow(alg, n, statistics.median(samples)))
    return rows


def format_rows(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algorithm", "n", "seconds_per_sentence"])
    for row in rows:
        writer.writerow([Algorithm(row.algorithm).value, row.n, repr(float(row.seconds))])
    return buf.getvalue()


def fit_loglog_slope(rows: Iterable[BenchRow], algorithm: Algorithm | str) -> float:
    """Least-squares slope of log(seconds) against log(n)."""
    algorithm = Algorithm(algorithm)
    pts = [(r.n, r.seconds) for r in rows if Algorithm(r.algorithm) is algorithm]
    if len({n for n, _ in pts}) < 3:
        raise ValueError(f"need at least 3 distinct lengths for {algorithm.value}")
    if any(n <= 0 or s <= 0 for n, s in pts):
        raise ValueError("lengths and times must be positive to take logarithms")
    x = np.log([n for n, _ in pts])
    y = np.log([s for _, s in pts])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
