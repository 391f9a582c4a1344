"""Semirings the chart engine is parameterized by."""

from __future__ import annotations

import math
from functools import reduce
from typing import Iterable

UINT64_MAX = 2**64 - 1


class NumericDomainError(ValueError):
    """NaN or +inf where an extended log-space real was expected."""


class CountingOverflowError(ArithmeticError):
    """A derivation count no longer fits in an unsigned 64-bit integer."""


def log_sum_exp(values: Iterable[float]) -> float:
    """``log(sum(exp(v)))`` with max-shift stabilization; empty input gives ``-inf``."""
    vals = [float(v) for v in values]
    for v in vals:
        if math.isnan(v) or v == math.inf:
            raise NumericDomainError(f"log_sum_exp got {v!r}")
    if not vals:
        return -math.inf
    top = max(vals)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in vals))


class Semiring:
    name = "semiring"
    zero: object
    one: object
    # whether ⊕ selects one operand, so the engine can keep backpointers
    selective = False

    def plus(self, a, b):
        raise NotImplementedError

    def times(self, a, b):
        raise NotImplementedError

    def lift(self, weight: float):
        raise NotImplementedError

    def sum(self, values: Iterable):
        return reduce(self.plus, values, self.zero)

    def product(self, values: Iterable):
        return reduce(self.times, values, self.one)

    def __repr__(self) -> str:
        return f"<{self.name} semiring>"


class LogReal(Semiring):
    """Log-space reals: ⊕ is log-sum-exp, ⊗ is addition. Computes log Z."""

    name = "log-real"
    zero = -math.inf
    one = 0.0

    def plus(self, a: float, b: float) -> float:
        return log_sum_exp((a, b))

    def times(self, a: float, b: float) -> float:
        return a + b

    def lift(self, weight: float) -> float:
        return float(weight)

    def sum(self, values: Iterable[float]) -> float:
        return log_sum_exp(values)


class MaxTropical(Semiring):
    """Max-plus: ⊕ is max, ⊗ is addition. Computes the best derivation score."""

    name = "max-tropical"
    zero = -math.inf
    one = 0.0
    selective = True

    def plus(self, a: float, b: float) -> float:
        return a if a >= b else b

    def times(self, a: float, b: float) -> float:
        return a + b

    def lift(self, weight: float) -> float:
        return float(weight)


class Counting(Semiring):
    """Derivation counts in checked unsigned 64-bit arithmetic.

    A forbidden mention (weight ``-inf``) lifts to 0 so counts cover the
    support of the distribution.
    """

    name = "counting"
    zero = 0
    one = 1

    def _check(self, value: int) -> int:
        if value > UINT64_MAX:
            raise CountingOverflowError("derivation count exceeds 2**64 - 1")
        return value

    def plus(self, a: int, b: int) -> int:
        return self._check(a + b)

    def times(self, a: int, b: int) -> int:
        return self._check(a * b)

    def lift(self, weight: float) -> int:
        return 0 if weight == -math.inf else 1


LOG_REAL = LogReal()
MAX_TROPICAL = MaxTropical()
COUNTING = Counting()
