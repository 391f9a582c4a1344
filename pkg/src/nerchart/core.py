"""Mentions, analyses, weights and the three search-space predicates.

Spans use fencepost coordinates: ``(i, j)`` with ``0 <= i < j <= n`` covers
words ``i+1 .. j`` of an ``n``-word sentence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

# Item-kind markers used by the deduction systems; never valid label names.
RESERVED_MARKERS = frozenset({"→", "↦", "↔", "↤"})


class MentionRangeError(ValueError):
    """A mention does not fit inside the sentence."""


class InvalidAnalysisError(ValueError):
    """An analysis is outside the requested search space."""

    def __init__(self, report: "ValidityReport"):
        self.report = report
        super().__init__(report.describe())


class SearchSpace(str, enum.Enum):
    NON_NESTED = "non-nested"
    NESTED = "nested"
    RESTRICTED_NESTED = "restricted"


@dataclass(frozen=True)
class LabelSet:
    """Ordered set of mention types."""

    labels: tuple[str, ...]

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValueError("a label set needs at least one label")
        for label in labels:
            if not isinstance(label, str) or not label:
                raise ValueError(f"labels must be non-empty strings, got {label!r}")
            if label in RESERVED_MARKERS:
                raise ValueError(f"label {label!r} collides with an item marker")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels!r}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def generic(cls, count: int) -> "LabelSet":
        """``count`` placeholder labels ``L0 .. L{count-1}``."""
        return cls(f"L{k}" for k in range(count))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __getitem__(self, index: int) -> str:
        return self.labels[index]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown label {label!r}") from None


class Mention(NamedTuple):
    label: int
    left: int
    right: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.left, self.right)

    @property
    def length(self) -> int:
        return self.right - self.left

    def sort_key(self) -> tuple[int, int, int]:
        return (self.left, self.right, self.label)

    def format(self, labels: LabelSet | None = None) -> str:
        name = labels[self.label] if labels is not None else str(self.label)
        return f"<{name}, {self.left}, {self.right}>"


class Analysis:
    """An immutable set of mentions kept in canonical (left, right, label) order."""

    __slots__ = ("_mentions", "_set")

    def __init__(self, mentions: Iterable[Mention | tuple[int, int, int]] = ()):
        unique = {Mention(*m) for m in mentions}
        self._mentions: tuple[Mention, ...] = tuple(sorted(unique, key=Mention.sort_key))
        self._set = frozenset(unique)

    @property
    def mentions(self) -> tuple[Mention, ...]:
        return self._mentions

    def __iter__(self) -> Iterator[Mention]:
        return iter(self._mentions)

    def __len__(self) -> int:
        return len(self._mentions)

    def __contains__(self, m: object) -> bool:
        return m in self._set

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Analysis):
            return self._set == other._set
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._set)

    def __repr__(self) -> str:
        return f"Analysis({list(self._mentions)!r})"

    @classmethod
    def from_sorted(cls, mentions: Iterable[Mention]) -> "Analysis":
        """Build from distinct mentions already in canonical order."""
        self = cls.__new__(cls)
        self._mentions = tuple(mentions)
        self._set = frozenset(self._mentions)
        return self

    def spans(self) -> list[tuple[int, int]]:
        return [m.span for m in self._mentions]

    def format(self, labels: LabelSet | None = None) -> str:
        return "{" + ", ".join(m.format(labels) for m in self._mentions) + "}"


def _span(x) -> tuple[int, int]:
    if isinstance(x, Mention):
        return x.span
    i, j = x
    return (i, j)


def is_inside(inner, outer) -> bool:
    """True when ``inner`` is strictly inside ``outer`` (identical spans are not)."""
    i, j = _span(inner)
    oi, oj = _span(outer)
    return (oi < i < j <= oj) or (oi <= i < j < oj)


def _disjoint(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[1] <= b[0] or b[1] <= a[0]


@dataclass
class ValidityReport:
    space: SearchSpace
    conflicts: list[tuple[Mention, Mention]] = field(default_factory=list)
    # mentions with two or more children longer than one word
    overfull: list[Mention] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.conflicts and not self.overfull

    def __bool__(self) -> bool:
        return self.valid

    def describe(self, labels: LabelSet | None = None) -> str:
        if self.valid:
            return f"valid under {self.space.value}"
        parts = [
            f"{a.format(labels)} conflicts with {b.format(labels)}" for a, b in self.conflicts
        ]
        parts += [f"{m.format(labels)} has more than one child longer than one word" for m in self.overfull]
        return f"invalid under {self.space.value}: " + "; ".join(parts)


def check_range(analysis: Iterable[Mention], n: int) -> None:
    for m in analysis:
        if not 0 <= m.left < m.right <= n:
            raise MentionRangeError(f"mention {tuple(m)} is out of range for sentence length {n}")


def children_of(m: Mention, analysis: Analysis) -> set[Mention]:
    """Mentions inside ``m`` that are not inside another mention inside ``m``."""
    if m not in analysis:
        raise ValueError(f"{m!r} is not part of the analysis")
    inner = [x for x in analysis if is_inside(x, m)]
    return {x for x in inner if not any(is_inside(x, y) for y in inner if y != x)}


def validate_analysis(analysis: Analysis, n: int, space: SearchSpace | str) -> ValidityReport:
    space = SearchSpace(space)
    check_range(analysis, n)
    report = ValidityReport(space)
    ms = analysis.mentions
    for a_idx, a in enumerate(ms):
        for b in ms[a_idx + 1:]:
            if _disjoint(a.span, b.span):
                continue
            if space is not SearchSpace.NON_NESTED and (is_inside(a, b) or is_inside(b, a)):
                continue
            report.conflicts.append((a, b))
    if space is SearchSpace.RESTRICTED_NESTED and not report.conflicts:
        for m in ms:
            if sum(1 for c in children_of(m, analysis) if c.length > 1) > 1:
                report.overfull.append(m)
    return report


class WeightTable:
    """Real weight for every candidate mention ``(t, i, j)`` of an ``n``-word sentence.

    Stored densely as a read-only ``(|T|, n+1, n+1)`` float64 array; only the
    cells with ``i < j`` are meaningful, the rest hold ``-inf``.
    """

    __slots__ = ("n", "labels", "array", "_by_width")

    def __init__(self, n: int, labels: LabelSet | Sequence[str], array: np.ndarray):
        if n < 0:
            raise ValueError("sentence length must be non-negative")
        labels = labels if isinstance(labels, LabelSet) else LabelSet(labels)
        arr = np.array(array, dtype=np.float64)
        if arr.shape != (len(labels), n + 1, n + 1):
            raise ValueError(f"expected weight shape {(len(labels), n + 1, n + 1)}, got {arr.shape}")
        upper = np.triu(np.ones((n + 1, n + 1), dtype=bool), k=1)
        vals = arr[:, upper]
        if np.isnan(vals).any():
            raise ValueError("weights must not be NaN")
        if np.isposinf(vals).any():
            raise ValueError("weights must not be +inf")
        arr[:, ~upper] = -np.inf
        arr.setflags(write=False)
        self.n = n
        self.labels = labels
        self.array = arr
        self._by_width = None

    @classmethod
    def constant(cls, n: int, labels, value: float = 0.0) -> "WeightTable":
        labels = labels if isinstance(labels, LabelSet) else LabelSet(labels)
        return cls(n, labels, np.full((len(labels), n + 1, n + 1), value))

    @classmethod
    def random(cls, n: int, labels, rng: np.random.Generator, low: float = -1.0, high: float = 1.0) -> "WeightTable":
        labels = labels if isinstance(labels, LabelSet) else LabelSet(labels)
        return cls(n, labels, rng.uniform(low, high, size=(len(labels), n + 1, n + 1)))

    @classmethod
    def indicator(cls, n: int, labels, gold: Iterable[Mention], positive: float = 1.0,
                  negative: float = -1.0) -> "WeightTable":
        labels = labels if isinstance(labels, LabelSet) else LabelSet(labels)
        gold = list(gold)
        check_range(gold, n)
        arr = np.full((len(labels), n + 1, n + 1), negative)
        for m in gold:
            arr[m.label, m.left, m.right] = positive
        return cls(n, labels, arr)

    @property
    def by_width(self) -> np.ndarray:
        """Span-major copy, ``by_width[j - i, i, t] == array[t, i, j]``, built on first use."""
        if self._by_width is None:
            from ._kernels import weights_by_width

            out = weights_by_width(self.array)
            out.setflags(write=False)
            self._by_width = out
        return self._by_width

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    def weight(self, m: Mention) -> float:
        check_range([m], self.n)
        return float(self.array[m.label, m.left, m.right])

    def score(self, analysis: Iterable[Mention]) -> float:
        return float(sum(self.weight(m) for m in analysis))

    def replace(self, m: Mention, value: float) -> "WeightTable":
        arr = self.array.copy()
        arr[m.label, m.left, m.right] = value
        return WeightTable(self.n, self.labels, arr)

    def candidates(self) -> Iterator[Mention]:
        """All candidate mentions in canonical order."""
        for i in range(self.n):
            for j in range(i + 1, self.n + 1):
                for t in range(self.num_labels):
                    yield Mention(t, i, j)

    def __repr__(self) -> str:
        return f"WeightTable(n={self.n}, labels={list(self.labels)!r})"
