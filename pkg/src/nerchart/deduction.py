"""Deduction systems for span-based NER and the chart passes over them.

Three systems are defined as explicit rule tables:

* ``semi-markov``: non-nested mentions, rules (a)-(b), O(n^2 |T|).
* ``cyk``: nested mentions, rules (c)-(i), O(n^3 + n^2 |T|).
* ``quadratic``: nested mentions with at most one child longer than one word
  per mention, rules (d) (f)-(p), O(n^2 |T|).

Charts are filled in a static width-major schedule. Within a width the order
is partial-left, partial-right, complete; right-state items come last, left
to right. Every rule reads only narrower items or same-width items earlier
in that order.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterator, NamedTuple

from .core import Analysis, LabelSet, Mention, SearchSpace, WeightTable
from .semiring import LOG_REAL, LogReal, MAX_TROPICAL, Semiring

RIGHT = "→"
PARTIAL_RIGHT = "↦"
COMPLETE = "↔"
PARTIAL_LEFT = "↤"
MENTION = "t"


class Algorithm(str, enum.Enum):
    SEMI_MARKOV = "semi-markov"
    CYK = "cyk"
    QUADRATIC = "quadratic"

    @property
    def space(self) -> SearchSpace:
        return _SPACES[self]

    @classmethod
    def for_space(cls, space: SearchSpace | str) -> "Algorithm":
        space = SearchSpace(space)
        return next(alg for alg, sp in _SPACES.items() if sp is space)


_SPACES = {
    Algorithm.SEMI_MARKOV: SearchSpace.NON_NESTED,
    Algorithm.CYK: SearchSpace.NESTED,
    Algorithm.QUADRATIC: SearchSpace.RESTRICTED_NESTED,
}


class Item(NamedTuple):
    """A chart item. Right states ``[→, i]`` only use ``i``."""

    kind: str
    i: int
    j: int = -1
    label: int = -1

    def format(self, labels: LabelSet | None = None) -> str:
        if self.kind == RIGHT:
            return f"[→, {self.i}]"
        if self.kind == MENTION:
            name = labels[self.label] if labels is not None else str(self.label)
            return f"[{name}, {self.i}, {self.j}]"
        return f"[{self.kind}, {self.i}, {self.j}]"


def _r(i: int) -> Item:
    return Item(RIGHT, i)


def _pr(i: int, j: int) -> Item:
    return Item(PARTIAL_RIGHT, i, j)


def _pl(i: int, j: int) -> Item:
    return Item(PARTIAL_LEFT, i, j)


def _c(i: int, j: int) -> Item:
    return Item(COMPLETE, i, j)


def _m(t: int, i: int, j: int) -> Item:
    return Item(MENTION, i, j, t)


# A rule binds at most one free split index; unary and split-free rules use
# the single pseudo split -1.
NO_SPLIT = range(-1, 0)
NEVER = range(0)


def _when(cond: bool) -> range:
    return NO_SPLIT if cond else NEVER


@dataclass(frozen=True)
class Rule:
    """One deduction rule schema.

    ``splits(c)`` gives the admissible values of the free split index for
    consequent ``c`` (side conditions included) and ``build(c, split, label)``
    returns the antecedents of that instance, left to right.
    """

    name: str
    premises: tuple[str, ...]
    conclusion: str
    side: str
    head: str
    splits: Callable[[Item], range]
    build: Callable[[Item, int, int], tuple[Item, ...]]
    labelled: bool = False

    def bindings(self, c: Item, num_labels: int) -> Iterator[tuple[int, int]]:
        for split in self.splits(c):
            if self.labelled:
                for t in range(num_labels):
                    yield split, t
            else:
                yield split, -1

    def count(self, c: Item, num_labels: int) -> int:
        return len(self.splits(c)) * (num_labels if self.labelled else 1)

    def __str__(self) -> str:
        cond = f"   if {self.side}" if self.side else ""
        return f"({self.name}) {' + '.join(self.premises)} => {self.conclusion}{cond}"


RULES: dict[str, Rule] = {r.name: r for r in [
    Rule("a", ("[→, i]", "[t, i, j]"), "[→, j]", "", RIGHT,
         lambda c: range(c.i), lambda c, k, t: (_r(k), _m(t, k, c.i)), labelled=True),
    Rule("b", ("[→, i-1]",), "[→, i]", "", RIGHT,
         lambda c: _when(c.i >= 1), lambda c, k, t: (_r(c.i - 1),)),
    Rule("c", ("[↦, i, k]", "[↔, k, j]"), "[↦, i, j]", "i < k", PARTIAL_RIGHT,
         lambda c: range(c.i + 1, c.j), lambda c, k, t: (_pr(c.i, k), _c(k, c.j))),
    Rule("d", ("[↦, i, j-1]",), "[↦, i, j]", "", PARTIAL_RIGHT,
         lambda c: NO_SPLIT, lambda c, k, t: (_pr(c.i, c.j - 1),)),
    Rule("e", ("[↔, i, k]", "[↔, k, j]"), "[↦, i, j]", "i < k < j", PARTIAL_RIGHT,
         lambda c: range(c.i + 1, c.j), lambda c, k, t: (_c(c.i, k), _c(k, c.j))),
    Rule("f", ("[↔, i, j-1]",), "[↦, i, j]", "i < j-1", PARTIAL_RIGHT,
         lambda c: _when(c.i < c.j - 1), lambda c, k, t: (_c(c.i, c.j - 1),)),
    Rule("g", ("[↦, i, j]", "[t, i, j]"), "[↔, i, j]", "i < j", COMPLETE,
         lambda c: _when(c.i < c.j), lambda c, k, t: (_pr(c.i, c.j), _m(t, c.i, c.j)), labelled=True),
    Rule("h", ("[→, i]", "[↔, i, j]"), "[→, j]", "", RIGHT,
         lambda c: range(c.i), lambda c, k, t: (_r(k), _c(k, c.i))),
    Rule("i", ("[→, i-1]",), "[→, i]", "", RIGHT,
         lambda c: _when(c.i >= 1), lambda c, k, t: (_r(c.i - 1),)),
    Rule("j", ("[↦, i, j-1]", "[↔, j-1, j]"), "[↦, i, j]", "i < j-1", PARTIAL_RIGHT,
         lambda c: _when(c.i < c.j - 1), lambda c, k, t: (_pr(c.i, c.j - 1), _c(c.j - 1, c.j))),
    Rule("k", ("[↔, i, j-1]", "[↔, j-1, j]"), "[↦, i, j]", "i < j-1", PARTIAL_RIGHT,
         lambda c: _when(c.i < c.j - 1), lambda c, k, t: (_c(c.i, c.j - 1), _c(c.j - 1, c.j))),
    Rule("l", ("[↔, i, i+1]", "[↔, i+1, j]"), "[↤, i, j]", "i+2 < j", PARTIAL_LEFT,
         lambda c: _when(c.i + 2 < c.j), lambda c, k, t: (_c(c.i, c.i + 1), _c(c.i + 1, c.j))),
    Rule("m", ("[↔, i+1, j]",), "[↤, i, j]", "i+2 < j", PARTIAL_LEFT,
         lambda c: _when(c.i + 2 < c.j), lambda c, k, t: (_c(c.i + 1, c.j),)),
    Rule("n", ("[↤, i+1, j]",), "[↤, i, j]", "i+1 < j", PARTIAL_LEFT,
         lambda c: _when(c.i + 1 < c.j), lambda c, k, t: (_pl(c.i + 1, c.j),)),
    Rule("o", ("[↔, i, i+1]", "[↤, i+1, j]"), "[↤, i, j]", "i+1 < j", PARTIAL_LEFT,
         lambda c: _when(c.i + 1 < c.j), lambda c, k, t: (_c(c.i, c.i + 1), _pl(c.i + 1, c.j))),
    Rule("p", ("[↤, i, j]",), "[↦, i, j]", "", PARTIAL_RIGHT,
         lambda c: NO_SPLIT, lambda c, k, t: (_pl(c.i, c.j),)),
]}


@dataclass(frozen=True)
class RuleTable:
    algorithm: Algorithm
    rules: tuple[Rule, ...]
    # span item kinds in within-width schedule order
    kinds: tuple[str, ...]

    @property
    def partial_axioms(self) -> bool:
        """Whether ``[↦, i, i]`` (0 <= i < n) are axioms."""
        return PARTIAL_RIGHT in self.kinds

    def rules_for(self, kind: str) -> tuple[Rule, ...]:
        return tuple(sorted((r for r in self.rules if r.head == kind), key=lambda r: r.name))

    def edges(self, c: Item, num_labels: int) -> list[tuple[str, int, int, tuple[Item, ...]]]:
        """Incoming rule instances of ``c`` in tie-break order (rule, split, label)."""
        out = []
        for rule in _RULES_BY_HEAD[self.algorithm][c.kind]:
            for split, t in rule.bindings(c, num_labels):
                out.append((rule.name, split, t, rule.build(c, split, t)))
        return out

    def is_axiom(self, item: Item) -> bool:
        if item.kind == MENTION:
            return True
        if item.kind == RIGHT:
            return item.i == 0
        return item.kind == PARTIAL_RIGHT and item.i == item.j and self.partial_axioms


def _table(alg: Algorithm, names: str, kinds: tuple[str, ...]) -> RuleTable:
    return RuleTable(alg, tuple(RULES[x] for x in names), kinds)


RULE_TABLES: dict[Algorithm, RuleTable] = {
    Algorithm.SEMI_MARKOV: _table(Algorithm.SEMI_MARKOV, "ab", ()),
    Algorithm.CYK: _table(Algorithm.CYK, "cdefghi", (PARTIAL_RIGHT, COMPLETE)),
    Algorithm.QUADRATIC: _table(Algorithm.QUADRATIC, "dfghijklmnop", (PARTIAL_LEFT, PARTIAL_RIGHT, COMPLETE)),
}

_RULES_BY_HEAD = {
    alg: {kind: table.rules_for(kind) for kind in (RIGHT, PARTIAL_RIGHT, COMPLETE, PARTIAL_LEFT)}
    for alg, table in RULE_TABLES.items()
}


def schedule(alg: Algorithm | str, n: int) -> Iterator[Item]:
    """Derived items in evaluation order."""
    table = RULE_TABLES[Algorithm(alg)]
    for width in range(1, n + 1):
        for kind in table.kinds:
            for i in range(n - width + 1):
                yield Item(kind, i, i + width)
    for j in range(1, n + 1):
        yield _r(j)


class Chart:
    """Semiring values for every item of one algorithm on one sentence."""

    def __init__(self, algorithm: Algorithm, n: int, num_labels: int, semiring: Semiring):
        zero = semiring.zero
        self.algorithm = algorithm
        self.n = n
        self.num_labels = num_labels
        self.semiring = semiring
        self.right = [zero] * (n + 1)
        self.tables = {kind: [[zero] * (n + 1) for _ in range(n + 1)]
                       for kind in RULE_TABLES[algorithm].kinds}
        self.mentions = [[[zero] * (n + 1) for _ in range(n + 1)] for _ in range(num_labels)]
        # item -> (rule, split, label) of the selected instance, selective semirings only
        self.backpointers: dict[Item, tuple[str, int, int]] | None = {} if semiring.selective else None

    def __getitem__(self, item: Item):
        if item.kind == RIGHT:
            return self.right[item.i]
        if item.kind == MENTION:
            return self.mentions[item.label][item.i][item.j]
        return self.tables[item.kind][item.i][item.j]

    def __setitem__(self, item: Item, value) -> None:
        if item.kind == RIGHT:
            self.right[item.i] = value
        elif item.kind == MENTION:
            self.mentions[item.label][item.i][item.j] = value
        else:
            self.tables[item.kind][item.i][item.j] = value

    @property
    def goal(self):
        return self.right[self.n]


def inside(alg: Algorithm | str, weights: WeightTable, semiring: Semiring = LOG_REAL) -> Chart:
    """Fill the chart bottom-up; ``chart.goal`` sums over all derivations."""
    alg = Algorithm(alg)
    table = RULE_TABLES[alg]
    n, num_labels = weights.n, weights.num_labels
    chart = Chart(alg, n, num_labels, semiring)
    chart.right[0] = semiring.one
    if table.partial_axioms:
        for i in range(n):
            chart.tables[PARTIAL_RIGHT][i][i] = semiring.one
    arr = weights.array
    for t in range(num_labels):
        for i in range(n):
            for j in range(i + 1, n + 1):
                chart.mentions[t][i][j] = semiring.lift(arr[t, i, j])

    times = semiring.times
    for c in schedule(alg, n):
        edges = table.edges(c, num_labels)
        values = [reduce(times, (chart[a] for a in ants)) for _, _, _, ants in edges]
        if semiring.selective:
            if not values:
                continue
            best = 0
            for k in range(1, len(values)):
                if values[k] > values[best]:
                    best = k
            chart[c] = values[best]
            chart.backpointers[c] = edges[best][:3]
        else:
            chart[c] = semiring.sum(values)
    return chart


def outside(alg: Algorithm | str, weights: WeightTable, inside_chart: Chart) -> Chart:
    """Log-space outside values, visiting items in reverse schedule order."""
    alg = Algorithm(alg)
    if inside_chart.algorithm is not alg:
        raise ValueError(f"chart was built by {inside_chart.algorithm.value}, not {alg.value}")
    if not isinstance(inside_chart.semiring, LogReal):
        raise ValueError("outside values need an inside chart over the log-real semiring")
    if inside_chart.n != weights.n or inside_chart.num_labels != weights.num_labels:
        raise ValueError("chart and weight table disagree on sentence length or label count")
    table = RULE_TABLES[alg]
    n, num_labels = weights.n, weights.num_labels
    sr = LOG_REAL
    out = Chart(alg, n, num_labels, sr)
    pending: dict[Item, list[float]] = {_r(n): [sr.one]}

    for c in reversed(list(schedule(alg, n))):
        oc = sr.sum(pending.pop(c, ()))
        out[c] = oc
        if oc == sr.zero:
            continue
        for _, _, _, ants in table.edges(c, num_labels):
            vals = [inside_chart[a] for a in ants]
            for pos, a in enumerate(ants):
                rest = sr.product(v for q, v in enumerate(vals) if q != pos)
                pending.setdefault(a, []).append(sr.times(oc, rest))
    for a, contributions in pending.items():
        out[a] = sr.sum(contributions)
    return out


def enumerate_rule_instances(alg: Algorithm | str, n: int, num_labels: int = 1) -> Counter:
    """Number of (rule, index binding) instances per rule id."""
    alg = Algorithm(alg)
    counts: Counter = Counter({r.name: 0 for r in RULE_TABLES[alg].rules})
    by_head = _RULES_BY_HEAD[alg]
    for c in schedule(alg, n):
        for rule in by_head[c.kind]:
            counts[rule.name] += rule.count(c, num_labels)
    return counts


@dataclass(frozen=True)
class TraceStep:
    rule: str  # rule id, or "Axiom"
    item: Item
    antecedents: tuple[int, ...] = ()  # indices of earlier steps


@dataclass(frozen=True)
class DerivationTrace:
    steps: tuple[TraceStep, ...]
    labels: LabelSet

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def rules(self) -> list[str]:
        return [s.rule for s in self.steps]

    def rule_counts(self) -> Counter:
        return Counter(s.rule for s in self.steps if s.rule != "Axiom")

    def analysis(self) -> Analysis:
        return Analysis(Mention(s.item.label, s.item.i, s.item.j)
                        for s in self.steps if s.item.kind == MENTION)

    def format(self) -> str:
        rows = []
        for k, step in enumerate(self.steps, 1):
            if step.rule == "Axiom":
                how = "Axiom"
            else:
                how = f"({step.rule}) with " + " & ".join(str(a + 1) for a in step.antecedents)
            rows.append((f"{k}.", step.item.format(self.labels), how))
        widths = [max((len(r[c]) for r in rows), default=0) for c in range(3)]
        return "\n".join(f"{a:>{widths[0]}} {b:<{widths[1]}}  {c}".rstrip() for a, b, c in rows)


def build_trace(alg: Algorithm, n: int, labels: LabelSet,
                lookup: Callable[[Item], tuple[str, int, int]]) -> DerivationTrace:
    """Replay the derivation of the goal from backpointers.

    Steps come out depth-first, left antecedent first, each item after its
    antecedents.
    """
    table = RULE_TABLES[alg]
    steps: list[TraceStep] = []
    index: dict[Item, int] = {}
    stack: list[tuple[Item, tuple[Item, ...] | None]] = [(_r(n), None)]
    while stack:
        item, ants = stack.pop()
        if item in index:
            continue
        if table.is_axiom(item):
            index[item] = len(steps)
            steps.append(TraceStep("Axiom", item))
            continue
        rule, split, label = lookup(item)
        if ants is None:
            ants = RULES[rule].build(item, split, label)
            stack.append((item, ants))
            stack.extend((a, None) for a in reversed(ants))
            continue
        index[item] = len(steps)
        steps.append(TraceStep(rule, item, tuple(index[a] for a in ants)))
    return DerivationTrace(tuple(steps), labels)


@dataclass(frozen=True)
class Decoding:
    score: float
    analysis: Analysis
    trace: DerivationTrace

    def __iter__(self):
        return iter((self.score, self.analysis, self.trace))


def viterbi_decode(alg: Algorithm | str, weights: WeightTable, engine: str = "compiled") -> Decoding:
    """Best-scoring analysis with its derivation.

    ``engine="compiled"`` runs the specialised max-plus kernels,
    ``engine="generic"`` the rule-table engine; both break ties identically.
    """
    alg = Algorithm(alg)
    if engine == "generic":
        chart = inside(alg, weights, MAX_TROPICAL)
        score, lookup = chart.goal, chart.backpointers.__getitem__
    elif engine == "compiled":
        from ._kernels import run_viterbi

        score, lookup = run_viterbi(alg, weights.by_width)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    trace = build_trace(alg, weights.n, weights.labels, lookup)
    return Decoding(float(score), trace.analysis(), trace)
