"""Corpus reading and maximum-recall coverage of each search space.

Corpus files hold one JSON object per line::

    {"tokens": ["He", ...], "entities": [{"type": "PER", "start": 0, "end": 1}, ...]}

``start``/``end`` are end-exclusive fenceposts over ``tokens``. Blank lines
are skipped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO

from .core import Analysis, LabelSet, Mention, SearchSpace, WeightTable, is_inside
from .deduction import Algorithm
from .inference import map_inference


class CorpusFormatError(ValueError):
    """A corpus line is not a well-formed record."""


@dataclass(frozen=True)
class SentenceRecord:
    tokens: tuple[str, ...]
    entities: tuple[tuple[str, int, int], ...]

    def __post_init__(self):
        n = len(self.tokens)
        for etype, start, end in self.entities:
            if not 0 <= start < end <= n:
                raise ValueError(f"entity ({etype!r}, {start}, {end}) does not fit {n} tokens")

    def __len__(self) -> int:
        return len(self.tokens)

    def gold(self, labels: LabelSet) -> Analysis:
        return Analysis(Mention(labels.index(t), i, j) for t, i, j in self.entities)


@dataclass
class Corpus(Sequence[SentenceRecord]):
    records: list[SentenceRecord] = field(default_factory=list)
    labels: tuple[str, ...] = ()

    def __getitem__(self, k):
        return self.records[k]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SentenceRecord]:
        return iter(self.records)


def parse_record(obj: object) -> SentenceRecord:
    if not isinstance(obj, dict):
        raise CorpusFormatError("record must be a JSON object")
    tokens = obj.get("tokens")
    entities = obj.get("entities", [])
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise CorpusFormatError('"tokens" must be an array of strings')
    if not isinstance(entities, list):
        raise CorpusFormatError('"entities" must be an array')
    parsed = []
    for e in entities:
        if not isinstance(e, dict):
            raise CorpusFormatError("entity must be an object")
        etype, start, end = e.get("type"), e.get("start"), e.get("end")
        if not isinstance(etype, str) or not etype:
            raise CorpusFormatError('entity "type" must be a non-empty string')
        for v in (start, end):
            if isinstance(v, bool) or not isinstance(v, int):
                raise CorpusFormatError('entity "start"/"end" must be integers')
        parsed.append((etype, start, end))
    return SentenceRecord(tuple(tokens), tuple(parsed))


def read_corpus(source: TextIO | Iterable[str]) -> Corpus:
    records: list[SentenceRecord] = []
    labels: dict[str, None] = {}
    for lineno, line in enumerate(source, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"line {lineno}: {exc.msg}") from None
        try:
            rec = parse_record(obj)
        except CorpusFormatError as exc:
            raise CorpusFormatError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise ValueError(f"sentence {len(records)} (line {lineno}): {exc}") from None
        for etype, _, _ in rec.entities:
            labels.setdefault(etype)
        records.append(rec)
    return Corpus(records, tuple(labels))


def write_record(rec: SentenceRecord) -> str:
    return json.dumps({
        "tokens": list(rec.tokens),
        "entities": [{"type": t, "start": i, "end": j} for t, i, j in rec.entities],
    }, ensure_ascii=False)


@dataclass(frozen=True)
class CoverageReport:
    space: SearchSpace
    total: int
    recoverable: int
    sentences: int
    duplicate_span_sentences: int
    partial_overlap_sentences: int

    @property
    def recall(self) -> float:
        return self.recoverable / self.total if self.total else 1.0

    def as_dict(self) -> dict:
        return {
            "space": self.space.value,
            "sentences": self.sentences,
            "total": self.total,
            "recoverable": self.recoverable,
            "max_recall": self.recall,
            "duplicate_span_sentences": self.duplicate_span_sentences,
            "partial_overlap_sentences": self.partial_overlap_sentences,
        }


def best_recoverable(gold: Analysis, n: int, labels: LabelSet, space: SearchSpace | str) -> Analysis:
    """Largest subset of ``gold`` inside the space.

    Decodes with +1 on gold mentions and -1 elsewhere: adding a non-gold
    mention always lowers the score, so the optimum is a maximum valid gold
    subset.
    """
    alg = Algorithm.for_space(space)
    weights = WeightTable.indicator(n, labels, gold)
    return map_inference(alg, weights)[1]


def _has_duplicate_spans(gold: Analysis) -> bool:
    spans = gold.spans()
    return len(set(spans)) != len(spans)


def _has_partial_overlap(gold: Analysis) -> bool:
    spans = sorted(set(gold.spans()))
    for k, a in enumerate(spans):
        for b in spans[k + 1:]:
            if b[0] >= a[1]:
                break
            if not (is_inside(a, b) or is_inside(b, a)):
                return True
    return False


def max_recall(corpus: Iterable[SentenceRecord], space: SearchSpace | str,
               labels: Sequence[str] | None = None) -> CoverageReport:
    space = SearchSpace(space)
    records = list(corpus)
    if labels is None:
        labels = getattr(corpus, "labels", None) or tuple(
            dict.fromkeys(t for r in records for t, _, _ in r.entities))
    label_set = LabelSet(labels or ("ENT",))
    total = recoverable = dups = overlaps = 0
    for rec in records:
        gold = rec.gold(label_set)
        total += len(gold)
        dups += _has_duplicate_spans(gold)
        overlaps += _has_partial_overlap(gold)
        if gold:
            recoverable += len(set(best_recoverable(gold, len(rec), label_set, space)) & set(gold))
    return CoverageReport(space, total, recoverable, len(records), dups, overlaps)
