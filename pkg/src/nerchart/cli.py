"""Command-line entry point.

Exit status is 0 on success, 1 for usage errors and 2 when an input file or
value fails validation. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .bench import BenchConfig, format_rows, run_bench
from .core import Analysis, LabelSet, Mention, SearchSpace, WeightTable
from .corpus import CorpusFormatError, max_recall, read_corpus
from .deduction import Algorithm, viterbi_decode
from .inference import count_analyses, log_partition, map_inference, marginals, nll_loss
from .oracle import enumerate_analyses
from .semiring import CountingOverflowError

EXIT_USAGE = 1
EXIT_INVALID = 2

# stands in for the label set of a weight file that lists no labels
PLACEHOLDER_LABEL = "_"


class InputError(Exception):
    """Bad input file or value; reported with exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(x: float) -> float:
    """Round to 12 significant digits so printed output is stable."""
    return float(f"{x:.12g}")


def _read_json(path: str, allow_empty: bool = False):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if allow_empty and not text.strip():
        return {}
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc.msg} at line {exc.lineno}") from None


def _int_field(obj: dict, key: str, where: str) -> int:
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"{where}: {key!r} must be an integer")
    return v


def _mention(entry: object, labels: LabelSet, n: int, where: str) -> Mention:
    if not isinstance(entry, dict):
        raise InputError(f"{where}: expected an object")
    etype = entry.get("type")
    try:
        t = labels.index(etype)
    except KeyError:
        raise InputError(f"{where}: unknown type {etype!r}") from None
    i, j = _int_field(entry, "start", where), _int_field(entry, "end", where)
    if not 0 <= i < j <= n:
        raise InputError(f"{where}: span ({i}, {j}) is out of range for length {n}")
    return Mention(t, i, j)


def load_weights(path: str, length: int | None = None) -> WeightTable:
    """Read a sparse weight file; ``length`` fills in or checks ``"n"``.

    A file with no labels (including an empty file) has no candidate
    mentions: it is represented by one placeholder label weighted ``-inf``.
    """
    obj = _read_json(path, allow_empty=True)
    if not isinstance(obj, dict):
        raise InputError(f"{path}: weight file must hold a JSON object")
    if "n" in obj:
        n = _int_field(obj, "n", path)
        if length is not None and length != n:
            raise InputError(f"{path}: file says n={n} but --length is {length}")
    elif length is not None:
        n = length
    else:
        raise InputError(f"{path}: no \"n\" in the weight file; pass --length")
    if n < 0:
        raise InputError(f"{path}: sentence length must be non-negative")
    names = obj.get("labels", [])
    if not isinstance(names, list):
        raise InputError(f"{path}: \"labels\" must be an array of strings")
    default = obj.get("default", 0.0)
    if isinstance(default, bool) or not isinstance(default, (int, float)):
        raise InputError(f"{path}: \"default\" must be a number")
    entries = obj.get("entries", [])
    if not isinstance(entries, list):
        raise InputError(f"{path}: \"entries\" must be an array")
    if not names:
        if entries:
            raise InputError(f"{path}: entries given but no labels")
        return WeightTable.constant(n, [PLACEHOLDER_LABEL], -math.inf)
    try:
        labels = LabelSet(names)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    arr = np.full((len(labels), n + 1, n + 1), float(default))
    for k, entry in enumerate(entries):
        where = f"{path}: entry {k}"
        m = _mention(entry, labels, n, where)
        w = entry.get("weight")
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise InputError(f"{where}: \"weight\" must be a number")
        arr[m.label, m.left, m.right] = w
    try:
        return WeightTable(n, labels, arr)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_gold(path: str, weights: WeightTable) -> Analysis:
    obj = _read_json(path)
    if not isinstance(obj, dict) or not isinstance(obj.get("entities"), list):
        raise InputError(f"{path}: gold file must be an object with an \"entities\" array")
    return Analysis(_mention(e, weights.labels, weights.n, f"{path}: entity {k}")
                    for k, e in enumerate(obj["entities"]))


def _mentions_json(analysis: Analysis, labels: LabelSet) -> list[dict]:
    return [{"type": labels[m.label], "start": m.left, "end": m.right} for m in analysis]


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False))


def _cmd_decode(args) -> None:
    weights = load_weights(args.weights, args.length)
    score, analysis = map_inference(args.algorithm, weights)
    _emit({"score": _num(score), "mentions": _mentions_json(analysis, weights.labels)})


def _cmd_trace(args) -> None:
    weights = load_weights(args.weights, args.length)
    decoding = viterbi_decode(args.algorithm, weights)
    print(decoding.trace.format())


def _cmd_logz(args) -> None:
    weights = load_weights(args.weights, args.length)
    _emit({"log_z": _num(log_partition(args.algorithm, weights))})


def _cmd_marginals(args) -> None:
    weights = load_weights(args.weights, args.length)
    table = marginals(args.algorithm, weights)
    rows = [{"type": weights.labels[m.label], "start": m.left, "end": m.right, "probability": _num(p)}
            for m, p in table.items() if p > 0.0]
    _emit({"marginals": rows})


def _cmd_loss(args) -> None:
    weights = load_weights(args.weights, args.length)
    gold = load_gold(args.gold, weights)
    _emit({"loss": _num(nll_loss(args.algorithm, weights, gold))})


def _cmd_count(args) -> None:
    print(count_analyses(args.algorithm, args.length, args.labels))


def _cmd_coverage(args) -> None:
    try:
        with open(args.corpus, encoding="utf-8") as fh:
            corpus = read_corpus(fh)
    except OSError as exc:
        raise InputError(f"cannot read {args.corpus}: {exc.strerror}") from None
    report = max_recall(corpus, args.space)
    out = report.as_dict()
    out["max_recall"] = _num(out["max_recall"])
    _emit(out)


def _cmd_bench(args) -> None:
    algorithms = args.algorithm or list(Algorithm)
    cfg = BenchConfig(args.lengths, repetitions=args.reps, num_labels=args.labels,
                      seed=args.seed, algorithms=algorithms)
    sys.stdout.write(format_rows(run_bench(cfg)))


def _cmd_enumerate(args) -> None:
    labels = LabelSet.generic(args.labels)
    for analysis in enumerate_analyses(args.space, args.length, args.labels):
        _emit(_mentions_json(analysis, labels))


def _non_negative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nerchart", description="Span-based nested mention decoding with weighted deduction.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    algorithms = [a.value for a in Algorithm]
    spaces = [s.value for s in SearchSpace]

    def weighted(name: str, help: str):
        p = sub.add_parser(name, help=help)
        p.add_argument("weights", help="weight file (JSON)")
        p.add_argument("--algorithm", choices=algorithms, default=Algorithm.QUADRATIC.value)
        p.add_argument("--length", type=_non_negative, help="sentence length when the file gives none")
        return p

    weighted("decode", "best analysis and its score").set_defaults(func=_cmd_decode)
    weighted("trace", "derivation of the best analysis, one step per line").set_defaults(func=_cmd_trace)
    weighted("logz", "log partition function").set_defaults(func=_cmd_logz)
    weighted("marginals", "posterior probability of every candidate mention").set_defaults(func=_cmd_marginals)
    p = weighted("loss", "negative log-likelihood of a gold analysis")
    p.add_argument("--gold", required=True, help='gold file: {"entities": [...]}')
    p.set_defaults(func=_cmd_loss)

    p = sub.add_parser("count", help="number of analyses in the algorithm's search space")
    p.add_argument("--length", type=_non_negative, required=True)
    p.add_argument("--labels", type=_positive, default=1)
    p.add_argument("--algorithm", choices=algorithms, required=True)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("coverage", help="maximum recall of a corpus under a search space")
    p.add_argument("--corpus", required=True, help="one JSON record per line")
    p.add_argument("--space", choices=spaces, required=True)
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("bench", help="median MAP decoding time per sentence length")
    p.add_argument("--lengths", type=_non_negative, nargs="+", required=True)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--labels", type=_positive, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--algorithm", choices=algorithms, action="append",
                   help="repeat to select several; default all")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("enumerate", help="list every analysis of a small search space")
    p.add_argument("--length", type=_non_negative, required=True)
    p.add_argument("--labels", type=_positive, default=1)
    p.add_argument("--space", choices=spaces, required=True)
    p.set_defaults(func=_cmd_enumerate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (InputError, CorpusFormatError, ValueError, CountingOverflowError) as exc:
        print(f"nerchart {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0


if __name__ == "__main__":
    sys.exit(main())
