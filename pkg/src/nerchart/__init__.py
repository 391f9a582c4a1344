"""Weighted deduction for span-based nested mention recognition."""

from .bench import BenchConfig, BenchRow, fit_loglog_slope, format_rows, run_bench
from .core import (Analysis, InvalidAnalysisError, LabelSet, Mention, MentionRangeError, SearchSpace,
                   ValidityReport, WeightTable, children_of, is_inside, validate_analysis)
from .corpus import (Corpus, CorpusFormatError, CoverageReport, SentenceRecord, max_recall,
                     read_corpus)
from .deduction import (Algorithm, Decoding, DerivationTrace, Item, RULE_TABLES, RULES,
                        enumerate_rule_instances, inside, outside, viterbi_decode)
from .inference import (MarginalTable, count_analyses, log_partition, map_inference, marginals,
                        nll_loss)
from .oracle import InstanceTooLargeError, enumerate_analyses, oracle_inference
from .semiring import (COUNTING, LOG_REAL, MAX_TROPICAL, CountingOverflowError, NumericDomainError,
                       Semiring, log_sum_exp)

__all__ = [
    "Algorithm", "Analysis", "BenchConfig", "BenchRow", "COUNTING", "Corpus", "CorpusFormatError",
    "CountingOverflowError", "CoverageReport", "Decoding", "DerivationTrace", "InstanceTooLargeError",
    "InvalidAnalysisError", "Item", "LOG_REAL", "LabelSet", "MAX_TROPICAL", "MarginalTable", "Mention",
    "MentionRangeError", "NumericDomainError", "RULES", "RULE_TABLES", "SearchSpace", "Semiring",
    "SentenceRecord", "ValidityReport", "WeightTable", "children_of", "count_analyses",
    "enumerate_analyses", "enumerate_rule_instances", "fit_loglog_slope", "format_rows", "inside",
    "is_inside", "log_partition", "log_sum_exp", "map_inference", "marginals", "max_recall",
    "nll_loss", "oracle_inference", "outside", "read_corpus", "run_bench", "validate_analysis",
    "viterbi_decode",
]
