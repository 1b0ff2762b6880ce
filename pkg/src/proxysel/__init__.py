"""Proxy-dataset construction from per-example classifier statistics.

Builds small representative subsets of a labeled dataset from entropy
scores, forgetting counts, or feature embeddings: baseline selections
(random, entropy top-k/bottom-k, forgetting events, greedy k-center), the
tail-weighted deterministic and probabilistic selections, log-scale entropy
histograms, and train/validation splitting.
"""

from .entropy import compute_entropy_table, entropy, predictive_distribution
from .errors import CapacityError, ConsistencyError, ToolkitError, ValidationError
from .histogram import (
    DEFAULT_BIN_WIDTH,
    DEFAULT_FLOOR,
    bin_of,
    bin_weights,
    build_histogram,
    selection_probabilities,
    selection_weight,
)
from .report import Report, build_report
from .selectors import (
    DEFAULT_BETA,
    attach_forget_counts,
    count_forgetting_events,
    run_method,
    select_class_balanced,
    select_entropy_bottomk,
    select_entropy_topk,
    select_forgetting,
    select_kcenter,
    select_probabilistic,
    select_random,
    select_tail_deterministic,
)
from .splitter import split_allshuffle, split_disjoint
from .types import (
    CorrectnessLog,
    ExampleStat,
    Histogram,
    LogitsTable,
    MethodSpec,
    ProbabilityTable,
    Selection,
    SplitResult,
    StatsTable,
    WeightScheme,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConsistencyError",
    "CorrectnessLog",
    "DEFAULT_BETA",
    "DEFAULT_BIN_WIDTH",
    "DEFAULT_FLOOR",
    "ExampleStat",
    "Histogram",
    "LogitsTable",
    "MethodSpec",
    "ProbabilityTable",
    "Report",
    "Selection",
    "SplitResult",
    "StatsTable",
    "ToolkitError",
    "ValidationError",
    "WeightScheme",
    "attach_forget_counts",
    "bin_of",
    "bin_weights",
    "build_histogram",
    "build_report",
    "compute_entropy_table",
    "count_forgetting_events",
    "entropy",
    "predictive_distribution",
    "run_method",
    "select_class_balanced",
    "select_entropy_bottomk",
    "select_entropy_topk",
    "select_forgetting",
    "select_kcenter",
    "select_probabilistic",
    "select_random",
    "select_tail_deterministic",
    "selection_probabilities",
    "selection_weight",
    "split_allshuffle",
    "split_disjoint",
]
