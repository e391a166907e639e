"""Monotone submodular maximization under explicit matroid constraints.

Pipeline: a sampled residual greedy with lazily refreshed marginal buckets,
a decreasing-threshold continuous greedy over the contracted matroid, and
randomized swap rounding back to a base, with per-phase oracle-call
accounting throughout.
"""

from .oracles import (
    ContractedOracle,
    CoverageOracle,
    FacilityLocationOracle,
    FractionalPoint,
    ModularOracle,
    ValuationOracle,
    estimate_multilinear,
    load_objective,
    parse_objective,
)
from .matroids import (
    GraphicMatroid,
    IndepState,
    PartitionMatroid,
    UnionFind,
    find_swap_pair_bruteforce,
    load_matroid,
    max_weight_base_bruteforce,
    parse_matroid,
)
from .euler_forest import EulerForest
from .dynamic_base import (
    GraphicDynamicBase,
    NaiveDynamicBase,
    PartitionDynamicBase,
    SwapRecord,
    WeightGrid,
    build_dynamic_base,
)
from .lazy_greedy import LazySamplingGreedy, lazy_sampling_greedy
from .continuous_greedy import (
    ContinuousGreedyConfig,
    chernoff_sample_count,
    continuous_greedy,
    pad_to_bases,
)
from .rounding import (
    BaseCombination,
    MergeStats,
    merge_bases,
    merge_bases_graphic,
    merge_bases_partition,
    swap_round,
)
from .pipeline import (
    SolveReport,
    WelfareInstance,
    WelfareOracle,
    baseline_greedy,
    brute_force_opt,
    continuous_matroid,
    estimate_opt,
    load_instance,
    maximize,
    parse_instance,
    threshold_greedy,
    welfare_reduce,
)

__all__ = [
    "ContractedOracle",
    "CoverageOracle",
    "FacilityLocationOracle",
    "FractionalPoint",
    "ModularOracle",
    "ValuationOracle",
    "estimate_multilinear",
    "load_objective",
    "parse_objective",
    "GraphicMatroid",
    "IndepState",
    "PartitionMatroid",
    "UnionFind",
    "find_swap_pair_bruteforce",
    "load_matroid",
    "max_weight_base_bruteforce",
    "parse_matroid",
    "EulerForest",
    "GraphicDynamicBase",
    "NaiveDynamicBase",
    "PartitionDynamicBase",
    "SwapRecord",
    "WeightGrid",
    "build_dynamic_base",
    "LazySamplingGreedy",
    "lazy_sampling_greedy",
    "ContinuousGreedyConfig",
    "chernoff_sample_count",
    "continuous_greedy",
    "pad_to_bases",
    "BaseCombination",
    "MergeStats",
    "merge_bases",
    "merge_bases_graphic",
    "merge_bases_partition",
    "swap_round",
    "SolveReport",
    "WelfareInstance",
    "WelfareOracle",
    "baseline_greedy",
    "brute_force_opt",
    "continuous_matroid",
    "estimate_opt",
    "load_instance",
    "maximize",
    "parse_instance",
    "threshold_greedy",
    "welfare_reduce",
]

__version__ = "0.1.0"
