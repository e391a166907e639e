"""End-to-end solver: estimate the optimum, run the sampled residual greedy,
hand the residual instance to the continuous greedy, and round the result.

Also provides the welfare-maximization reduction onto a partition matroid,
the classic greedy baseline, brute-force verification for tiny instances,
and the JSON-able solve report with per-phase oracle-call accounting.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .continuous_greedy import (
    ContinuousGreedyConfig,
    ContinuousGreedyStats,
    continuous_greedy,
    pad_to_bases,
)
from .lazy_greedy import LazySamplingGreedy
from .matroids import IndepState, Matroid, PartitionMatroid, parse_matroid_lines
from .oracles import (
    ContractedOracle,
    FractionalPoint,
    ValuationOracle,
    clean_instance_lines,
    estimate_multilinear,
    parse_objective_lines,
)
from .rounding import BaseCombination, swap_round

__all__ = [
    "estimate_opt",
    "threshold_greedy",
    "baseline_greedy",
    "brute_force_opt",
    "ContinuousMatroidResult",
    "continuous_matroid",
    "SolveReport",
    "maximize",
    "WelfareInstance",
    "WelfareOracle",
    "welfare_reduce",
    "load_instance",
    "parse_instance",
]


# -- optimum estimation -----------------------------------------------------------


def threshold_greedy(oracle: ValuationOracle, matroid: Matroid, eps: float) -> tuple[set[int], float]:
    """Decreasing-threshold discrete greedy; (1/2 - eps)-approximate value.

    The acceptance threshold starts at the best singleton and decays by
    (1 - eps) until it drops below eps/n of the start, so the run costs
    O((n/eps) log(n/eps)) oracle calls.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    n = matroid.n
    solution: set[int] = set()
    if n == 0 or matroid.rank == 0:
        return solution, 0.0
    state = IndepState(matroid)
    singles = np.array([oracle.value([e]) for e in range(n)])
    top = float(singles.max())
    if top <= 0.0:
        return solution, 0.0
    current = oracle.value([])
    threshold = top
    floor = (eps / n) * top
    while threshold > floor and len(solution) < matroid.rank:
        for e in range(n):
            if e in solution or len(solution) >= matroid.rank:
                continue
            if not state.can_add(e):
                continue
            gain = oracle.marginal(solution, e, base_value=current)
            if gain >= threshold:
                state.add(e)
                solution.add(e)
                current += gain
        threshold *= 1.0 - eps
    return solution, current - oracle.value([])


def estimate_opt(oracle: ValuationOracle, matroid: Matroid, eps: float) -> float:
    """Upper bound M with f(OPT) <= M <= 2/(1-2*eps) * f(OPT).

    Scales the (1/2 - eps)-approximate greedy value G to M = 2G/(1-2*eps);
    the upper bound follows from G <= f(OPT).
    """
    if not 0.0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    _, greedy_value = threshold_greedy(oracle, matroid, eps)
    return 2.0 * greedy_value / (1.0 - 2.0 * eps)


# -- baselines and verification -----------------------------------------------------


def baseline_greedy(oracle: ValuationOracle, matroid: Matroid) -> set[int]:
    """Classic matroid greedy: n scans per pick, Theta(n k) marginals."""
    solution: set[int] = set()
    state = IndepState(matroid)
    current = oracle.value([])
    for _ in range(matroid.rank):
        best_e = None
        best_gain = -math.inf
        for e in range(matroid.n):
            if e in solution or not state.can_add(e):
                continue
            gain = oracle.marginal(solution, e, base_value=current)
            if gain > best_gain:
                best_e, best_gain = e, gain
        if best_e is None:
            break
        state.add(best_e)
        solution.add(best_e)
        current += best_gain
    return solution


def brute_force_opt(
    oracle: ValuationOracle,
    matroid: Matroid,
    max_n: int = 24,
    max_rank: int = 4,
) -> tuple[set[int], float]:
    """Exhaustive optimum over independent sets; verification only (uncounted)."""
    if matroid.n > max_n or matroid.rank > max_rank:
        raise ValueError("instance too large for exhaustive verification")
    best_set: set[int] = set()
    best_value = oracle.peek([])
    for size in range(1, matroid.rank + 1):
        for combo in itertools.combinations(range(matroid.n), size):
            if not matroid.is_independent(combo):
                continue
            value = oracle.peek(combo)
            if value > best_value:
                best_set, best_value = set(combo), value
    return best_set, best_value


# -- combined pipeline ---------------------------------------------------------------


@dataclass
class ContinuousMatroidResult:
    lazy_set: set[int]
    point: FractionalPoint  # the combined point: 1 on the lazy picks
    residual_combination: list[tuple[float, frozenset]]
    value_estimate: float
    opt_estimate: float
    skipped_continuous: bool
    stats: ContinuousGreedyStats
    phase_calls: dict[str, int] = field(default_factory=dict)
    phase_seconds: dict[str, float] = field(default_factory=dict)


def continuous_matroid(
    oracle: ValuationOracle,
    matroid: Matroid,
    eps: float,
    rng: np.random.Generator,
    backend: str = "auto",
    cg_config: ContinuousGreedyConfig | None = None,
    estimate_samples: int = 64,
) -> ContinuousMatroidResult:
    """Fractional solve: residual greedy picks plus a continuous-greedy point.

    Returns the combined point (1 on the greedy picks, fractional elsewhere)
    whose multilinear value is (1 - 1/e - O(eps)) * f(OPT) with constant
    probability, and the residual convex combination for rounding.
    """
    if not 0.0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    if oracle.ground_size != matroid.n:
        raise ValueError("oracle and matroid disagree on the ground set size")
    phase_calls: dict[str, int] = {}
    phase_seconds: dict[str, float] = {}

    mark_calls = oracle.call_count
    mark_time = time.perf_counter()
    opt_estimate = estimate_opt(oracle, matroid, eps)
    phase_calls["estimate_opt"] = oracle.call_count - mark_calls
    phase_seconds["estimate_opt"] = time.perf_counter() - mark_time

    empty_stats = ContinuousGreedyStats()
    if opt_estimate <= 0.0 or matroid.rank == 0:
        point = FractionalPoint.zeros(matroid.n)
        return ContinuousMatroidResult(
            set(), point, [(1.0, frozenset())], 0.0, opt_estimate, True,
            empty_stats, phase_calls, phase_seconds,
        )

    mark_calls = oracle.call_count
    mark_time = time.perf_counter()
    lazy = LazySamplingGreedy(oracle, matroid, eps, opt_estimate, rng, backend=backend)
    lazy_set = lazy.run()
    lazy_value = lazy.solution_value
    phase_calls["lazy"] = oracle.call_count - mark_calls
    phase_seconds["lazy"] = time.perf_counter() - mark_time

    # the estimate stretch: opt_estimate <= alpha * f(OPT)
    alpha = 2.0 / (1.0 - 2.0 * eps)
    skip = lazy_value >= (1.0 - 1.0 / math.e) * opt_estimate / alpha

    mark_calls = oracle.call_count
    mark_time = time.perf_counter()
    if skip:
        residual: list[tuple[float, frozenset]] = [(1.0, frozenset())]
        stats = empty_stats
        combined = FractionalPoint.indicator(lazy_set, matroid.n)
    else:
        contracted = ContractedOracle(oracle, lazy_set)
        if cg_config is None:
            # c' = ceil(8/eps) keeps the residual modular bound comfortably
            # inside the continuous guarantee: 1/e - 3/c' >= 1/e - 3*eps/8 > 0
            # for every eps <= 1/4.
            cg_config = ContinuousGreedyConfig(delta=eps, ratio_bound=math.ceil(8.0 / eps))
        x_res, residual, stats = continuous_greedy(contracted, matroid, lazy_set, cg_config, rng)
        combined = x_res.join_with_set(lazy_set)
    phase_calls["continuous"] = oracle.call_count - mark_calls
    phase_seconds["continuous"] = time.perf_counter() - mark_time

    mark_calls = oracle.call_count
    mark_time = time.perf_counter()
    value_estimate = estimate_multilinear(oracle, combined, estimate_samples, rng)
    phase_calls["estimate_value"] = oracle.call_count - mark_calls
    phase_seconds["estimate_value"] = time.perf_counter() - mark_time

    return ContinuousMatroidResult(
        lazy_set, combined, residual, value_estimate, opt_estimate, skip,
        stats, phase_calls, phase_seconds,
    )


@dataclass
class SolveReport:
    """Everything a solve produced, JSON-serializable for the CLI."""

    algo: str
    n: int
    rank: int
    eps: float
    seed: int | None
    restarts: int
    solution: list[int]
    value: float
    opt_estimate: float
    lazy_size: int
    fractional_estimate: float
    phase_calls: dict[str, int]
    phase_seconds: dict[str, float]
    indep_ops: int
    total_calls: int
    feasible: bool
    schema_version: int = 1

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "algo": self.algo,
            "n": self.n,
            "rank": self.rank,
            "eps": self.eps,
            "seed": self.seed,
            "restarts": self.restarts,
            "solution": self.solution,
            "value": self.value,
            "opt_estimate": self.opt_estimate,
            "lazy_size": self.lazy_size,
            "fractional_estimate": self.fractional_estimate,
            "phase_calls": self.phase_calls,
            "phase_seconds": self.phase_seconds,
            "indep_ops": self.indep_ops,
            "total_calls": self.total_calls,
            "feasible": self.feasible,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def maximize(
    oracle: ValuationOracle,
    matroid: Matroid,
    eps: float,
    rng: np.random.Generator,
    restarts: int = 3,
    backend: str = "auto",
    rounding_method: str = "auto",
    cg_config: ContinuousGreedyConfig | None = None,
    seed: int | None = None,
) -> SolveReport:
    """Full pipeline with best-of-``restarts`` amplification.

    The fractional guarantee holds with constant probability per run, so a
    few independent restarts make the end-to-end bound reliable; each restart
    draws its own generator from ``rng``.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    calls_at_start = oracle.call_count
    phase_calls: dict[str, int] = {}
    phase_seconds: dict[str, float] = {}
    indep_ops = 0
    best_solution: set[int] | None = None
    best_value = -math.inf
    best_run: ContinuousMatroidResult | None = None

    for _ in range(restarts):
        child = np.random.default_rng(rng.integers(np.iinfo(np.int64).max))
        run = continuous_matroid(
            oracle, matroid, eps, child, backend=backend, cg_config=cg_config
        )
        for key, val in run.phase_calls.items():
            phase_calls[key] = phase_calls.get(key, 0) + val
        for key, val in run.phase_seconds.items():
            phase_seconds[key] = phase_seconds.get(key, 0.0) + val
        indep_ops += run.stats.indep_ops

        mark_calls = oracle.call_count
        mark_time = time.perf_counter()
        combination = pad_to_bases(matroid, run.lazy_set, run.residual_combination)
        rounded = swap_round(matroid, combination, child, method=rounding_method)
        value = oracle.value(rounded)
        phase_calls["rounding"] = phase_calls.get("rounding", 0) + (oracle.call_count - mark_calls)
        phase_seconds["rounding"] = phase_seconds.get("rounding", 0.0) + (time.perf_counter() - mark_time)

        if value > best_value:
            best_value = value
            best_solution = rounded
            best_run = run

    assert best_solution is not None and best_run is not None
    return SolveReport(
        algo="pipeline",
        n=matroid.n,
        rank=matroid.rank,
        eps=eps,
        seed=seed,
        restarts=restarts,
        solution=sorted(best_solution),
        value=best_value,
        opt_estimate=best_run.opt_estimate,
        lazy_size=len(best_run.lazy_set),
        fractional_estimate=best_run.value_estimate,
        phase_calls=phase_calls,
        phase_seconds=phase_seconds,
        indep_ops=indep_ops,
        total_calls=oracle.call_count - calls_at_start,
        feasible=matroid.is_independent(best_solution),
    )


# -- welfare maximization reduction ---------------------------------------------------


@dataclass
class WelfareInstance:
    """m items to split among k players with monotone submodular valuations."""

    valuations: list[ValuationOracle]

    def __post_init__(self):
        if not self.valuations:
            raise ValueError("at least one player required")
        m = self.valuations[0].ground_size
        if any(v.ground_size != m for v in self.valuations):
            raise ValueError("all valuations must share the item ground set")
        for v in self.valuations:
            if abs(v.peek([])) > 1e-12:
                raise ValueError("valuations must be normalized: v(empty) = 0")

    @property
    def num_items(self) -> int:
        return self.valuations[0].ground_size

    @property
    def num_players(self) -> int:
        return len(self.valuations)


class WelfareOracle(ValuationOracle):
    """Composite objective over item copies: element item*k + player.

    One evaluation calls each player's valuation exactly once, and only for
    players holding at least one copy.
    """

    def __init__(self, instance: WelfareInstance):
        self.instance = instance
        super().__init__(instance.num_items * instance.num_players)

    def assignment(self, elements) -> list[set[int]]:
        k = self.instance.num_players
        per_player: list[set[int]] = [set() for _ in range(k)]
        for e in elements:
            per_player[e % k].add(e // k)
        return per_player

    def _evaluate(self, elements: frozenset) -> float:
        total = 0.0
        for player, items in enumerate(self.assignment(elements)):
            if items:
                total += self.instance.valuations[player].value(items)
        return total


def welfare_reduce(instance: WelfareInstance) -> tuple[WelfareOracle, PartitionMatroid]:
    """Reduce welfare maximization to a partition-matroid constraint.

    Every item gets one copy per player; the matroid allows at most one copy
    of each item, so bases are complete assignments.
    """
    m, k = instance.num_items, instance.num_players
    part_of = [e // k for e in range(m * k)]
    budgets = [1] * m
    return WelfareOracle(instance), PartitionMatroid(part_of, budgets)


# -- combined instance files -----------------------------------------------------------


def parse_instance(text: str) -> tuple[ValuationOracle, Matroid]:
    """Objective block followed by a matroid block in one file."""
    lines = clean_instance_lines(text)
    oracle, pos = parse_objective_lines(lines, 0)
    matroid, _ = parse_matroid_lines(lines, pos)
    if oracle.ground_size != matroid.n:
        raise ValueError(
            f"objective has {oracle.ground_size} elements but matroid has {matroid.n}"
        )
    return oracle, matroid


def load_instance(path) -> tuple[ValuationOracle, Matroid]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())
