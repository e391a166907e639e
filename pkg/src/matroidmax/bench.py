"""Benchmark families and the oracle-call scaling harness.

The coverage family pairs a random coverage objective with a budget-1
partition matroid whose rank grows like n^0.65, so the classic greedy
baseline costs a superlinear number of oracle calls while the pipeline stays
nearly linear; fitting log-log slopes over a size sweep exposes the gap.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass

import numpy as np

from .continuous_greedy import ContinuousGreedyConfig
from .lazy_greedy import LazySamplingGreedy
from .matroids import Matroid, PartitionMatroid
from .oracles import CoverageOracle, ModularOracle, ValuationOracle
from .pipeline import WelfareInstance, baseline_greedy, estimate_opt, maximize, welfare_reduce

__all__ = [
    "make_coverage_instance",
    "make_welfare_instance",
    "BenchRow",
    "bench_cell",
    "run_bench",
    "write_csv",
    "fit_loglog_slope",
    "parse_sizes",
]


def bench_rank(n: int) -> int:
    return max(2, math.ceil(0.5 * n**0.65))


def make_coverage_instance(
    n: int,
    seed: int,
    universe: int = 2048,
    rank: int | None = None,
    set_sizes: tuple[int, int] = (3, 8),
) -> tuple[CoverageOracle, PartitionMatroid]:
    """Random coverage objective over a budget-1 partition matroid."""
    rng = np.random.default_rng(seed)
    k = bench_rank(n) if rank is None else rank
    if k > n:
        raise ValueError("rank cannot exceed the ground size")
    sets = []
    lo, hi = set_sizes
    for _ in range(n):
        size = int(rng.integers(lo, hi + 1))
        sets.append(np.unique(rng.integers(0, universe, size=size)))
    part_of = [e % k for e in range(n)]
    return CoverageOracle(universe, sets), PartitionMatroid(part_of, [1] * k)


def make_welfare_instance(num_items: int, num_players: int, seed: int) -> WelfareInstance:
    """Modular valuations drawn uniformly; ground set of the reduction is m*k."""
    rng = np.random.default_rng(seed)
    valuations = [
        ModularOracle(rng.uniform(0.0, 1.0, size=num_items)) for _ in range(num_players)
    ]
    return WelfareInstance(valuations)


@dataclass
class BenchRow:
    instance: str
    n: int
    rank: int
    seed: int
    eps: float
    algo: str
    value: float
    calls: int
    secs: float

    def as_list(self) -> list:
        return [
            self.instance, self.n, self.rank, self.seed, self.eps,
            self.algo, self.value, self.calls, self.secs,
        ]


CSV_HEADER = ["instance", "n", "k", "seed", "eps", "algo", "value", "calls", "secs"]


def bench_cell(
    family: str,
    n: int,
    seed: int,
    eps: float,
    algo: str,
    sample_cap: int = 8,
) -> BenchRow:
    """Run one (instance, seed, algo) cell and return its accounting row."""
    if family == "coverage":
        oracle, matroid = make_coverage_instance(n, seed)
        name = f"coverage-{n}"
    elif family == "welfare":
        players = max(2, int(round(n ** 0.25)))
        items = max(2, n // players)
        inst = make_welfare_instance(items, players, seed)
        oracle, matroid = welfare_reduce(inst)
        name = f"welfare-{items}x{players}"
    else:
        raise ValueError(f"unknown bench family {family!r}")

    rng = np.random.default_rng(seed)
    start_calls = oracle.call_count
    start = time.perf_counter()
    if algo == "pipeline":
        cfg = ContinuousGreedyConfig(delta=eps, sample_cap=sample_cap)
        report = maximize(oracle, matroid, eps, rng, restarts=1, cg_config=cfg, seed=seed)
        value = report.value
    elif algo == "greedy":
        solution = baseline_greedy(oracle, matroid)
        value = oracle.peek(solution)
    elif algo == "lazy-only":
        cap = estimate_opt(oracle, matroid, min(eps, 0.24))
        value = 0.0
        if cap > 0:
            lazy = LazySamplingGreedy(oracle, matroid, eps, cap, rng)
            lazy.run()
            value = lazy.solution_value
    else:
        raise ValueError(f"unknown algo {algo!r}")
    secs = time.perf_counter() - start
    calls = oracle.call_count - start_calls
    return BenchRow(name, matroid.n, matroid.rank, seed, eps, algo, value, calls, secs)


def run_bench(
    family: str,
    sizes: list[int],
    seeds: int,
    eps: float,
    algos: list[str],
    sample_cap: int = 8,
    progress=None,
) -> list[BenchRow]:
    rows = []
    for n in sizes:
        for seed in range(seeds):
            for algo in algos:
                row = bench_cell(family, n, seed, eps, algo, sample_cap=sample_cap)
                rows.append(row)
                if progress is not None:
                    progress(row)
    return rows


def write_csv(rows: list[BenchRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_list())


def fit_loglog_slope(sizes, values) -> float:
    """Least-squares slope of log2(values) against log2(sizes)."""
    xs = np.log2(np.asarray(sizes, dtype=float))
    ys = np.log2(np.asarray(values, dtype=float))
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def parse_sizes(spec: str) -> list[int]:
    """Sizes like '2^12..2^16', '1024,2048', or '4096'."""

    def parse_one(tok: str) -> int:
        tok = tok.strip()
        if "^" in tok:
            base, exp = tok.split("^")
            return int(base) ** int(exp)
        return int(tok)

    spec = spec.strip()
    if ".." in spec:
        lo_s, hi_s = spec.split("..")
        lo, hi = parse_one(lo_s), parse_one(hi_s)
        if lo <= 0 or hi < lo:
            raise ValueError(f"bad size range {spec!r}")
        sizes = []
        cur = lo
        while cur <= hi:
            sizes.append(cur)
            cur *= 2
        return sizes
    return [parse_one(tok) for tok in spec.split(",") if tok.strip()]
