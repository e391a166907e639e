"""Sampled residual greedy with lazily refreshed marginal buckets.

The classic residual greedy recomputes every marginal after each pick, which
costs a base-size worth of oracle calls per iteration. Here cached marginals
live on the geometric weight grid inside a dynamic maximum-weight base, and
after each pick only a spot check runs: every bucket is sampled until
ceil(4*log2 n) consecutive draws confirm their bucket, resetting the streak
(and lowering the sampled element) whenever a stale entry is caught. The run
stops once the total cached weight of the base falls below 4*c*cap with
c = ceil(4/eps), at which point the remaining residual instance is cheap for
the continuous phase; otherwise it keeps picking uniform unfrozen base
elements until the base is exhausted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamic_base import DynamicBase, build_dynamic_base
from .matroids import Matroid
from .oracles import ValuationOracle

__all__ = ["IterationRecord", "LazySamplingGreedy", "lazy_sampling_greedy"]


@dataclass(frozen=True)
class IterationRecord:
    """Per-iteration trace: cached base weight, refresh effort, f(solution)."""

    t: int
    total_weight: float
    swaps: int
    samples: int
    value: float


class LazySamplingGreedy:
    """Stateful driver; ``run`` returns the grown independent set."""

    def __init__(
        self,
        oracle: ValuationOracle,
        matroid: Matroid,
        eps: float,
        cap: float,
        rng: np.random.Generator,
        backend: str = "auto",
        keep_trace: bool = False,
    ):
        if oracle.ground_size != matroid.n:
            raise ValueError("oracle and matroid disagree on the ground set size")
        if not 0.0 < eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")
        self.oracle = oracle
        self.matroid = matroid
        self.eps = float(eps)
        self.rng = rng
        self.solution: set[int] = set()
        self.keep_trace = keep_trace
        self.trace: list[IterationRecord] = []
        self.stop_cap = math.ceil(4.0 / eps)  # streak constant c; stop at W <= 4*c*cap
        if matroid.rank == 0:
            self.db: DynamicBase | None = None
            self._solution_value = 0.0
            return
        if cap <= 0:
            raise ValueError("cap must be positive (an upper bound on f(OPT))")
        singles = [oracle.value([e]) for e in range(matroid.n)]
        self.db = build_dynamic_base(matroid, singles, cap, eps, backend=backend)
        self._solution_value = oracle.value([])
        # 2*log2(n) failed coin flips at rate 1/2 leave a bad bucket with
        # probability <= 1/n^2; doubled for the union over buckets and picks
        self.sample_streak = max(1, math.ceil(4.0 * math.log2(max(matroid.n, 2))))

    @property
    def solution_value(self) -> float:
        return self._solution_value

    @property
    def stop_threshold(self) -> float:
        assert self.db is not None
        return 4.0 * self.stop_cap * self.db.grid.cap

    def refresh_values(self) -> tuple[int, int]:
        """Spot check every bucket; returns (samples drawn, stale entries fixed).

        A sampled element is stale when its current marginal no longer maps to
        the bucket it sits in; the grid mapping decides the boundary case, so
        staleness is exactly "level_of(marginal) != bucket".
        """
        db = self.db
        assert db is not None
        samples = 0
        updates = 0
        for level in range(1, db.grid.num_buckets + 1):
            streak = 0
            while streak < self.sample_streak:
                e = db.sample_bucket(level, self.rng)
                if e is None:
                    break
                samples += 1
                value = self.oracle.marginal(self.solution, e, base_value=self._solution_value)
                if db.grid.level_of(value) != level:
                    streak = 0
                    db.update_base(e, value)
                    updates += 1
                else:
                    streak += 1
        return samples, updates

    def bucket_goodness_audit(self) -> dict[int, float]:
        """Exact per-bucket fraction of correctly filed elements (uncounted).

        Instrumentation only: marginals are recomputed with ``peek`` so audits
        do not distort the oracle budget. Empty buckets are vacuously 1.0.
        """
        db = self.db
        if db is None:
            return {}
        base_value = self.oracle.peek(self.solution)
        fractions: dict[int, float] = {}
        for level in range(1, db.grid.num_buckets + 1):
            members = list(db.bucket_sets[level])
            if not members:
                fractions[level] = 1.0
                continue
            good = 0
            for e in members:
                true_marginal = self.oracle.peek(self.solution | {e}) - base_value
                if db.grid.level_of(true_marginal) == level:
                    good += 1
            fractions[level] = good / len(members)
        return fractions

    def step(self) -> bool:
        """One iteration; False when the run is over (stop rule or full rank)."""
        db = self.db
        if db is None or len(self.solution) >= self.matroid.rank:
            return False
        samples, updates = self.refresh_values()
        if db.total_weight() <= self.stop_threshold:
            return False
        e = db.sample_base(self.rng)
        assert e is not None, "unfrozen base exhausted before rank was reached"
        self.solution.add(e)
        db.freeze(e)
        self._solution_value = self.oracle.value(self.solution)
        if self.keep_trace:
            self.trace.append(
                IterationRecord(
                    t=len(self.solution),
                    total_weight=db.total_weight(),
                    swaps=updates,
                    samples=samples,
                    value=self._solution_value,
                )
            )
        return True

    def run(self) -> set[int]:
        while self.step():
            pass
        return set(self.solution)


def lazy_sampling_greedy(
    oracle: ValuationOracle,
    matroid: Matroid,
    eps: float,
    cap: float,
    rng: np.random.Generator,
    backend: str = "auto",
) -> set[int]:
    """Run the sampled residual greedy and return its independent set."""
    return LazySamplingGreedy(oracle, matroid, eps, cap, rng, backend=backend).run()
