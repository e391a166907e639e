"""Decreasing-threshold continuous greedy over a contracted matroid.

Builds a fractional point of the matroid polytope in ceil(1/delta) rounds.
Each round grows one independent set: a threshold starts at the largest
estimated marginal and decays by (1-delta) per pass; during a pass the
elements are scanned in index order and taken (coordinate += delta) when the
sampled estimate of their marginal on top of the current point clears the
threshold and the round's independence state accepts them. One batch of
random sets is shared by all estimates of a pass (common random numbers),
and an element is re-estimated only while its last estimate still reaches
the current threshold, which is sound because marginals only shrink as the
point grows. The returned point is the average of the round sets, hence a
convex combination of independent sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matroids import IndepState, Matroid
from .oracles import FractionalPoint, ValuationOracle
from .rounding import BaseCombination

__all__ = [
    "ContinuousGreedyConfig",
    "ContinuousGreedyStats",
    "chernoff_sample_count",
    "continuous_greedy",
    "pad_to_bases",
]


def chernoff_sample_count(n: int, delta: float) -> int:
    """Sample count making every per-pass estimate accurate w.h.p.

    Worst-case bound; at desk scale the default config caps it because the
    threshold rule tolerates noisy estimates gracefully.
    """
    return math.ceil(48.0 * math.log(2.0 * max(n, 2) / delta) / delta**2)


@dataclass
class ContinuousGreedyConfig:
    """Accuracy knobs. ``ratio_bound`` is the modular-to-optimum ratio the
    caller guarantees (only recorded, the schedule does not depend on it)."""

    delta: float = 0.1
    ratio_bound: float = 1.0
    samples_per_estimate: int | None = None  # None: capped Chernoff default
    sample_cap: int = 32
    reuse_last_estimates: bool = True

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.ratio_bound < 1.0:
            raise ValueError("ratio_bound must be at least 1")
        if self.samples_per_estimate is not None and self.samples_per_estimate < 1:
            raise ValueError("samples_per_estimate must be positive")
        if self.sample_cap < 1:
            raise ValueError("sample_cap must be positive")

    def resolve_samples(self, n: int) -> int:
        if self.samples_per_estimate is not None:
            return self.samples_per_estimate
        return min(chernoff_sample_count(n, self.delta), self.sample_cap)


@dataclass
class ContinuousGreedyStats:
    rounds: int = 0
    passes: int = 0
    estimates: int = 0
    oracle_calls: int = 0
    indep_ops: int = 0


def continuous_greedy(
    oracle: ValuationOracle,
    matroid: Matroid,
    pinned: set[int],
    config: ContinuousGreedyConfig,
    rng: np.random.Generator,
) -> tuple[FractionalPoint, list[tuple[float, frozenset]], ContinuousGreedyStats]:
    """Maximize the multilinear extension of ``oracle`` over the matroid
    contracted by ``pinned``.

    ``oracle`` must already be the residual objective (zero on the empty set,
    rejecting pinned elements). Returns the fractional point (coordinates of
    pinned elements stay zero), the per-round independent sets with their
    convex weights, and effort counters.
    """
    n = matroid.n
    stats = ContinuousGreedyStats()
    calls_at_start = oracle.call_count
    pinned = set(pinned)
    residual_rank = matroid.rank - len(pinned)
    rounds = max(1, math.ceil(1.0 / config.delta))
    step = 1.0 / rounds
    if residual_rank <= 0:
        return FractionalPoint.zeros(n), [(1.0, frozenset())], stats

    probe = IndepState(matroid, seed=pinned)
    candidates = [e for e in range(n) if e not in pinned and probe.can_add(e)]
    stats.indep_ops += probe.ops
    if not candidates:
        return FractionalPoint.zeros(n), [(1.0, frozenset())], stats

    last_estimate = np.zeros(n)
    for e in candidates:
        last_estimate[e] = oracle.value([e])
    top_singleton = float(max(last_estimate[candidates]))
    if top_singleton <= 0.0:
        stats.oracle_calls = oracle.call_count - calls_at_start
        return FractionalPoint.zeros(n), [(1.0, frozenset())], stats
    threshold_floor = (config.delta / n) * top_singleton
    samples = config.resolve_samples(n)

    x = np.zeros(n)
    round_sets: list[frozenset] = []
    support: list[int] = []  # elements with x > 0, insertion order
    in_support = np.zeros(n, dtype=bool)

    for _ in range(rounds):
        stats.rounds += 1
        state = IndepState(matroid, seed=pinned)
        taken: set[int] = set()
        if config.reuse_last_estimates:
            threshold = float(max(last_estimate[candidates]))
        else:
            last_estimate[candidates] = top_singleton
            threshold = top_singleton
        while threshold > threshold_floor and len(taken) < residual_rank:
            stats.passes += 1
            active = [e for e in candidates if e not in taken and last_estimate[e] >= threshold]
            if active:
                # one shared batch of random sets for every estimate this pass
                batch: list[set] = []
                batch_values: list[float] = []
                sup = np.array(support, dtype=np.int64)
                for _ in range(samples):
                    draw = set(sup[rng.random(sup.size) < x[sup]]) if sup.size else set()
                    batch.append(draw)
                    batch_values.append(oracle.value(draw))
                for e in active:
                    if e in taken or not state.can_add(e):
                        continue
                    gain = 0.0
                    for draw, base_value in zip(batch, batch_values):
                        if e in draw:
                            gain += base_value - oracle.value(draw - {e})
                        else:
                            gain += oracle.value(draw | {e}) - base_value
                    estimate = gain / samples
                    stats.estimates += 1
                    last_estimate[e] = estimate
                    if estimate >= threshold:
                        state.add(e)
                        taken.add(e)
                        x[e] = min(x[e] + step, 1.0)
                        if not in_support[e]:
                            in_support[e] = True
                            support.append(e)
                    if len(taken) >= residual_rank:
                        break
            threshold *= 1.0 - config.delta
        stats.indep_ops += state.ops
        round_sets.append(frozenset(taken))

    stats.oracle_calls = oracle.call_count - calls_at_start
    weights = [step] * rounds
    # rounds are equal-weight by construction; guard the convex-sum contract
    assert abs(sum(weights) - 1.0) < 1e-9
    return FractionalPoint(x), list(zip(weights, round_sets)), stats


def pad_to_bases(
    matroid: Matroid,
    pinned: set[int],
    combination: list[tuple[float, frozenset]],
) -> BaseCombination:
    """Extend each independent set of the combination to a full base.

    Sets are completed greedily in index order above ``pinned`` (padding can
    only help a monotone objective); the convex weights are preserved. The
    returned bases are bases of the whole matroid and all contain ``pinned``.
    """
    bases = []
    weights = []
    for beta, members in combination:
        if beta <= 0:
            raise ValueError("combination weights must be positive")
        state = IndepState(matroid, seed=set(pinned) | set(members))
        for e in range(matroid.n):
            if state.is_complete_base():
                break
            if e not in state.chosen and state.can_add(e):
                state.add(e)
        if not state.is_complete_base():
            raise AssertionError("padding failed to reach a base")
        bases.append(frozenset(state.chosen))
        weights.append(float(beta))
    return BaseCombination(bases=bases, weights=weights)
