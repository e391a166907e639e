"""Monotone submodular value oracles with exact call accounting.

Solvers in this package treat the objective as a black box mapping an element
set to a nonnegative value. Every counted evaluation flows through
``ValuationOracle.value``, so oracle-call budgets can be audited exactly.
Built-in objectives: coverage, facility location, and modular weights.
"""

from __future__ import annotations

import threading
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ValuationOracle",
    "ContractedOracle",
    "CoverageOracle",
    "FacilityLocationOracle",
    "ModularOracle",
    "FractionalPoint",
    "estimate_multilinear",
    "clean_instance_lines",
    "parse_objective_lines",
    "parse_objective",
    "load_objective",
]


def _as_element_set(elements: Iterable[int], ground_size: int) -> frozenset:
    s = frozenset(elements)
    for e in s:
        if not 0 <= e < ground_size:
            raise ValueError(f"element {e} outside ground set of size {ground_size}")
    return s


class ValuationOracle:
    """Black-box set function f: 2^V -> R+, assumed monotone submodular.

    Subclasses implement ``_evaluate``. ``value`` is safe to call from
    concurrent workers; the call counter only increases. ``peek`` evaluates
    without counting and exists for test oracles and instrumentation audits,
    never for solver logic.
    """

    def __init__(self, ground_size: int):
        if ground_size < 0:
            raise ValueError("ground_size must be nonnegative")
        self.ground_size = int(ground_size)
        self._calls = 0
        self._lock = threading.Lock()

    # -- counting ---------------------------------------------------------

    @property
    def call_count(self) -> int:
        """Total counted evaluations so far."""
        return self._calls

    def value(self, elements: Iterable[int]) -> float:
        """Counted evaluation of f on the given element set."""
        s = _as_element_set(elements, self.ground_size)
        with self._lock:
            self._calls += 1
        return self._evaluate(s)

    def peek(self, elements: Iterable[int]) -> float:
        """Uncounted evaluation; for audits and brute-force verification."""
        return self._evaluate(_as_element_set(elements, self.ground_size))

    def marginal(self, base: Iterable[int], e: int, base_value: float | None = None) -> float:
        """f(base + e) - f(base).

        Costs two counted evaluations, or one when the caller already knows
        f(base) and passes it as ``base_value``.
        """
        s = _as_element_set(base, self.ground_size)
        if e in s:
            raise ValueError(f"element {e} already in base set")
        top = self.value(s | {e})
        if base_value is None:
            base_value = self.value(s)
        return top - base_value

    # -- to implement ------------------------------------------------------

    def _evaluate(self, elements: frozenset) -> float:
        raise NotImplementedError


class CoverageOracle(ValuationOracle):
    """Maximum coverage: f(S) = number of universe items covered by S.

    Each ground element owns a subset of a finite universe. Evaluation keeps
    a tiny ring of recently evaluated (set, covered) pairs so the greedy
    access pattern f(S), f(S+e1), f(S+e2), ... costs O(|delta|) per call
    instead of a fresh union; results are exact either way.
    """

    _RING = 3
    _MAX_DELTA = 16

    def __init__(self, universe_size: int, element_sets: Sequence[Iterable[int]]):
        super().__init__(len(element_sets))
        self.universe_size = int(universe_size)
        self._sets: list[frozenset] = []
        for s in element_sets:
            fs = frozenset(s)
            for u in fs:
                if not 0 <= u < self.universe_size:
                    raise ValueError(f"universe item {u} out of range")
            self._sets.append(fs)
        self._cache: list[tuple[frozenset, frozenset]] = []

    def _evaluate(self, elements: frozenset) -> float:
        best = None
        best_delta = None
        for idx, (members, covered) in enumerate(self._cache):
            if len(elements) < len(members):
                continue
            delta = elements - members
            if len(delta) != len(elements) - len(members) or len(delta) > self._MAX_DELTA:
                continue
            if best is None or len(delta) < len(best_delta):
                best, best_delta = idx, delta
                if not delta:
                    break
        if best is not None:
            members, covered = self._cache[best]
            if best_delta:
                covered = covered.union(*(self._sets[e] for e in best_delta))
            entry = (elements, covered)
            hit = self._cache.pop(best)
            self._cache.insert(0, hit)
            if best_delta:
                self._cache.insert(1, entry)
                del self._cache[self._RING:]
            return float(len(covered))
        covered = frozenset().union(*(self._sets[e] for e in elements)) if elements else frozenset()
        self._cache.insert(0, (elements, covered))
        del self._cache[self._RING:]
        return float(len(covered))

    def element_set(self, e: int) -> frozenset:
        return self._sets[e]

    def multilinear_exact(self, point: "FractionalPoint") -> float:
        """Closed-form multilinear extension: sum over items of coverage odds."""
        x = point.coords
        if x.shape[0] != self.ground_size:
            raise ValueError("point dimension mismatch")
        miss = np.ones(self.universe_size)
        for e, s in enumerate(self._sets):
            if x[e] > 0.0 and s:
                miss[list(s)] *= 1.0 - x[e]
        return float(np.sum(1.0 - miss))


class FacilityLocationOracle(ValuationOracle):
    """Facility location: f(S) = sum over clients of the best gain in S."""

    def __init__(self, gains: np.ndarray):
        gains = np.asarray(gains, dtype=float)
        if gains.ndim != 2:
            raise ValueError("gains must be a 2-d element x client matrix")
        if np.any(gains < 0):
            raise ValueError("gains must be nonnegative")
        super().__init__(gains.shape[0])
        self._gains = gains

    def _evaluate(self, elements: frozenset) -> float:
        if not elements:
            return 0.0
        return float(self._gains[sorted(elements)].max(axis=0).sum())


class ModularOracle(ValuationOracle):
    """Additive objective f(S) = sum of fixed nonnegative element weights."""

    def __init__(self, weights: Sequence[float]):
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0):
            raise ValueError("modular weights must be nonnegative")
        super().__init__(w.shape[0])
        self.weights = w

    def _evaluate(self, elements: frozenset) -> float:
        if not elements:
            return 0.0
        return float(self.weights[sorted(elements)].sum())


class ContractedOracle(ValuationOracle):
    """Residual objective g(T) = f(T | pinned) = f(T + pinned) - f(pinned).

    Evaluations are disjoint from the pinned set. Each call costs exactly one
    counted call on the underlying oracle (the pinned offset is evaluated once
    at construction), plus one on this oracle's own counter.
    """

    def __init__(self, base_oracle: ValuationOracle, pinned: Iterable[int]):
        super().__init__(base_oracle.ground_size)
        self.base_oracle = base_oracle
        self.pinned = _as_element_set(pinned, base_oracle.ground_size)
        self._offset = base_oracle.value(self.pinned)

    @property
    def pinned_value(self) -> float:
        return self._offset

    def _evaluate(self, elements: frozenset) -> float:
        if elements & self.pinned:
            raise ValueError("contracted oracle evaluated on a pinned element")
        return self.base_oracle.value(elements | self.pinned) - self._offset


class FractionalPoint:
    """A point of [0,1]^V, the argument of the multilinear extension."""

    __slots__ = ("coords",)

    def __init__(self, coords: np.ndarray):
        x = np.asarray(coords, dtype=float).copy()
        if x.ndim != 1:
            raise ValueError("coords must be one-dimensional")
        if np.any(x < -1e-12) or np.any(x > 1.0 + 1e-12):
            raise ValueError("coordinates must lie in [0, 1]")
        np.clip(x, 0.0, 1.0, out=x)
        x.flags.writeable = False
        self.coords = x

    @classmethod
    def zeros(cls, n: int) -> "FractionalPoint":
        return cls(np.zeros(n))

    @classmethod
    def indicator(cls, elements: Iterable[int], n: int) -> "FractionalPoint":
        x = np.zeros(n)
        x[list(elements)] = 1.0
        return cls(x)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coords)

    def join_with_set(self, elements: Iterable[int]) -> "FractionalPoint":
        """Coordinatewise max with the indicator of the given set."""
        x = self.coords.copy()
        idx = list(elements)
        if idx:
            x[idx] = np.maximum(x[idx], 1.0)
        return FractionalPoint(x)

    def __repr__(self) -> str:  # pragma: no cover
        return f"FractionalPoint(n={self.n}, support={len(self.support())})"


def estimate_multilinear(
    oracle: ValuationOracle,
    point: FractionalPoint,
    num_samples: int,
    rng: np.random.Generator,
) -> float:
    """Sample-average estimate of the multilinear extension at ``point``.

    Draws ``num_samples`` independent random sets, each including element e
    with probability x_e, and averages the counted oracle values. Unbiased;
    exact at integral points.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be at least 1")
    if point.n != oracle.ground_size:
        raise ValueError("point dimension mismatch")
    support = point.support()
    probs = point.coords[support]
    total = 0.0
    for _ in range(num_samples):
        draw = support[rng.random(support.size) < probs]
        total += oracle.value(draw)
    return total / num_samples


# -- instance file format ---------------------------------------------------
#
# coverage:  "coverage <n> <universe>" then n lines of universe indices
# facility:  "facility <n> <m>"        then n rows of m nonnegative reals


def clean_instance_lines(text: str) -> list[str]:
    """Strip comments; keep blank lines (a blank body line is an empty set)."""
    return [ln.strip() for ln in text.splitlines() if not ln.strip().startswith("#")]


def parse_objective_lines(lines: list[str], pos: int = 0) -> tuple[ValuationOracle, int]:
    """Parse one objective block starting at ``pos``; returns (oracle, next pos)."""
    while pos < len(lines) and not lines[pos]:
        pos += 1
    if pos >= len(lines):
        raise ValueError("empty objective description")
    head = lines[pos].split()
    kind = head[0]
    if kind == "coverage":
        if len(head) != 3:
            raise ValueError("coverage header must be 'coverage n universe'")
        n, universe = int(head[1]), int(head[2])
        if len(lines) - pos - 1 < n:
            raise ValueError(f"coverage instance needs {n} element lines")
        sets = [tuple(int(tok) for tok in lines[pos + 1 + i].split()) for i in range(n)]
        return CoverageOracle(universe, sets), pos + 1 + n
    if kind == "facility":
        if len(head) != 3:
            raise ValueError("facility header must be 'facility n m'")
        n, m = int(head[1]), int(head[2])
        if len(lines) - pos - 1 < n:
            raise ValueError(f"facility instance needs {n} gain rows")
        rows = []
        for i in range(n):
            row = [float(tok) for tok in lines[pos + 1 + i].split()]
            if len(row) != m:
                raise ValueError(f"facility row {i} has {len(row)} entries, expected {m}")
            rows.append(row)
        return FacilityLocationOracle(np.asarray(rows)), pos + 1 + n
    raise ValueError(f"unknown objective kind {kind!r}")


def parse_objective(text: str) -> ValuationOracle:
    oracle, _ = parse_objective_lines(clean_instance_lines(text))
    return oracle


def load_objective(path) -> ValuationOracle:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_objective(fh.read())
