"""Maximum-weight base maintenance under decrease-weight operations.

Weights live on a geometric grid: level j carries cap*(1-eps)^(j-1) for
j = 1..num_buckets, and everything at or below cap*(1-eps)^num_buckets is
clamped to that floor (level num_buckets+1). A backend keeps a base of the
matroid that is maximum-weight for the rounded weights while single-element
decreases arrive, exposes uniform sampling from weight buckets and from the
unfrozen part of the base, and lets callers freeze elements so their weight
never changes again.

Backends:
  * partition -- per-part bucket lists with a partially-full pointer,
    constant amortized pointer work per update;
  * graphic   -- decremental maximum spanning tree: evict, then scan non-tree
    buckets from the heaviest for a reconnecting edge (Euler-tour forest
    connectivity);
  * naive     -- full greedy recompute after every update; the test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .euler_forest import EulerForest
from .matroids import GraphicMatroid, Matroid, PartitionMatroid, UnionFind, max_weight_base_bruteforce

__all__ = [
    "WeightGrid",
    "SwapRecord",
    "DynamicBase",
    "PartitionDynamicBase",
    "GraphicDynamicBase",
    "NaiveDynamicBase",
    "build_dynamic_base",
]


class WeightGrid:
    """Geometric rounding grid shared by every backend and test oracle."""

    def __init__(self, cap: float, eps: float, rank: int):
        if cap <= 0:
            raise ValueError("grid cap must be positive")
        if not 0.0 < eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        self.cap = float(cap)
        self.eps = float(eps)
        r = max(int(rank), 1)
        self.num_buckets = max(1, math.ceil(2.0 * math.log(r / eps) / eps))
        # index i holds the weight of level i+1; the last entry is the floor
        self.level_weights = self.cap * np.power(1.0 - eps, np.arange(self.num_buckets + 1))
        self._ascending = self.level_weights[::-1].copy()

    @property
    def floor_level(self) -> int:
        return self.num_buckets + 1

    @property
    def floor_weight(self) -> float:
        return float(self.level_weights[-1])

    def weight(self, level: int) -> float:
        if not 1 <= level <= self.num_buckets + 1:
            raise ValueError(f"level {level} out of range")
        return float(self.level_weights[level - 1])

    def level_of(self, value: float) -> int:
        """Level whose half-open range (next weight, weight] contains value."""
        below = int(np.searchsorted(self._ascending, value, side="left"))
        return min(max(self.num_buckets + 1 - below, 1), self.num_buckets + 1)

    def total(self, level_counts: np.ndarray) -> float:
        """Exact total weight for per-level base counts (index 1..floor)."""
        return float(np.dot(level_counts[1:], self.level_weights))


@dataclass(frozen=True)
class SwapRecord:
    """Audit record for one update: which element left/entered the base."""

    element: int
    old_level: int
    new_level: int
    removed: int | None
    added: int | None

    @property
    def base_changed(self) -> bool:
        return self.removed is not None or self.added is not None


class _SampleSet:
    """Set with O(1) add/discard and O(1) uniform sampling."""

    __slots__ = ("_items", "_pos")

    def __init__(self):
        self._items: list[int] = []
        self._pos: dict[int, int] = {}

    def add(self, x: int) -> None:
        if x not in self._pos:
            self._pos[x] = len(self._items)
            self._items.append(x)

    def discard(self, x: int) -> None:
        i = self._pos.pop(x, None)
        if i is None:
            return
        last = self._items.pop()
        if last != x:
            self._items[i] = last
            self._pos[last] = i

    def sample(self, rng: np.random.Generator) -> int:
        return self._items[int(rng.integers(len(self._items)))]

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, x: int) -> bool:
        return x in self._pos

    def __iter__(self):
        return iter(self._items)


class _BaseMixin:
    """Shared bookkeeping: level counts, bucket sample sets, freezing."""

    grid: WeightGrid
    matroid: Matroid

    def _init_common(self, matroid: Matroid, grid: WeightGrid, trace: Callable[[str], None] | None):
        self.matroid = matroid
        self.grid = grid
        self.trace = trace
        nl = grid.num_buckets + 2
        self.level = np.zeros(matroid.n, dtype=np.int64)
        self.in_base = np.zeros(matroid.n, dtype=bool)
        self.frozen: set[int] = set()
        self.counts = np.zeros(nl, dtype=np.int64)
        self.bucket_sets = [_SampleSet() for _ in range(nl)]
        self.unfrozen_base = _SampleSet()

    def _enroll_base_member(self, e: int) -> None:
        lev = int(self.level[e])
        self.in_base[e] = True
        self.counts[lev] += 1
        if lev <= self.grid.num_buckets:
            self.bucket_sets[lev].add(e)
        self.unfrozen_base.add(e)

    def _check_update_pre(self, e: int, value: float) -> tuple[int, float]:
        if not 0 <= e < self.matroid.n:
            raise ValueError(f"element {e} out of range")
        if not self.in_base[e]:
            raise ValueError(f"element {e} is not in the base")
        if e in self.frozen:
            raise ValueError(f"element {e} is frozen")
        old = int(self.level[e])
        w_old = self.grid.weight(old)
        if value > w_old * (1.0 + 1e-9):
            raise ValueError(f"weight of element {e} may only decrease ({value} > {w_old})")
        return old, min(value, w_old)

    def _emit(self, rec: SwapRecord) -> None:
        if self.trace is not None and rec.base_changed:
            self.trace(
                f"swap element={rec.element} level {rec.old_level}->{rec.new_level} "
                f"out={rec.removed} in={rec.added}"
            )

    # -- queries shared by all backends ------------------------------------

    def sample_bucket(self, level: int, rng: np.random.Generator) -> int | None:
        """Uniform unfrozen base member of the bucket, or None when empty."""
        if not 1 <= level <= self.grid.num_buckets:
            raise ValueError(f"bucket level {level} out of range")
        s = self.bucket_sets[level]
        if not len(s):
            return None
        return s.sample(rng)

    def sample_base(self, rng: np.random.Generator) -> int | None:
        """Uniform unfrozen base member (floor included), or None if exhausted."""
        if not len(self.unfrozen_base):
            return None
        return self.unfrozen_base.sample(rng)

    def bucket_size(self, level: int) -> int:
        return len(self.bucket_sets[level])

    def total_weight(self) -> float:
        return self.grid.total(self.counts)

    def weight_of(self, e: int) -> float:
        return self.grid.weight(int(self.level[e]))

    def element_level(self, e: int) -> int:
        return int(self.level[e])

    def base_set(self) -> set[int]:
        return set(int(e) for e in np.flatnonzero(self.in_base))

    def base_size(self) -> int:
        return int(self.in_base.sum())

    def freeze(self, e: int) -> None:
        """Pin e: it stays in the base at its current weight, leaves buckets."""
        if e in self.frozen:
            raise ValueError(f"element {e} already frozen")
        if not self.in_base[e]:
            raise ValueError(f"element {e} is not in the base")
        self._freeze_hook(e)
        lev = int(self.level[e])
        if lev <= self.grid.num_buckets:
            self.bucket_sets[lev].discard(e)
        self.unfrozen_base.discard(e)
        self.frozen.add(e)

    def _freeze_hook(self, e: int) -> None:
        pass


# -- partition backend ---------------------------------------------------------


class _ListNode:
    __slots__ = ("elem", "prev", "next")

    def __init__(self, elem: int = -1):
        self.elem = elem
        self.prev = None
        self.next = None


class _PartBucket:
    """Doubly-linked per-(part, level) list: base members form the prefix.

    ``boundary`` points at the first non-base node (or the tail sentinel).
    Promotion is a single boundary advance; no relinking.
    """

    __slots__ = ("head", "tail", "boundary")

    def __init__(self):
        self.head = _ListNode()
        self.tail = _ListNode()
        self.head.next = self.tail
        self.tail.prev = self.head
        self.boundary = self.tail

    def append(self, node: _ListNode, is_base: bool) -> None:
        last = self.tail.prev
        last.next = node
        node.prev = last
        node.next = self.tail
        self.tail.prev = node
        if not is_base and self.boundary is self.tail:
            self.boundary = node

    def remove(self, node: _ListNode) -> None:
        if self.boundary is node:
            self.boundary = node.next
        node.prev.next = node.next
        node.next.prev = node.prev
        node.prev = node.next = None

    def first_nonbase(self) -> _ListNode | None:
        return None if self.boundary is self.tail else self.boundary

    def promote_first_nonbase(self) -> _ListNode:
        node = self.boundary
        self.boundary = node.next
        return node


class PartitionDynamicBase(_BaseMixin):
    """Max-weight base for a partition matroid, O(1) amortized per update.

    Every part keeps its elements in per-level lists with base members at the
    front, plus a pointer to the first level that still has a non-base
    element. A decrease evicts the element, re-files it at its new level, and
    promotes the best remaining candidate of the same part; the pointer only
    moves backwards when the evicted element re-enters above it. ``steps``
    counts elementary list/pointer operations for amortized-cost audits.
    """

    backend = "partition"

    def __init__(
        self,
        matroid: PartitionMatroid,
        weights: Sequence[float],
        grid: WeightGrid,
        trace: Callable[[str], None] | None = None,
    ):
        if matroid.variant != "partition":
            raise ValueError("PartitionDynamicBase needs a partition matroid")
        self._init_common(matroid, grid, trace)
        w = np.asarray(weights, dtype=float)
        if w.shape[0] != matroid.n:
            raise ValueError("weight vector length mismatch")
        self.steps = 0
        self._nodes = [_ListNode(e) for e in range(matroid.n)]
        self._lists: dict[tuple[int, int], _PartBucket] = {}
        self._pf = np.ones(matroid.num_parts, dtype=np.int64)
        for e in range(matroid.n):
            self.level[e] = grid.level_of(w[e])
        for part in range(matroid.num_parts):
            members = sorted(matroid.part_members(part), key=lambda e: (self.level[e], e))
            budget = int(matroid.budgets[part])
            for slot, e in enumerate(members):
                is_base = slot < budget
                self._bucket_for(part, int(self.level[e])).append(self._nodes[e], is_base)
                self.steps += 1
                if is_base:
                    self._enroll_base_member(e)

    def _bucket_for(self, part: int, level: int) -> _PartBucket:
        key = (part, level)
        bucket = self._lists.get(key)
        if bucket is None:
            bucket = _PartBucket()
            self._lists[key] = bucket
        return bucket

    def update_base(self, e: int, value: float) -> SwapRecord:
        """Lower e's weight and restore a maximum-weight base for its part."""
        old, value = self._check_update_pre(e, value)
        new = self.grid.level_of(value)
        if new == old:
            return SwapRecord(e, old, old, None, None)
        part = int(self.matroid.part_of[e])
        node = self._nodes[e]

        # evict e and re-file it at the lower level as a non-base candidate
        self._bucket_for(part, old).remove(node)
        self.counts[old] -= 1
        if old <= self.grid.num_buckets:
            self.bucket_sets[old].discard(e)
        self.unfrozen_base.discard(e)
        self.in_base[e] = False
        self.level[e] = new
        self._bucket_for(part, new).append(node, is_base=False)
        self.steps += 2
        if new < self._pf[part]:
            self._pf[part] = new

        # promote the heaviest non-base element of the part (possibly e itself)
        j = int(self._pf[part])
        while True:
            bucket = self._lists.get((part, j))
            if bucket is not None and bucket.first_nonbase() is not None:
                break
            j += 1
            self.steps += 1
            if j > self.grid.floor_level:
                raise AssertionError("part lost its replacement candidate")
        self._pf[part] = j
        winner = bucket.promote_first_nonbase().elem
        self.steps += 1
        self._enroll_base_member(winner)

        if winner == e:
            rec = SwapRecord(e, old, new, None, None)
        else:
            rec = SwapRecord(e, old, new, e, winner)
        self._emit(rec)
        return rec

    def _freeze_hook(self, e: int) -> None:
        part = int(self.matroid.part_of[e])
        self._bucket_for(part, int(self.level[e])).remove(self._nodes[e])
        self.steps += 1


# -- graphic backend -----------------------------------------------------------


class GraphicDynamicBase(_BaseMixin):
    """Decremental maximum spanning tree over the rounded weight grid.

    On a tree-edge decrease the edge is cut and the non-tree buckets are
    scanned from the heaviest level down to (exclusive) the edge's new level;
    the first edge reconnecting the two halves replaces it, otherwise the
    edge is relinked at its new weight. Connectivity tests run on an
    Euler-tour forest, so one update costs O(scanned * log k).
    """

    backend = "graphic"

    def __init__(
        self,
        matroid: GraphicMatroid,
        weights: Sequence[float],
        grid: WeightGrid,
        trace: Callable[[str], None] | None = None,
    ):
        if matroid.variant != "graphic":
            raise ValueError("GraphicDynamicBase needs a graphic matroid")
        self._init_common(matroid, grid, trace)
        w = np.asarray(weights, dtype=float)
        if w.shape[0] != matroid.n:
            raise ValueError("weight vector length mismatch")
        for e in range(matroid.n):
            self.level[e] = grid.level_of(w[e])
        self.forest = EulerForest(matroid.num_vertices)
        self._nontree: list[set[int]] = [set() for _ in range(grid.num_buckets + 2)]
        uf = UnionFind(matroid.num_vertices)
        for e in sorted(range(matroid.n), key=lambda e: (self.level[e], e)):
            u, v = matroid.edges[e]
            if uf.union(u, v):
                self.forest.link(u, v, e)
                self._enroll_base_member(e)
            else:
                self._nontree[int(self.level[e])].add(e)

    def update_base(self, e: int, value: float) -> SwapRecord:
        """Lower a tree edge's weight; splice in a heavier crossing edge if any."""
        old, value = self._check_update_pre(e, value)
        new = self.grid.level_of(value)
        if new == old:
            return SwapRecord(e, old, old, None, None)
        u, v = self.matroid.edges[e]
        self.forest.cut(e)
        replacement = None
        for lev in range(1, new):
            bucket = self._nontree[lev]
            if not bucket:
                continue
            for f in sorted(bucket):
                fu, fv = self.matroid.edges[f]
                if not self.forest.same_tree(fu, fv):
                    replacement = (lev, f)
                    break
            if replacement is not None:
                break
        if replacement is None:
            self.forest.link(u, v, e)
            self.counts[old] -= 1
            self.counts[new] += 1
            if old <= self.grid.num_buckets:
                self.bucket_sets[old].discard(e)
            if new <= self.grid.num_buckets:
                self.bucket_sets[new].add(e)
            self.level[e] = new
            rec = SwapRecord(e, old, new, None, None)
        else:
            lev, f = replacement
            fu, fv = self.matroid.edges[f]
            self.forest.link(fu, fv, f)
            self._nontree[lev].discard(f)
            self.level[e] = new
            self._nontree[new].add(e)
            self.counts[old] -= 1
            if old <= self.grid.num_buckets:
                self.bucket_sets[old].discard(e)
            self.unfrozen_base.discard(e)
            self.in_base[e] = False
            self._enroll_base_member(f)
            rec = SwapRecord(e, old, new, e, f)
        self._emit(rec)
        return rec


# -- naive backend (test oracle) ------------------------------------------------


class NaiveDynamicBase(_BaseMixin):
    """Recompute-from-scratch backend; the correctness oracle for the others.

    Frozen elements are pinned into the greedy so they are never evicted,
    matching the contract the incremental backends maintain implicitly.
    ``fault_after`` silently skips the recompute from the given update count
    on; it exists for fault-injection tests of the self-check harness.
    """

    backend = "naive"

    def __init__(
        self,
        matroid: Matroid,
        weights: Sequence[float],
        grid: WeightGrid,
        trace: Callable[[str], None] | None = None,
        fault_after: int | None = None,
    ):
        self._init_common(matroid, grid, trace)
        w = np.asarray(weights, dtype=float)
        if w.shape[0] != matroid.n:
            raise ValueError("weight vector length mismatch")
        for e in range(matroid.n):
            self.level[e] = grid.level_of(w[e])
        self._fault_after = fault_after
        self._updates = 0
        self._recompute(None)

    def _rounded_weights(self) -> np.ndarray:
        if self.matroid.n == 0:
            return np.zeros(0)
        return self.grid.level_weights[self.level - 1]

    def _recompute(self, previous: frozenset | None) -> tuple[int | None, int | None]:
        base = max_weight_base_bruteforce(self.matroid, self._rounded_weights(), pinned=self.frozen)
        removed = (previous - base) if previous is not None else set()
        added = (base - previous) if previous is not None else set()
        if previous is not None and (len(removed) > 1 or len(added) > 1):
            raise AssertionError("single decrease changed more than one base slot")
        self.counts[:] = 0
        self.in_base[:] = False
        for s in self.bucket_sets:
            for e in list(s):
                s.discard(e)
        for e in list(self.unfrozen_base):
            self.unfrozen_base.discard(e)
        for e in base:
            self.in_base[e] = True
            self.counts[self.level[e]] += 1
            if e not in self.frozen:
                if self.level[e] <= self.grid.num_buckets:
                    self.bucket_sets[int(self.level[e])].add(e)
                self.unfrozen_base.add(e)
        return (next(iter(removed), None), next(iter(added), None))

    def update_base(self, e: int, value: float) -> SwapRecord:
        old, value = self._check_update_pre(e, value)
        new = self.grid.level_of(value)
        self._updates += 1
        if new == old:
            return SwapRecord(e, old, old, None, None)
        previous = frozenset(self.base_set())
        self.level[e] = new
        if self._fault_after is not None and self._updates >= self._fault_after:
            return SwapRecord(e, old, new, None, None)  # deliberately stale
        removed, added = self._recompute(previous)
        rec = SwapRecord(e, old, new, removed, added)
        self._emit(rec)
        return rec


DynamicBase = PartitionDynamicBase | GraphicDynamicBase | NaiveDynamicBase


def build_dynamic_base(
    matroid: Matroid,
    weights: Sequence[float],
    cap: float,
    eps: float,
    backend: str = "auto",
    trace: Callable[[str], None] | None = None,
    grid: WeightGrid | None = None,
) -> DynamicBase:
    """Round weights onto the grid and build the matching backend."""
    if grid is None:
        grid = WeightGrid(cap, eps, matroid.rank)
    if backend == "auto":
        backend = matroid.variant
    if backend == "partition":
        return PartitionDynamicBase(matroid, weights, grid, trace)
    if backend == "graphic":
        return GraphicDynamicBase(matroid, weights, grid, trace)
    if backend == "naive":
        return NaiveDynamicBase(matroid, weights, grid, trace)
    raise ValueError(f"unknown backend {backend!r}")
