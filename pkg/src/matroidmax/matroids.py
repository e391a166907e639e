"""Explicit matroid representations and incremental independence checking.

Two variants are supported: generalized partition matroids (per-part budgets)
and graphic matroids (independent sets are forests of a connected graph).
Brute-force utilities (exact max-weight base, exchange-pair search) double as
test oracles for the dynamic structures built on top.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "UnionFind",
    "PartitionMatroid",
    "GraphicMatroid",
    "IndepState",
    "max_weight_base_bruteforce",
    "find_swap_pair_bruteforce",
    "parse_matroid_lines",
    "parse_matroid",
    "load_matroid",
]


class UnionFind:
    """Disjoint sets with path compression and union by rank."""

    __slots__ = ("parent", "rank")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)


class PartitionMatroid:
    """Generalized partition matroid: at most budget[i] elements from part i."""

    variant = "partition"

    def __init__(self, part_of: Sequence[int], budgets: Sequence[int]):
        self.part_of = np.asarray(part_of, dtype=np.int64)
        self.budgets = np.asarray(budgets, dtype=np.int64)
        if self.part_of.ndim != 1 or self.budgets.ndim != 1:
            raise ValueError("part_of and budgets must be one-dimensional")
        self.n = int(self.part_of.shape[0])
        self.num_parts = int(self.budgets.shape[0])
        if self.n and (self.part_of.min() < 0 or self.part_of.max() >= self.num_parts):
            raise ValueError("part indices out of range")
        sizes = np.bincount(self.part_of, minlength=self.num_parts)
        if np.any(self.budgets < 0) or np.any(self.budgets > sizes):
            raise ValueError("budgets must satisfy 0 <= budget <= part size")
        self.part_sizes = sizes
        self.rank = int(self.budgets.sum())
        self._members: list[list[int]] = [[] for _ in range(self.num_parts)]
        for e in range(self.n):
            self._members[self.part_of[e]].append(e)

    def part_members(self, i: int) -> list[int]:
        return self._members[i]

    def is_independent(self, elements: Iterable[int]) -> bool:
        counts = np.zeros(self.num_parts, dtype=np.int64)
        for e in elements:
            if not 0 <= e < self.n:
                raise ValueError(f"element {e} out of range")
            counts[self.part_of[e]] += 1
        return bool(np.all(counts <= self.budgets))

    def is_base(self, elements: Iterable[int]) -> bool:
        s = set(elements)
        return len(s) == self.rank and self.is_independent(s)


class GraphicMatroid:
    """Graphic matroid: elements are edges, independent sets are forests.

    The underlying graph must be connected, so the bases are its spanning
    trees and the rank is one less than the vertex count. Parallel edges are
    allowed; self-loops are not (a loop can never join an independent set).
    """

    variant = "graphic"

    def __init__(self, num_vertices: int, edges: Sequence[tuple[int, int]]):
        self.num_vertices = int(num_vertices)
        if self.num_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        self.edges: list[tuple[int, int]] = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u},{v}) out of range")
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) not allowed")
            self.edges.append((u, v))
        self.n = len(self.edges)
        self.rank = self.num_vertices - 1
        uf = UnionFind(self.num_vertices)
        components = self.num_vertices
        for u, v in self.edges:
            if uf.union(u, v):
                components -= 1
        if components != 1:
            raise ValueError("underlying graph must be connected")

    def is_independent(self, elements: Iterable[int]) -> bool:
        uf = UnionFind(self.num_vertices)
        for e in elements:
            if not 0 <= e < self.n:
                raise ValueError(f"element {e} out of range")
            u, v = self.edges[e]
            if not uf.union(u, v):
                return False
        return True

    def is_base(self, elements: Iterable[int]) -> bool:
        s = set(elements)
        return len(s) == self.rank and self.is_independent(s)


Matroid = PartitionMatroid | GraphicMatroid


class IndepState:
    """Incrementally grown independent set with O(~1) feasibility queries.

    Partition matroids keep per-part counters; graphic matroids keep a
    union-find over the vertices. ``ops`` counts can_add/add queries for the
    data-structure budgets reported by the solvers.
    """

    def __init__(self, matroid: Matroid, seed: Iterable[int] = ()):
        self.matroid = matroid
        self.chosen: set[int] = set()
        self.ops = 0
        if matroid.variant == "partition":
            self._counts = np.zeros(matroid.num_parts, dtype=np.int64)
        else:
            self._uf = UnionFind(matroid.num_vertices)
        for e in seed:
            if e in self.chosen:
                raise ValueError(f"duplicate seed element {e}")
            if not self._feasible(e):
                raise ValueError("seed set is not independent")
            self._insert(e)

    def _feasible(self, e: int) -> bool:
        m = self.matroid
        if not 0 <= e < m.n:
            raise ValueError(f"element {e} out of range")
        if m.variant == "partition":
            p = m.part_of[e]
            return self._counts[p] < m.budgets[p]
        u, v = m.edges[e]
        return not self._uf.connected(u, v)

    def _insert(self, e: int) -> None:
        m = self.matroid
        if m.variant == "partition":
            self._counts[m.part_of[e]] += 1
        else:
            u, v = m.edges[e]
            self._uf.union(u, v)
        self.chosen.add(e)

    def can_add(self, e: int) -> bool:
        if e in self.chosen:
            raise ValueError(f"element {e} already chosen")
        self.ops += 1
        return self._feasible(e)

    def add(self, e: int) -> None:
        if e in self.chosen:
            raise ValueError(f"element {e} already chosen")
        self.ops += 1
        if not self._feasible(e):
            raise ValueError(f"adding element {e} would violate independence")
        self._insert(e)

    def is_complete_base(self) -> bool:
        return len(self.chosen) == self.matroid.rank


def max_weight_base_bruteforce(
    matroid: Matroid,
    weights: Sequence[float],
    pinned: Iterable[int] = (),
) -> set[int]:
    """Exact maximum-weight base via the matroid greedy, ties to lowest index.

    ``pinned`` elements are forced into the base first (they must form an
    independent set); with decreasing weights elsewhere this matches the
    behaviour of a base that never evicts already-selected elements.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape[0] != matroid.n:
        raise ValueError("weight vector length mismatch")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    state = IndepState(matroid, seed=pinned)
    order = sorted(set(range(matroid.n)) - state.chosen, key=lambda e: (-w[e], e))
    for e in order:
        if state.can_add(e):
            state.add(e)
    return set(state.chosen)


def find_swap_pair_bruteforce(matroid: Matroid, base1: Iterable[int], base2: Iterable[int], i: int) -> int:
    """Smallest j in base2 - base1 with base1-i+j and base2-j+i both bases.

    Such a j always exists by the strong base exchange property.
    """
    b1, b2 = set(base1), set(base2)
    if b1 == b2:
        raise ValueError("bases must differ")
    if not (matroid.is_base(b1) and matroid.is_base(b2)):
        raise ValueError("inputs must be bases")
    if i not in b1 - b2:
        raise ValueError("pivot must lie in base1 minus base2")
    for j in sorted(b2 - b1):
        cand1 = (b1 - {i}) | {j}
        cand2 = (b2 - {j}) | {i}
        if matroid.is_independent(cand1) and matroid.is_independent(cand2):
            return j
    raise AssertionError("exchange partner must exist for valid bases")


# -- matroid file format ------------------------------------------------------
#
# partition: "partition <n> <h>" then h lines "budget elem elem ..."
# graphic:   "graphic <V> <E>"   then E lines "u v"


def parse_matroid_lines(lines: list[str], pos: int = 0) -> tuple[Matroid, int]:
    """Parse one matroid block starting at ``pos``; returns (matroid, next pos)."""
    while pos < len(lines) and not lines[pos]:
        pos += 1
    if pos >= len(lines):
        raise ValueError("empty matroid description")
    head = lines[pos].split()
    kind = head[0]
    if kind == "partition":
        if len(head) != 3:
            raise ValueError("partition header must be 'partition n h'")
        n, h = int(head[1]), int(head[2])
        if len(lines) - pos - 1 < h:
            raise ValueError(f"partition instance needs {h} part lines")
        part_of = np.full(n, -1, dtype=np.int64)
        budgets = np.zeros(h, dtype=np.int64)
        for i in range(h):
            toks = lines[pos + 1 + i].split()
            if not toks:
                raise ValueError(f"part line {i} is empty")
            budgets[i] = int(toks[0])
            for tok in toks[1:]:
                e = int(tok)
                if not 0 <= e < n:
                    raise ValueError(f"element {e} out of range")
                if part_of[e] != -1:
                    raise ValueError(f"element {e} listed in two parts")
                part_of[e] = i
        if np.any(part_of < 0):
            raise ValueError("every element must belong to exactly one part")
        return PartitionMatroid(part_of, budgets), pos + 1 + h
    if kind == "graphic":
        if len(head) != 3:
            raise ValueError("graphic header must be 'graphic V E'")
        v, m = int(head[1]), int(head[2])
        if len(lines) - pos - 1 < m:
            raise ValueError(f"graphic instance needs {m} edge lines")
        edges = []
        for i in range(m):
            toks = lines[pos + 1 + i].split()
            if len(toks) != 2:
                raise ValueError(f"edge line {i} must be 'u v'")
            edges.append((int(toks[0]), int(toks[1])))
        return GraphicMatroid(v, edges), pos + 1 + m
    raise ValueError(f"unknown matroid kind {kind!r}")


def parse_matroid(text: str) -> Matroid:
    from .oracles import clean_instance_lines

    matroid, _ = parse_matroid_lines(clean_instance_lines(text))
    return matroid


def load_matroid(path) -> Matroid:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matroid(fh.read())
