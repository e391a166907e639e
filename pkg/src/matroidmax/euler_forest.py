"""Dynamic forest with link / cut / same-tree in O(log n) amortized time.

Each tree of the forest is represented by its circular Euler tour, stored as
a linear sequence in a splay tree keyed by implicit position. Sequence nodes
are either a vertex occurrence (one per vertex, also the handle for isolated
vertices) or one of the two directed arcs of a tree edge, so a tree with E
edges carries 2E arc nodes plus one occurrence per vertex.

The balancer is a splay tree: split and join at a handle are amortized
O(log n), which is the only contract the callers rely on. ``total_work``
counts rotations plus pointer walks for amortized-cost audits.
"""

from __future__ import annotations

from typing import Hashable, Iterable

__all__ = ["EulerForest"]


class _SeqNode:
    __slots__ = ("left", "right", "parent", "size", "arcs", "is_arc", "tag")

    def __init__(self, is_arc: bool, tag):
        self.left = None
        self.right = None
        self.parent = None
        self.size = 1
        self.arcs = 1 if is_arc else 0
        self.is_arc = is_arc
        self.tag = tag  # vertex id for occurrences, (edge_id, u, v) for arcs

    def __repr__(self) -> str:  # pragma: no cover
        kind = "arc" if self.is_arc else "occ"
        return f"<{kind} {self.tag}>"


class EulerForest:
    """Forest over integer vertices supporting link, cut and same_tree."""

    def __init__(self, num_vertices: int = 0):
        self._occ: list[_SeqNode] = []
        self._arcs: dict[Hashable, tuple[_SeqNode, _SeqNode]] = {}
        self._ends: dict[Hashable, tuple[int, int]] = {}
        self.rotations = 0
        self.total_work = 0
        self.op_count = 0
        for _ in range(num_vertices):
            self.new_vertex()

    # -- vertex / edge handles ----------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self._occ)

    def new_vertex(self) -> int:
        v = len(self._occ)
        self._occ.append(_SeqNode(False, v))
        return v

    def has_edge(self, edge_id: Hashable) -> bool:
        return edge_id in self._arcs

    def edge_endpoints(self, edge_id: Hashable) -> tuple[int, int]:
        return self._ends[edge_id]

    def edges(self) -> Iterable[Hashable]:
        return self._arcs.keys()

    # -- splay machinery ------------------------------------------------------

    def _update(self, x: _SeqNode) -> None:
        size = 1
        arcs = x.is_arc
        if x.left is not None:
            size += x.left.size
            arcs += x.left.arcs
        if x.right is not None:
            size += x.right.size
            arcs += x.right.arcs
        x.size = size
        x.arcs = arcs

    def _rotate(self, x: _SeqNode) -> None:
        p = x.parent
        g = p.parent
        if p.left is x:
            p.left = x.right
            if x.right is not None:
                x.right.parent = p
            x.right = p
        else:
            p.right = x.left
            if x.left is not None:
                x.left.parent = p
            x.left = p
        p.parent = x
        x.parent = g
        if g is not None:
            if g.left is p:
                g.left = x
            else:
                g.right = x
        self._update(p)
        self._update(x)
        self.rotations += 1
        self.total_work += 1

    def _splay(self, x: _SeqNode) -> _SeqNode:
        while x.parent is not None:
            p = x.parent
            g = p.parent
            if g is None:
                self._rotate(x)
            elif (g.left is p) == (p.left is x):
                self._rotate(p)
                self._rotate(x)
            else:
                self._rotate(x)
                self._rotate(x)
        return x

    def _join(self, a: _SeqNode | None, b: _SeqNode | None) -> _SeqNode | None:
        if a is None:
            return b
        if b is None:
            return a
        r = a
        while r.right is not None:
            r = r.right
            self.total_work += 1
        self._splay(r)
        r.right = b
        b.parent = r
        self._update(r)
        return r

    def _split_before(self, x: _SeqNode) -> tuple[_SeqNode | None, _SeqNode]:
        self._splay(x)
        left = x.left
        if left is not None:
            x.left = None
            left.parent = None
            self._update(x)
        return left, x

    def _split_after(self, x: _SeqNode) -> tuple[_SeqNode, _SeqNode | None]:
        self._splay(x)
        right = x.right
        if right is not None:
            x.right = None
            right.parent = None
            self._update(x)
        return x, right

    def _reroot(self, v: int) -> _SeqNode:
        """Rotate the circular tour of v's tree so it starts at v's occurrence."""
        occ = self._occ[v]
        before, rest = self._split_before(occ)
        return self._join(rest, before)

    def _index_of(self, x: _SeqNode) -> int:
        """Current position of x in its sequence (splays are order-preserving)."""
        self._splay(x)
        return x.left.size if x.left is not None else 0

    # -- public operations -----------------------------------------------------

    def same_tree(self, u: int, v: int) -> bool:
        self.op_count += 1
        if u == v:
            return True
        nu = self._splay(self._occ[u])
        self._splay(self._occ[v])
        return nu.parent is not None

    def link(self, u: int, v: int, edge_id: Hashable) -> None:
        """Join the trees of u and v by a new edge; they must be distinct."""
        self.op_count += 1
        if edge_id in self._arcs:
            raise ValueError(f"edge id {edge_id!r} already linked")
        nu = self._splay(self._occ[u])
        self._splay(self._occ[v])
        if u == v or nu.parent is not None:
            raise ValueError(f"link({u}, {v}) would close a cycle")
        ru = self._reroot(u)
        rv = self._reroot(v)
        fwd = _SeqNode(True, (edge_id, u, v))
        rev = _SeqNode(True, (edge_id, v, u))
        seq = self._join(ru, fwd)
        seq = self._join(seq, rv)
        self._join(seq, rev)
        self._arcs[edge_id] = (fwd, rev)
        self._ends[edge_id] = (u, v)

    def cut(self, edge_id: Hashable) -> None:
        """Remove an edge, splitting its tree in two."""
        self.op_count += 1
        if edge_id not in self._arcs:
            raise ValueError(f"unknown edge id {edge_id!r}")
        fwd, rev = self._arcs.pop(edge_id)
        del self._ends[edge_id]
        if self._index_of(fwd) < self._index_of(rev):
            first, second = fwd, rev
        else:
            first, second = rev, fwd
        # sequence = prefix [first] inner [second] suffix; the enclosed tour
        # becomes its own tree and prefix+suffix remain the other tree
        prefix, _ = self._split_before(first)
        _, suffix = self._split_after(second)
        _, inner_tail = self._split_after(first)
        assert inner_tail is not None, "tour between arc pair cannot be empty"
        self._split_before(second)
        self._join(prefix, suffix)

    def tour_arc_length(self, v: int) -> int:
        """Number of arc nodes in v's tour: twice the tree's edge count."""
        return self._splay(self._occ[v]).arcs

    def tree_size_nodes(self, v: int) -> int:
        return self._splay(self._occ[v]).size
