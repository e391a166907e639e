"""Randomized swap rounding from a convex combination of bases to one base.

The merge of two bases repeatedly picks an exchange pair (one element per
base difference, both swaps keeping both sets bases) and keeps one side with
probability proportional to its convex weight; each elementary step preserves
the coordinatewise expectation, and for monotone submodular objectives the
rounded value dominates the multilinear value in expectation.

Three routes:
  * generic   -- lowest-index pivot plus brute-force partner search; works for
    any matroid and is the distribution reference for tests;
  * partition -- per-part positional pairing of the base differences (any
    same-part pair is a valid exchange), linear time;
  * graphic   -- leaf-edge pivots with the partner found by binary-searching
    the leaf's gadget in the other tree, O(n log^2 n) per merge. Every tree
    vertex is expanded into a balanced gadget of degree many nodes mirrored
    into an Euler-tour forest, so connectivity queries drive the search, and
    contracted edges meld gadgets smaller-into-larger.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .euler_forest import EulerForest
from .matroids import GraphicMatroid, Matroid, PartitionMatroid, UnionFind, find_swap_pair_bruteforce

__all__ = [
    "BaseCombination",
    "MergeStats",
    "swap_round",
    "merge_bases",
    "merge_bases_partition",
    "merge_bases_graphic",
]


@dataclass
class BaseCombination:
    """Convex combination of matroid bases: sum(weights) = 1, weights > 0."""

    bases: list[frozenset]
    weights: list[float]

    def __post_init__(self):
        if len(self.bases) != len(self.weights):
            raise ValueError("bases and weights must align")
        if not self.bases:
            raise ValueError("combination must contain at least one base")
        if any(b <= 0 for b in self.weights):
            raise ValueError("combination weights must be positive")
        if abs(sum(self.weights) - 1.0) > 1e-6:
            raise ValueError("combination weights must sum to 1")
        size = len(self.bases[0])
        if any(len(b) != size for b in self.bases):
            raise ValueError("all bases must have equal cardinality")
        self.bases = [frozenset(b) for b in self.bases]

    @property
    def size(self) -> int:
        return len(self.bases)

    def point(self, n: int) -> np.ndarray:
        """Coordinate vector sum(beta * indicator(base))."""
        x = np.zeros(n)
        for beta, base in zip(self.weights, self.bases):
            for e in base:
                x[e] += beta
        return x


@dataclass
class MergeStats:
    """Instrumented effort of the graphic merges (forest work + gadget walks)."""

    merges: int = 0
    swaps: int = 0
    forest_work: int = 0
    gadget_rotations: int = 0
    gadget_walk: int = 0

    @property
    def total_work(self) -> int:
        return self.forest_work + self.gadget_rotations + self.gadget_walk


# -- generic and partition merges ------------------------------------------------


def merge_bases(matroid: Matroid, beta1: float, base1, beta2: float, base2, rng) -> set[int]:
    """Reference merge: lowest-index pivot, brute-force exchange partner."""
    b1, b2 = set(base1), set(base2)
    if not (matroid.is_base(b1) and matroid.is_base(b2)):
        raise ValueError("merge inputs must be bases")
    if beta1 <= 0 or beta2 <= 0:
        raise ValueError("merge weights must be positive")
    keep1 = beta1 / (beta1 + beta2)
    while b1 != b2:
        i = min(b1 - b2)
        j = find_swap_pair_bruteforce(matroid, b1, b2, i)
        if rng.random() < keep1:
            b2.discard(j)
            b2.add(i)
        else:
            b1.discard(i)
            b1.add(j)
    return b1


def merge_bases_partition(
    matroid: PartitionMatroid, beta1: float, base1, beta2: float, base2, rng
) -> set[int]:
    """Linear-time merge for partition matroids.

    Within one part any element of base1-base2 exchanges with any element of
    base2-base1 (both swaps stay within budget), so the differences are paired
    positionally in index order and resolved with one coin each.
    """
    if matroid.variant != "partition":
        raise ValueError("merge_bases_partition needs a partition matroid")
    b1, b2 = set(base1), set(base2)
    if not (matroid.is_base(b1) and matroid.is_base(b2)):
        raise ValueError("merge inputs must be bases")
    if beta1 <= 0 or beta2 <= 0:
        raise ValueError("merge weights must be positive")
    keep1 = beta1 / (beta1 + beta2)
    only1 = sorted(b1 - b2)
    only2 = sorted(b2 - b1)
    per_part: dict[int, tuple[list[int], list[int]]] = {}
    for e in only1:
        per_part.setdefault(int(matroid.part_of[e]), ([], []))[0].append(e)
    for e in only2:
        per_part.setdefault(int(matroid.part_of[e]), ([], []))[1].append(e)
    for part in sorted(per_part):
        d1, d2 = per_part[part]
        if len(d1) != len(d2):
            raise AssertionError("bases take unequal counts from a part")
        for i, j in zip(d1, d2):
            if rng.random() < keep1:
                b2.discard(j)
                b2.add(i)
            else:
                b1.discard(i)
                b1.add(j)
    if b1 != b2:
        raise AssertionError("partition merge failed to converge")
    return b1


# -- graphic fast path -----------------------------------------------------------


class _GadgetNode:
    __slots__ = ("fv", "left", "right", "parent", "prio", "attached", "pedge", "gadget")

    def __init__(self, fv: int, prio: float, attached: int):
        self.fv = fv
        self.left = None
        self.right = None
        self.parent = None
        self.prio = prio
        self.attached = attached  # original edge id this copy is wired to
        self.pedge = None  # forest edge id to the BST parent
        self.gadget = None


class _Gadget:
    __slots__ = ("root", "size", "class_id")

    def __init__(self, class_id: int):
        self.root: _GadgetNode | None = None
        self.size = 0
        self.class_id = class_id


class _GadgetTree:
    """One spanning tree of the contracted multigraph in expanded form.

    Vertex classes carry a treap-shaped gadget with one node per incident
    tree edge; gadget BST edges and edge attachments are mirrored into an
    Euler-tour forest so connectivity queries see the expanded tree. Treap
    priorities keep inserts and deletes at O(1) expected rotations, each
    rotation costing O(1) forest cut/link pairs.
    """

    def __init__(self, matroid: GraphicMatroid, edge_set, classes: UnionFind, rng, stats: MergeStats, leaf_hook=None):
        self.matroid = matroid
        self.classes = classes
        self.rng = rng
        self.stats = stats
        self.leaf_hook = leaf_hook
        self.forest = EulerForest(0)
        self.gadgets: dict[int, _Gadget] = {}
        self.edge_nodes: dict[int, tuple[_GadgetNode, _GadgetNode]] = {}
        self._ids = itertools.count()
        for eid in sorted(edge_set):
            u, v = matroid.edges[eid]
            na = self._attach_node(classes.find(u), eid)
            nb = self._attach_node(classes.find(v), eid)
            self.forest.link(na.fv, nb.fv, ("a", eid))
            self.edge_nodes[eid] = (na, nb)

    # -- gadget BST mechanics (mirrored into the forest) -------------------

    def _gadget_for(self, cls: int) -> _Gadget:
        g = self.gadgets.get(cls)
        if g is None:
            g = _Gadget(cls)
            self.gadgets[cls] = g
        return g

    def _attach_node(self, cls: int, eid: int) -> _GadgetNode:
        node = _GadgetNode(self.forest.new_vertex(), float(self.rng.random()), eid)
        self._bst_insert(self._gadget_for(cls), node)
        return node

    def _rotate_up(self, x: _GadgetNode) -> None:
        p = x.parent
        g = p.parent
        inner = x.right if p.left is x else x.left
        id_xp = x.pedge
        id_pg = p.pedge
        if g is not None:
            self.forest.cut(id_pg)
        if inner is not None:
            self.forest.cut(inner.pedge)
        if p.left is x:
            p.left = inner
            x.right = p
        else:
            p.right = inner
            x.left = p
        if inner is not None:
            inner.parent = p
        x.parent = g
        p.parent = x
        if g is not None:
            if g.left is p:
                g.left = x
            else:
                g.right = x
            self.forest.link(g.fv, x.fv, id_pg)
            x.pedge = id_pg
        else:
            x.pedge = None
            x.gadget.root = x
        if inner is not None:
            self.forest.link(p.fv, inner.fv, inner.pedge)
        p.pedge = id_xp
        self.stats.gadget_rotations += 1

    def _bst_insert(self, gadget: _Gadget, node: _GadgetNode) -> None:
        node.gadget = gadget
        node.left = node.right = node.parent = None
        node.pedge = None
        gadget.size += 1
        if gadget.root is None:
            gadget.root = node
            return
        cur = gadget.root
        while cur.right is not None:
            cur = cur.right
            self.stats.gadget_walk += 1
        cur.right = node
        node.parent = cur
        node.pedge = ("g", next(self._ids))
        self.forest.link(cur.fv, node.fv, node.pedge)
        while node.parent is not None and node.prio > node.parent.prio:
            self._rotate_up(node)

    def _bst_delete(self, node: _GadgetNode) -> None:
        gadget = node.gadget
        while node.left is not None or node.right is not None:
            child = node.left
            if child is None or (node.right is not None and node.right.prio > child.prio):
                child = node.right
            self._rotate_up(child)
        if node.parent is None:
            gadget.root = None
        else:
            self.forest.cut(node.pedge)
            if node.parent.left is node:
                node.parent.left = None
            else:
                node.parent.right = None
            node.parent = None
            node.pedge = None
        gadget.size -= 1
        node.gadget = None
        if gadget.size == 1 and self.leaf_hook is not None:
            self.leaf_hook(gadget.class_id)

    # -- tree-level operations ----------------------------------------------

    def remove_edge(self, eid: int) -> None:
        na, nb = self.edge_nodes.pop(eid)
        self.forest.cut(("a", eid))
        self._bst_delete(na)
        self._bst_delete(nb)

    def meld(self, cls_a: int, cls_b: int) -> _Gadget:
        """Combine the two class gadgets (smaller dismantled into larger)."""
        ga = self.gadgets.pop(cls_a, None) or _Gadget(cls_a)
        gb = self.gadgets.pop(cls_b, None) or _Gadget(cls_b)
        small, big = (ga, gb) if ga.size <= gb.size else (gb, ga)
        if small.size:
            nodes: list[_GadgetNode] = []
            stack = [small.root]
            while stack:
                cur = stack.pop()
                nodes.append(cur)
                if cur.left is not None:
                    stack.append(cur.left)
                if cur.right is not None:
                    stack.append(cur.right)
            for node in nodes:
                self.stats.gadget_walk += 1
                if node.pedge is not None:
                    self.forest.cut(node.pedge)
                    node.pedge = None
            for node in nodes:
                node.prio = float(self.rng.random())
                node.left = node.right = node.parent = None
                node.gadget = None
                self._bst_insert(big, node)
        return big

    def register(self, new_class: int, gadget: _Gadget) -> None:
        gadget.class_id = new_class
        self.gadgets[new_class] = gadget
        if gadget.size == 1 and self.leaf_hook is not None:
            self.leaf_hook(new_class)

    def find_partner(self, v_cls: int, u_cls: int) -> int:
        """Edge (v, w) of this tree with w on the path from v to u.

        Binary search down v's gadget: cutting the tour edge to the left
        child tells which side still reaches u; if neither the left subtree
        nor the current node's own attachment leads to u, descend right.
        """
        gadget = self.gadgets[v_cls]
        if gadget.size == 0:
            raise ValueError("vertex class has no edges in this tree")
        u_gadget = self.gadgets[u_cls]
        u_fv = u_gadget.root.fv
        cur = gadget.root
        while True:
            self.stats.gadget_walk += 1
            left = cur.left
            if left is not None:
                self.forest.cut(left.pedge)
                in_left = self.forest.same_tree(left.fv, u_fv)
                self.forest.link(cur.fv, left.fv, left.pedge)
                if in_left:
                    cur = left
                    continue
            eid = cur.attached
            na, nb = self.edge_nodes[eid]
            self.forest.cut(("a", eid))
            through_attachment = not self.forest.same_tree(cur.fv, u_fv)
            self.forest.link(na.fv, nb.fv, ("a", eid))
            if through_attachment:
                return eid
            cur = cur.right
            if cur is None:
                raise AssertionError("partner search exhausted a gadget")


def merge_bases_graphic(
    matroid: GraphicMatroid,
    beta1: float,
    base1,
    beta2: float,
    base2,
    rng,
    stats: MergeStats | None = None,
) -> set[int]:
    """Fast merge of two spanning trees via leaf pivots and gadget search."""
    if matroid.variant != "graphic":
        raise ValueError("merge_bases_graphic needs a graphic matroid")
    b1, b2 = set(base1), set(base2)
    if not (matroid.is_base(b1) and matroid.is_base(b2)):
        raise ValueError("merge inputs must be bases")
    if beta1 <= 0 or beta2 <= 0:
        raise ValueError("merge weights must be positive")
    if stats is None:
        stats = MergeStats()
    stats.merges += 1
    keep1 = beta1 / (beta1 + beta2)

    classes = UnionFind(matroid.num_vertices)
    leaf_queue: list[int] = []
    t1 = _GadgetTree(matroid, b1, classes, rng, stats, leaf_hook=leaf_queue.append)
    t2 = _GadgetTree(matroid, b2, classes, rng, stats)
    work_before = t1.forest.total_work + t2.forest.total_work

    def contract(eid: int, cls_a: int, cls_b: int) -> None:
        s1 = t1.meld(cls_a, cls_b)
        s2 = t2.meld(cls_a, cls_b)
        classes.union(cls_a, cls_b)
        merged = classes.find(cls_a)
        t1.register(merged, s1)
        t2.register(merged, s2)

    live1 = set(b1)
    live2 = set(b2)
    for eid in sorted(b1 & b2):
        u, v = matroid.edges[eid]
        cls_u, cls_v = classes.find(u), classes.find(v)
        t1.remove_edge(eid)
        t2.remove_edge(eid)
        contract(eid, cls_u, cls_v)
        live1.discard(eid)
        live2.discard(eid)

    for cls, gadget in list(t1.gadgets.items()):
        if gadget.size == 1 and classes.find(cls) == cls:
            leaf_queue.append(cls)

    while live1:
        v_cls = leaf_queue.pop()
        if classes.find(v_cls) != v_cls:
            continue
        gadget = t1.gadgets.get(v_cls)
        if gadget is None or gadget.size != 1:
            continue
        pivot = gadget.root.attached
        na, nb = t1.edge_nodes[pivot]
        cls_a, cls_b = na.gadget.class_id, nb.gadget.class_id
        u_cls = cls_b if cls_a == v_cls else cls_a
        partner = t2.find_partner(v_cls, u_cls)
        pa, pb = t2.edge_nodes[partner]
        w_cls = pa.gadget.class_id if pb.gadget.class_id == v_cls else pb.gadget.class_id
        stats.swaps += 1
        if rng.random() < keep1:
            # base2 adopts the pivot edge; it becomes common and contracts
            winner, merge_pair = pivot, (v_cls, u_cls)
            b2.discard(partner)
            b2.add(pivot)
        else:
            winner, merge_pair = partner, (v_cls, w_cls)
            b1.discard(pivot)
            b1.add(partner)
        t1.remove_edge(pivot)
        t2.remove_edge(partner)
        contract(winner, *merge_pair)
        live1.discard(pivot)
        live1.discard(partner)
        live2.discard(partner)
        live2.discard(pivot)

    stats.forest_work += t1.forest.total_work + t2.forest.total_work - work_before
    if b1 != b2:
        raise AssertionError("graphic merge failed to converge")
    return b1


# -- entry point -----------------------------------------------------------------


def swap_round(
    matroid: Matroid,
    combination: BaseCombination,
    rng,
    method: str = "auto",
    stats: MergeStats | None = None,
) -> set[int]:
    """Round a convex combination of bases to a single random base.

    ``method``: "auto" picks the fast route for the matroid variant,
    "generic" forces the brute-force reference route.
    """
    for base in combination.bases:
        if not matroid.is_base(base):
            raise ValueError("combination contains a non-base")
    if method not in ("auto", "generic"):
        raise ValueError(f"unknown rounding method {method!r}")
    current = set(combination.bases[0])
    gamma = combination.weights[0]
    for beta, base in zip(combination.weights[1:], combination.bases[1:]):
        if method == "generic":
            current = merge_bases(matroid, gamma, current, beta, base, rng)
        elif matroid.variant == "partition":
            current = merge_bases_partition(matroid, gamma, current, beta, base, rng)
        else:
            current = merge_bases_graphic(matroid, gamma, current, beta, base, rng, stats=stats)
        gamma += beta
    return current
