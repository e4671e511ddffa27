"""Monotone spanning trees over an interval layout.

A rooted tree is monotone when every parent's interval starts strictly
left of its child's.  Two constructions are provided: the left-to-right
scan that gives every vertex its lightest earlier neighbour (the lightest
monotone tree), and the recursive shortest-path construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .decomposition import CaterpillarDecomposition, DecompositionError, IntervalLayout, interval_layout
from .graph import GraphError, TreeEdges, WeightedGraph, minimum_spanning_tree, tree_parents


class MonotoneTreeError(ValueError):
    pass


@dataclass(frozen=True)
class MonotoneTree:
    tree: TreeEdges
    parent: dict[int, int]
    parent_edge: dict[int, int]

    @property
    def root(self) -> int:
        return self.tree.root

    @property
    def edges(self) -> frozenset[int]:
        return self.tree.edges

    def weight(self, g: WeightedGraph):
        return sum((g.edges[e].weight for e in self.tree.edges), 0)


class MonotoneCheck(NamedTuple):
    ok: bool
    witness: tuple[int, int] | None  # (child, parent) of the first bad link


def is_monotone(g: WeightedGraph, t: TreeEdges, layout: IntervalLayout) -> MonotoneCheck:
    """Root ``t`` at the leftmost vertex and test every parent link."""
    root = layout.root()
    try:
        parent, _ = tree_parents(g, TreeEdges(t.edges, root))
    except GraphError:
        return MonotoneCheck(False, None)
    for v in layout.order():
        if v == root:
            continue
        p = parent[v]
        if not layout.left(p) < layout.left(v):
            return MonotoneCheck(False, (v, p))
    return MonotoneCheck(True, None)


def _from_parents(g: WeightedGraph, root: int, parent: dict[int, int]) -> MonotoneTree:
    parent_edge = {}
    for v, p in parent.items():
        e = g.edge_between(v, p)
        if e is None:
            raise MonotoneTreeError(f"no edge between {v} and its parent {p}")
        parent_edge[v] = e
    return MonotoneTree(TreeEdges(frozenset(parent_edge.values()), root), dict(parent), parent_edge)


def monotone_candidates(g: WeightedGraph, layout: IntervalLayout, v: int) -> list[int]:
    """Neighbours of ``v`` whose interval starts earlier."""
    lv = layout.left(v)
    return sorted(u for u in g.neighbors(v) if layout.left(u) < lv)


def _nearest(g: WeightedGraph, v: int, candidates) -> int:
    best = None
    for u in sorted(candidates):
        e = g.edge_between(u, v)
        if e is None:
            raise MonotoneTreeError(f"vertices {u} and {v} share a bag but are not adjacent; complete the graph first")
        w = g.edges[e].weight
        if best is None or w < best[0]:
            best = (w, u)
    if best is None:
        raise MonotoneTreeError(f"vertex {v} has no earlier neighbour")
    return best[1]


def lightest_monotone_tree(g: WeightedGraph, d: CaterpillarDecomposition) -> MonotoneTree:
    """Left-to-right scan: each new vertex takes its nearest earlier bag-mate.

    Flap ``Q`` vertices are attached while their anchor bag is scanned,
    choosing the nearest vertex of ``P`` or of the flap's earlier ``Q``.
    """
    layout = interval_layout(d)
    if any(not b for b in d.bags):
        raise MonotoneTreeError("empty bag: introduction order is undefined")
    order = layout.order()
    root = order[0]
    flap_clique = {qv: f.clique for f in d.flaps for qv in f.Q}
    runs = d.runs()
    parent: dict[int, int] = {}
    for v in order[1:]:
        lv = layout.left(v)
        if v in flap_clique:
            pool = flap_clique[v]
        else:
            pool = d.bags[runs[v][0]]
        candidates = [u for u in pool if u != v and layout.left(u) < lv]
        parent[v] = _nearest(g, v, candidates)
    return _from_parents(g, root, parent)


def _monotone_path(g: WeightedGraph, layout: IntervalLayout, members: set[int], start: int, end: int) -> list[int]:
    """Lightest path from ``start`` to ``end`` using only left-to-right steps.

    Equal weights prefer more hops, then the smaller predecessor id.
    """
    order = sorted(members, key=layout.left)
    best: dict[int, tuple] = {start: (0, 0)}
    pred: dict[int, int] = {}
    for v in order:
        if v not in best:
            continue
        dv, hv = best[v]
        for u in g.neighbors(v):
            if u in members and layout.left(u) > layout.left(v):
                w = g.edges[g.edge_between(u, v)].weight
                key = (dv + w, hv - 1)
                if u not in best or key < best[u] or (key == best[u] and v < pred[u]):
                    best[u] = key
                    pred[u] = v
    if end not in best:
        raise MonotoneTreeError(f"no monotone path from {start} to {end}")
    path = [end]
    while path[-1] != start:
        path.append(pred[path[-1]])
    return path[::-1]


def _recurse(
    g: WeightedGraph,
    layout: IntervalLayout,
    members: set[int],
    mst_adj: dict[int, list[int]],
    parent: dict[int, int],
) -> None:
    start = min(members, key=layout.left)
    end = max(members, key=layout.right)
    spine = _monotone_path(g, layout, members, start, end)
    for a, b in zip(spine, spine[1:]):
        parent[b] = a
    on_path = set(spine)

    seen = set(on_path)
    for s in sorted(members, key=layout.left):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            for y in mst_adj[x]:
                if y in members and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        head = min(comp, key=layout.left)
        lh = layout.left(head)
        hooks = [p for p in spine if layout.left(p) < lh and layout.intersects(p, head)]
        parent[head] = _nearest(g, head, hooks)
        _recurse(g, layout, comp, mst_adj, parent)


def recursive_monotone_tree(g: WeightedGraph, d: CaterpillarDecomposition) -> MonotoneTree:
    """Recursive construction on the spine, flaps attached afterwards.

    A lightest monotone path runs from the leftmost interval to the one
    ending rightmost; every component of the MST minus that path hangs off
    it by an edge from the component's leftmost vertex, and is solved
    recursively.  Each flap ``Q`` vertex then takes its lightest edge into
    ``P`` or the flap's earlier ``Q`` vertices.
    """
    layout = interval_layout(d)
    spine_vertices = set(d.spine_vertices)
    mst = minimum_spanning_tree(g)
    mst_adj: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for e in sorted(mst.edges):
        a, b = g.edges[e].u, g.edges[e].v
        mst_adj[a].append(b)
        mst_adj[b].append(a)
    parent: dict[int, int] = {}
    _recurse(g, layout, spine_vertices, mst_adj, parent)
    for f in d.flaps:
        for qv in sorted(f.Q, key=layout.left):
            lq = layout.left(qv)
            parent[qv] = _nearest(g, qv, [u for u in f.clique if u != qv and layout.left(u) < lq])
    root = min(spine_vertices, key=layout.left)
    if len(parent) != g.n - 1:
        raise DecompositionError("decomposition does not cover every vertex")
    return _from_parents(g, root, parent)
