"""Weighted undirected graphs: shortest paths, MST, connectivity.

Weights are kept exact (``int`` or :class:`fractions.Fraction`); floats are
converted to the exact rational they represent.  Integral fractions are
normalized to ``int`` so that serialization round-trips bit-exactly.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

Weight = Union[int, Fraction]

# float64 holds every integer below 2**53 exactly
_EXACT_LIMIT = 2**52


class GraphError(ValueError):
    pass


class NotConnectedError(GraphError):
    def __init__(self, msg: str = "graph not connected"):
        super().__init__(msg)


def as_weight(w) -> Weight:
    """Normalize a weight to ``int`` or ``Fraction``; reject negatives."""
    if isinstance(w, bool):
        raise GraphError(f"invalid weight {w!r}")
    if isinstance(w, float):
        if not math.isfinite(w):
            raise GraphError(f"non-finite weight {w!r}")
        w = Fraction(w)
    elif isinstance(w, str):
        w = Fraction(w)
    elif not isinstance(w, (int, Fraction)):
        w = Fraction(w)
    if w < 0:
        raise GraphError(f"negative weight {w}")
    if isinstance(w, Fraction) and w.denominator == 1:
        return int(w.numerator)
    return w


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    weight: Weight

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.u, self.v)

    def other(self, x: int) -> int:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise GraphError(f"vertex {x} is not an endpoint of edge {self.id}")


class WeightedGraph:
    """Simple undirected graph on vertices ``0..n-1``.

    Edges get dense ids in insertion order; endpoints are stored with
    ``u < v``.  Instances are treated as immutable.
    """

    __slots__ = ("n", "edges", "adj", "_index")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, object]] = ()):
        if n < 0:
            raise GraphError("negative vertex count")
        self.n = n
        built: list[Edge] = []
        index: dict[tuple[int, int], int] = {}
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            a, b = (u, v) if u < v else (v, u)
            if (a, b) in index:
                raise GraphError(f"parallel edge ({a}, {b})")
            eid = len(built)
            built.append(Edge(eid, a, b, as_weight(w)))
            index[(a, b)] = eid
            adj[a].append((b, eid))
            adj[b].append((a, eid))
        for lst in adj:
            lst.sort()
        self.edges: tuple[Edge, ...] = tuple(built)
        self.adj = tuple(tuple(lst) for lst in adj)
        self._index = index

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_between(self, u: int, v: int) -> int | None:
        a, b = (u, v) if u < v else (v, u)
        return self._index.get((a, b))

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_between(u, v) is not None

    def weight(self, e: int) -> Weight:
        return self.edges[e].weight

    def neighbors(self, v: int) -> list[int]:
        return [x for x, _ in self.adj[v]]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def triples(self) -> list[tuple[int, int, Weight]]:
        return [(e.u, e.v, e.weight) for e in self.edges]

    def with_edges(self, extra: Iterable[tuple[int, int, object]]) -> WeightedGraph:
        """Return a copy with ``extra`` edges appended (ids continue densely)."""
        return WeightedGraph(self.n, [*self.triples(), *extra])

    def with_vertices(self, count: int, extra: Iterable[tuple[int, int, object]] = ()) -> WeightedGraph:
        return WeightedGraph(self.n + count, [*self.triples(), *extra])

    def is_connected(self, edges: Iterable[int] | None = None) -> bool:
        if self.n == 0:
            return True
        return len(reachable(self, 0, edges)) == self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n == other.n and self.triples() == other.triples()

    def __hash__(self) -> int:
        return hash((self.n, tuple(self.triples())))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class TreeEdges:
    edges: frozenset[int]
    root: int = 0


class ShortestPath(NamedTuple):
    distance: Weight
    edges: tuple[int, ...]


def reachable(g: WeightedGraph, src: int, edges: Iterable[int] | None = None) -> set[int]:
    allowed = None if edges is None else set(edges)
    seen = {src}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        for y, e in g.adj[x]:
            if y not in seen and (allowed is None or e in allowed):
                seen.add(y)
                queue.append(y)
    return seen


def dijkstra_exact(
    g: WeightedGraph, src: int, edges: Iterable[int] | None = None, limit: Weight | None = None
) -> dict[int, Weight]:
    """Exact single-source distances (only reached vertices are returned).

    ``edges`` restricts the graph to a subset of edge ids; vertices farther
    than ``limit`` are not settled.
    """
    allowed = None if edges is None else (edges if isinstance(edges, (set, frozenset)) else set(edges))
    dist: dict[int, Weight] = {src: 0}
    done: set[int] = set()
    heap: list[tuple[Weight, int]] = [(0, src)]
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        if limit is not None and d > limit:
            break
        done.add(x)
        for y, e in g.adj[x]:
            if allowed is not None and e not in allowed:
                continue
            nd = d + g.edges[e].weight
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return {v: dist[v] for v in done}


def shortest_path(g: WeightedGraph, u: int, v: int) -> ShortestPath | None:
    """Shortest ``u``-``v`` path, or ``None`` when ``v`` is unreachable.

    Among all shortest paths the lexicographically smallest edge-id
    sequence is returned.
    """
    for x in (u, v):
        if not 0 <= x < g.n:
            raise GraphError(f"vertex {x} out of range")
    to_v = dijkstra_exact(g, v)
    if u not in to_v:
        return None

    def tight(x: int):
        for y, e in sorted(g.adj[x], key=lambda t: t[1]):
            w = g.edges[e].weight
            if y in to_v and to_v[y] + w == to_v[x]:
                yield y, e, w

    def tight_reaches(start: int, banned: set[int]) -> bool:
        stack, seen = [start], {start}
        while stack:
            x = stack.pop()
            if x == v:
                return True
            for y, _, _ in tight(x):
                if y not in seen and y not in banned:
                    seen.add(y)
                    stack.append(y)
        return False

    path: list[int] = []
    visited = {u}
    x = u
    while x != v:
        for y, e, w in tight(x):
            if y in visited:
                continue
            # a positive tight step strictly lowers the remaining distance,
            # so it can never be forced back through a visited vertex
            if w > 0 or tight_reaches(y, visited):
                break
        else:  # pragma: no cover - tight edges always reach v
            raise GraphError("shortest path reconstruction failed")
        path.append(e)
        visited.add(y)
        x = y
    return ShortestPath(to_v[u], tuple(path))


def integral_scale(weights: Sequence[Weight]) -> int | None:
    """Smallest factor making every weight integral, if float-exact APSP is safe."""
    scale = 1
    for w in weights:
        if isinstance(w, Fraction):
            scale = math.lcm(scale, w.denominator)
    total = sum(weights) * scale if weights else 0
    if total >= _EXACT_LIMIT:
        return None
    return scale


def _csr(g: WeightedGraph, scale: int, edges: Iterable[int] | None) -> csr_matrix:
    ids = list(range(g.m)) if edges is None else sorted(edges)
    rows = np.fromiter((g.edges[e].u for e in ids), dtype=np.int64, count=len(ids))
    cols = np.fromiter((g.edges[e].v for e in ids), dtype=np.int64, count=len(ids))
    data = np.fromiter((float(g.edges[e].weight * scale) for e in ids), dtype=np.float64, count=len(ids))
    # explicit zeros stay in the structure and count as zero-weight edges
    return csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


def scaled_distances(
    g: WeightedGraph, edges: Iterable[int] | None = None, sources: Sequence[int] | None = None
) -> tuple[np.ndarray, int] | None:
    """APSP on weights multiplied by ``integral_scale``; entries are exact integers.

    Returns ``None`` when the scaled weights are too large for float64.
    """
    ids = list(range(g.m)) if edges is None else sorted(edges)
    scale = integral_scale([g.edges[e].weight for e in ids])
    if scale is None:
        return None
    mat = _csr(g, scale, ids)
    table = dijkstra(mat, directed=False, indices=sources)
    return table, scale


def all_pairs_distances(g: WeightedGraph, edges: Iterable[int] | None = None) -> np.ndarray:
    """Distance table; ``inf`` marks unreachable pairs.

    Entries are exact whenever the weights scale to integers below 2**52
    (always the case for integer weights); otherwise they fall back to
    exact Dijkstra rounded to float.
    """
    if g.n == 0:
        return np.zeros((0, 0))
    res = scaled_distances(g, edges)
    if res is not None:
        table, scale = res
        return table / scale if scale != 1 else table
    table = np.full((g.n, g.n), np.inf)
    for s in range(g.n):
        for t, d in dijkstra_exact(g, s, edges).items():
            table[s, t] = float(d)
    return table


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def minimum_spanning_tree(g: WeightedGraph, root: int = 0) -> TreeEdges:
    """Kruskal; equal weights are taken in edge-id order."""
    dsu = _DisjointSet(g.n)
    chosen = []
    for e in sorted(g.edges, key=lambda e: (e.weight, e.id)):
        if dsu.union(e.u, e.v):
            chosen.append(e.id)
    if len(chosen) != max(g.n - 1, 0):
        raise NotConnectedError()
    return TreeEdges(frozenset(chosen), root)


def subgraph_weight(g: WeightedGraph, edges: Iterable[int]) -> Weight:
    total: Weight = 0
    for e in edges:
        if not (isinstance(e, (int, np.integer)) and 0 <= e < g.m):
            raise GraphError(f"unknown edge id {e!r}")
        total += g.edges[e].weight
    return as_weight(total)


def is_spanning_tree(g: WeightedGraph, edges: Iterable[int]) -> bool:
    edges = set(edges)
    if len(edges) != max(g.n - 1, 0):
        return False
    dsu = _DisjointSet(g.n)
    return all(dsu.union(g.edges[e].u, g.edges[e].v) for e in edges)


def tree_parents(g: WeightedGraph, tree: TreeEdges) -> tuple[dict[int, int], dict[int, int]]:
    """Parent vertex and parent edge of every non-root vertex."""
    parent: dict[int, int] = {}
    parent_edge: dict[int, int] = {}
    seen = {tree.root}
    queue = deque([tree.root])
    while queue:
        x = queue.popleft()
        for y, e in g.adj[x]:
            if e in tree.edges and y not in seen:
                seen.add(y)
                parent[y] = x
                parent_edge[y] = e
                queue.append(y)
    if len(seen) != g.n:
        raise GraphError("tree edges do not span the graph")
    return parent, parent_edge


def tree_path(g: WeightedGraph, parent: dict[int, int], parent_edge: dict[int, int], a: int, b: int) -> tuple[int, ...]:
    """Edge ids of the tree path from ``a`` to ``b``."""
    up_a = [a]
    while up_a[-1] in parent:
        up_a.append(parent[up_a[-1]])
    pos = {x: i for i, x in enumerate(up_a)}
    up_b = [b]
    while up_b[-1] not in pos:
        up_b.append(parent[up_b[-1]])
    meet = up_b[-1]
    left = [parent_edge[x] for x in up_a[: pos[meet]]]
    right = [parent_edge[x] for x in up_b[:-1]]
    return tuple(left + right[::-1])
