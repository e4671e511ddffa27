"""Degree bounding, metric completion, and lifting spanners back."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .decomposition import CaterpillarDecomposition, DecompositionError, Flap, IntervalLayout, widths
from .graph import NotConnectedError, WeightedGraph, _csr, as_weight, integral_scale


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class ReductionTrace:
    """How a transformed graph maps back onto the graph it came from.

    ``contracted`` holds the zero-weight copy edges (the set S),
    ``completion_paths`` the realizing path of each added edge,
    ``vertex_origin`` copy vertex -> original vertex, and ``edge_origin``
    transformed edge id -> original edge id (identity when absent).
    """

    source_edges: int
    target_edges: int
    contracted: frozenset[int] = frozenset()
    completion_paths: dict[int, tuple[int, ...]] = field(default_factory=dict)
    vertex_origin: dict[int, int] = field(default_factory=dict)
    edge_origin: dict[int, int] = field(default_factory=dict)

    @classmethod
    def identity(cls, m: int) -> ReductionTrace:
        return cls(m, m)


def compose(first: ReductionTrace, second: ReductionTrace) -> ReductionTrace:
    """Trace of applying ``first`` and then ``second``."""
    if second.source_edges != first.target_edges:
        raise ReductionError("traces do not chain")
    if second.contracted or second.vertex_origin or first.completion_paths:
        raise ReductionError("only a degree reduction followed by a completion can be composed")
    return ReductionTrace(
        first.source_edges,
        second.target_edges,
        first.contracted,
        dict(second.completion_paths),
        dict(first.vertex_origin),
        dict(first.edge_origin),
    )


def degree_reduce(
    g: WeightedGraph, d: CaterpillarDecomposition
) -> tuple[WeightedGraph, CaterpillarDecomposition, ReductionTrace]:
    """Swap every vertex for a fresh copy after each group of ``k`` bags.

    A boundary after bag ``b`` (``b+1`` a multiple of ``k``) is used only
    when more than ``k`` bags follow, so the trailing group is merged into
    its predecessor.  Each replacement of ``v`` by ``v'`` is two nice steps:
    add ``v'`` (sharing a bag with ``v``, joined by a zero-weight edge),
    then drop ``v``.  Edges keep their ids; copy edges are appended, then
    any same-weight twins needed to keep a flap's ``P`` a clique at its
    anchor (``edge_origin`` maps each twin to its original).
    """
    if not d.is_nice():
        raise DecompositionError("degree reduction needs a nice decomposition")
    k = max(widths(d)[0], 1)
    m = len(d.bags)
    cur = {v: v for v in d.spine_vertices}
    next_id = g.n
    origin: dict[int, int] = {}
    copy_edges: list[tuple[int, int, int]] = []
    bags: list[frozenset[int]] = []
    renamed_at: list[dict[int, int]] = []
    position: list[int] = []

    for i, bag in enumerate(d.bags):
        bags.append(frozenset(cur[v] for v in bag))
        renamed_at.append({v: cur[v] for v in bag})
        position.append(len(bags) - 1)
        if (i + 1) % k == 0 and m - 1 - i > k:
            live = set(bags[-1])
            for v in sorted(bag):
                old = cur[v]
                new = next_id
                next_id += 1
                origin[new] = v
                copy_edges.append((old, new, 0))
                live.add(new)
                bags.append(frozenset(live))
                live.discard(old)
                bags.append(frozenset(live))
                cur[v] = new
    extra = next_id - g.n

    spine_slot: dict[tuple[int, int], int] = {}
    for i, bag in enumerate(d.bags):
        for u in bag:
            for v in bag:
                if u < v:
                    spine_slot.setdefault((u, v), i)
    flap_of: dict[int, Flap] = {qv: f for f in d.flaps for qv in f.Q}

    triples = []
    for e in g.edges:
        u, v = e.u, e.v
        if u in flap_of or v in flap_of:
            f = flap_of.get(u) or flap_of.get(v)
            names = renamed_at[f.anchor]
            u, v = names.get(u, u), names.get(v, v)
        else:
            slot = spine_slot.get((u, v))
            if slot is None:
                raise ReductionError(f"edge {e.id} is in no bag")
            names = renamed_at[slot]
            u, v = names[u], names[v]
        triples.append((u, v, e.weight))
    s_ids = frozenset(range(g.m, g.m + len(copy_edges)))
    # a flap's P must stay a clique under the names used at its anchor;
    # where a spine edge was renamed elsewhere, add a same-weight twin
    present = {(min(u, v), max(u, v)) for u, v, _ in [*triples, *copy_edges]}
    twins: list[tuple[int, int, object]] = []
    edge_origin: dict[int, int] = {}
    for f in d.flaps:
        names = renamed_at[f.anchor]
        ps = sorted(f.P)
        for i, a in enumerate(ps):
            for b in ps[i + 1 :]:
                e = g.edge_between(a, b)
                x, y = sorted((names[a], names[b]))
                if e is None or (x, y) in present:
                    continue
                present.add((x, y))
                edge_origin[g.m + len(copy_edges) + len(twins)] = e
                twins.append((x, y, g.edges[e].weight))
    g2 = WeightedGraph(g.n + extra, [*triples, *copy_edges, *twins])

    flaps = tuple(
        Flap(frozenset(renamed_at[f.anchor][x] for x in f.P), f.Q, position[f.anchor]) for f in d.flaps
    )
    d2 = CaterpillarDecomposition(tuple(bags), flaps, max(d.width, widths(CaterpillarDecomposition(tuple(bags)))[0]))
    trace = ReductionTrace(g.m, g2.m, s_ids, {}, origin, edge_origin)
    return g2, d2, trace


def bag_positions(d_out: CaterpillarDecomposition, trace: ReductionTrace) -> dict[int, int]:
    """Number of bag positions per vertex, a replacer step (two bags) counting once."""
    counts: dict[int, int] = {}
    bags = d_out.bags
    i = 0
    while i < len(bags):
        step = bags[i]
        # an add bag followed by its drop bag is one replacer position
        if i + 1 < len(bags):
            added = bags[i] - bags[i - 1] if i else frozenset()
            if len(added) == 1 and next(iter(added)) in trace.vertex_origin and len(bags[i + 1]) == len(bags[i]) - 1:
                step = bags[i] | bags[i + 1]
                i += 1
        for v in step:
            counts[v] = counts.get(v, 0) + 1
        i += 1
    return counts


def _completion_pairs(g: WeightedGraph, layout: IntervalLayout) -> list[tuple[int, int]]:
    pairs = set(layout.spine_overlaps())
    for clique in layout.flap_cliques:
        members = sorted(clique)
        for i, x in enumerate(members):
            for y in members[i + 1 :]:
                pairs.add((x, y))
    return sorted(p for p in pairs if not g.has_edge(*p))


def _path_from_predecessors(g: WeightedGraph, pred: np.ndarray, src: int, dst: int) -> tuple[int, ...]:
    out = []
    x = dst
    while x != src:
        p = int(pred[x])
        if p < 0:
            raise NotConnectedError()
        out.append(g.edge_between(p, x))
        x = p
    return tuple(reversed(out))


def complete(g: WeightedGraph, layout: IntervalLayout) -> tuple[WeightedGraph, ReductionTrace]:
    """Add every missing edge allowed by the layout, weighted by graph distance."""
    if not g.is_connected():
        raise NotConnectedError()
    missing = _completion_pairs(g, layout)
    if not missing:
        return g, ReductionTrace.identity(g.m)
    sources = sorted({u for u, _ in missing})
    scale = integral_scale([e.weight for e in g.edges])
    added: list[tuple[int, int, object]] = []
    paths: dict[int, tuple[int, ...]] = {}
    if scale is not None:
        row = {s: i for i, s in enumerate(sources)}
        dist, pred = dijkstra(_csr(g, scale, None), directed=False, indices=sources, return_predecessors=True)
        for u, v in missing:
            path = _path_from_predecessors(g, pred[row[u]], u, v)
            w = as_weight(sum(g.edges[e].weight for e in path))
            paths[g.m + len(added)] = path
            added.append((u, v, w))
    else:
        from .graph import shortest_path

        for u, v in missing:
            sp = shortest_path(g, u, v)
            paths[g.m + len(added)] = sp.edges
            added.append((u, v, sp.distance))
    g2 = g.with_edges(added)
    return g2, ReductionTrace(g.m, g2.m, frozenset(), paths, {}, {})


def lift_spanner(spanner_edges: Iterable[int], trace: ReductionTrace) -> frozenset[int]:
    """Map a spanner of the transformed graph to an edge set of the source graph."""
    expanded: set[int] = set()
    for e in spanner_edges:
        if not 0 <= e < trace.target_edges:
            raise ReductionError(f"edge {e} does not belong to the transformed graph")
        if e in trace.completion_paths:
            expanded.update(trace.completion_paths[e])
        else:
            expanded.add(e)
    out = set()
    for e in expanded:
        if e in trace.contracted:
            continue
        o = trace.edge_origin.get(e, e)
        if not 0 <= o < trace.source_edges:
            raise ReductionError(f"edge {e} has no origin in the source graph")
        out.add(o)
    return frozenset(out)


def contract(g: WeightedGraph, edges: Iterable[int]) -> tuple[WeightedGraph, dict[int, int]]:
    """Contract ``edges``; vertices are renumbered densely by their smallest member.

    Parallel edges keep the lighter weight; loops vanish.
    """
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        a, b = find(g.edges[e].u), find(g.edges[e].v)
        if a != b:
            parent[max(a, b)] = min(a, b)
    reps = sorted({find(v) for v in range(g.n)})
    new_id = {r: i for i, r in enumerate(reps)}
    vmap = {v: new_id[find(v)] for v in range(g.n)}
    best: dict[tuple[int, int], object] = {}
    for e in g.edges:
        a, b = vmap[e.u], vmap[e.v]
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key not in best or e.weight < best[key]:
            best[key] = e.weight
    return WeightedGraph(len(reps), [(a, b, w) for (a, b), w in sorted(best.items())]), vmap


def exact_distance_check(g1: WeightedGraph, g2: WeightedGraph, vertices: Iterable[int] | None = None) -> bool:
    """True when both graphs have identical distances on ``vertices``."""
    from .graph import all_pairs_distances

    a = all_pairs_distances(g1)
    b = all_pairs_distances(g2)
    idx = np.arange(g1.n) if vertices is None else np.array(sorted(vertices))
    return bool(np.array_equal(a[np.ix_(idx, idx)], b[np.ix_(idx, idx)]))
