"""Charging schemes: model, verifiers, shortcuts, and constructors.

A detour move ``(e, P, x)`` takes ``x`` units of charge off edge ``e`` and
puts ``x`` units on every edge of the path ``P``, where ``e + P`` is a
simple cycle.  A scheme against spanning tree ``T`` has value ``v`` when

* every non-tree edge sends out at least one unit,
* every non-tree edge ends with non-positive net charge,
* every tree edge ends with net charge at most ``v``.

It is acyclic when only non-tree edges charge and "``e1`` charges a path
through ``e2``" admits a topological order.  Amounts are exact
:class:`~fractions.Fraction` values.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .decomposition import CaterpillarDecomposition, IntervalLayout, interval_layout
from .graph import GraphError, TreeEdges, WeightedGraph, tree_path
from .monotone import MonotoneTree, is_monotone


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class DetourMove:
    edge: int
    path: tuple[int, ...]
    amount: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))
        object.__setattr__(self, "amount", Fraction(self.amount))


@dataclass(frozen=True)
class ChargingScheme:
    tree: TreeEdges
    moves: tuple[DetourMove, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))

    def scaled(self, factor) -> ChargingScheme:
        f = Fraction(factor)
        return ChargingScheme(self.tree, tuple(DetourMove(m.edge, m.path, m.amount * f) for m in self.moves))


@dataclass(frozen=True)
class SchemeViolation:
    condition: str
    edge: int | None
    message: str


@dataclass
class SchemeReport:
    valid: bool
    value: Fraction
    violations: list[SchemeViolation]
    out_charge: dict[int, Fraction] = field(default_factory=dict)
    in_charge: dict[int, Fraction] = field(default_factory=dict)

    def net(self, e: int) -> Fraction:
        return self.in_charge.get(e, Fraction(0)) - self.out_charge.get(e, Fraction(0))


@dataclass
class AcyclicReport:
    acyclic: bool
    order: list[int] | None
    cycle: list[int] | None
    violations: list[SchemeViolation]


# ---------------------------------------------------------------------------
# path algebra


def path_vertices(g: WeightedGraph, start: int, path: Sequence[int]) -> list[int]:
    """Vertex sequence of an edge-id path walked from ``start``."""
    out = [start]
    for e in path:
        out.append(g.edges[e].other(out[-1]))
    return out


def _oriented_vertices(g: WeightedGraph, e: int, path: Sequence[int]) -> list[int]:
    edge = g.edges[e]
    first = g.edges[path[0]]
    start = edge.u if edge.u in (first.u, first.v) else edge.v
    return path_vertices(g, start, path)


def _edges_of_walk(g: WeightedGraph, walk: Sequence[int]) -> tuple[int, ...]:
    out = []
    for a, b in zip(walk, walk[1:]):
        e = g.edge_between(a, b)
        if e is None:
            raise SchemeError(f"walk step {a}-{b} is not an edge")
        out.append(e)
    return tuple(out)


def erase_loops(walk: Sequence[int]) -> list[int]:
    """Reduce a walk to a simple path with the same ends by cutting out loops."""
    out: list[int] = []
    where: dict[int, int] = {}
    for x in walk:
        if x in where:
            cut = where[x]
            for y in out[cut + 1 :]:
                del where[y]
            del out[cut + 1 :]
        else:
            where[x] = len(out)
            out.append(x)
    return out


def make_move(g: WeightedGraph, e: int, path: Sequence[int], amount=1) -> DetourMove:
    """Build a move with its path listed from ``e``'s smaller endpoint."""
    verts = _oriented_vertices(g, e, path)
    if verts[0] != g.edges[e].u:
        path = tuple(reversed(path))
    return DetourMove(e, tuple(path), Fraction(amount))


def detour_problem(g: WeightedGraph, m: DetourMove, present: frozenset[int] | set[int] | None = None) -> str | None:
    """Why ``m`` is not a detour (``None`` if it is)."""
    if not 0 <= m.edge < g.m:
        return f"unknown edge {m.edge}"
    if m.amount < 0:
        return "negative amount"
    if not m.path:
        return "empty path"
    for f in m.path:
        if not 0 <= f < g.m:
            return f"unknown path edge {f}"
        if present is not None and f not in present:
            return f"path edge {f} is not in the graph"
    if present is not None and m.edge not in present:
        return f"edge {m.edge} is not in the graph"
    if m.edge in m.path:
        return "charging edge lies on its own path"
    edge = g.edges[m.edge]
    try:
        verts = _oriented_vertices(g, m.edge, m.path)
    except GraphError:
        return "path does not start at an endpoint of the edge"
    if {verts[0], verts[-1]} != {edge.u, edge.v}:
        return "path does not join the edge's endpoints"
    if len(set(verts)) != len(verts):
        return "edge plus path is not a simple cycle"
    return None


def shortcut(g: WeightedGraph, m1: DetourMove, m2: DetourMove, amount=None) -> DetourMove:
    """Replace ``m2.edge`` inside ``m1.path`` by ``m2.path`` and erase loops.

    The amount defaults to ``m1.amount``; splitting charge is up to the caller.
    """
    if m2.edge not in m1.path:
        raise SchemeError(f"edge {m2.edge} is not on the path of the first detour")
    if m1.edge in m2.path:
        raise SchemeError(f"edge {m1.edge} lies on the path of the second detour")
    walk = _oriented_vertices(g, m1.edge, m1.path)
    pos = m1.path.index(m2.edge)
    a, b = walk[pos], walk[pos + 1]
    inner = _oriented_vertices(g, m2.edge, m2.path)
    if inner[0] != a:
        inner.reverse()
    new_walk = walk[:pos] + inner + walk[pos + 2 :]
    simple = erase_loops(new_walk)
    return make_move(g, m1.edge, _edges_of_walk(g, simple), m1.amount if amount is None else amount)


def merge_moves(moves: Iterable[DetourMove]) -> tuple[DetourMove, ...]:
    """Combine moves sharing a detour; drop zero amounts; sort deterministically."""
    total: dict[tuple[int, tuple[int, ...]], Fraction] = defaultdict(Fraction)
    for m in moves:
        total[(m.edge, m.path)] += m.amount
    return tuple(DetourMove(e, p, a) for (e, p), a in sorted(total.items()) if a != 0)


# ---------------------------------------------------------------------------
# verifiers


def aggregates(s: ChargingScheme) -> tuple[dict[int, Fraction], dict[int, Fraction]]:
    out: dict[int, Fraction] = defaultdict(Fraction)
    inn: dict[int, Fraction] = defaultdict(Fraction)
    for m in s.moves:
        out[m.edge] += m.amount
        for f in m.path:
            inn[f] += m.amount
    return dict(out), dict(inn)


def verify_scheme(g: WeightedGraph, s: ChargingScheme, edges: Iterable[int] | None = None) -> SchemeReport:
    """Check the detour invariants and the three charge conditions.

    ``edges`` restricts the graph to a subset of its edge ids (e.g. ``G - e``).
    The reported value is the largest net charge on a tree edge, floored at 0.
    """
    present = frozenset(range(g.m)) if edges is None else frozenset(edges)
    violations: list[SchemeViolation] = []
    for i, m in enumerate(s.moves):
        problem = detour_problem(g, m, present)
        if problem:
            violations.append(SchemeViolation("detour", m.edge, f"move {i}: {problem}"))
    missing_tree = sorted(s.tree.edges - present)
    for e in missing_tree:
        violations.append(SchemeViolation("tree", e, f"tree edge {e} is not in the graph"))
    out, inn = aggregates(s)
    zero = Fraction(0)
    value = zero
    for e in sorted(present):
        net = inn.get(e, zero) - out.get(e, zero)
        if e in s.tree.edges:
            value = max(value, net)
            continue
        if out.get(e, zero) < 1:
            violations.append(SchemeViolation("1", e, f"Out({e})={out.get(e, zero)} < 1"))
        if net > 0:
            violations.append(SchemeViolation("2", e, f"Net({e})={net} > 0"))
    return SchemeReport(not violations, value, violations, out, inn)


def _find_cycle(succ: dict[int, set[int]], nodes: set[int]) -> list[int]:
    color: dict[int, int] = {}
    for start in sorted(nodes):
        if start in color:
            continue
        stack = [(start, iter(sorted(succ.get(start, set()) & nodes)))]
        color[start] = 1
        trail = [start]
        while stack:
            x, it = stack[-1]
            y = next(it, None)
            if y is None:
                color[x] = 2
                stack.pop()
                trail.pop()
            elif color.get(y) == 1:
                return trail[trail.index(y) :]
            elif y not in color:
                color[y] = 1
                trail.append(y)
                stack.append((y, iter(sorted(succ.get(y, set()) & nodes))))
    return []


def verify_acyclic(g: WeightedGraph, s: ChargingScheme, edges: Iterable[int] | None = None) -> AcyclicReport:
    """Only non-tree edges charge, and charging admits a topological order."""
    present = set(range(g.m)) if edges is None else set(edges)
    violations: list[SchemeViolation] = []
    succ: dict[int, set[int]] = defaultdict(set)
    nodes = set(present)
    for m in s.moves:
        if m.amount <= 0:
            continue
        if m.edge in s.tree.edges:
            violations.append(SchemeViolation("4", m.edge, f"tree edge {m.edge} charges a path"))
        nodes.add(m.edge)
        for f in m.path:
            nodes.add(f)
            succ[m.edge].add(f)
    indeg = {x: 0 for x in nodes}
    for x, ys in succ.items():
        for y in ys:
            indeg[y] += 1
    ready = [x for x, c in indeg.items() if c == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        x = heapq.heappop(ready)
        order.append(x)
        for y in succ.get(x, ()):
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(ready, y)
    if len(order) != len(nodes):
        cycle = _find_cycle(succ, {x for x, c in indeg.items() if c > 0})
        violations.append(SchemeViolation("5", cycle[0] if cycle else None, f"charging cycle {cycle}"))
        return AcyclicReport(False, None, cycle, violations)
    return AcyclicReport(not violations, order, None, violations)


# ---------------------------------------------------------------------------
# edge elimination


def eliminate_edge(
    g: WeightedGraph, s: ChargingScheme, e: int, edges: Iterable[int] | None = None, check: bool = True
) -> ChargingScheme:
    """Rewrite ``s`` into a scheme that no longer uses non-tree edge ``e``.

    Every charge into ``e`` is shortcut through ``e``'s own detours, amount
    ``min`` of the two moves at a time; the leftover moves out of ``e`` are
    dropped.  Validity, acyclicity and value carry over to ``G - e``.
    """
    if e in s.tree.edges:
        raise SchemeError(f"edge {e} belongs to the tree")
    if check:
        rep = verify_scheme(g, s, edges)
        if not rep.valid:
            raise SchemeError(f"input scheme is invalid: {rep.violations[0].message}")
        if not verify_acyclic(g, s, edges).acyclic:
            raise SchemeError("input scheme is not acyclic")
    amounts: dict[tuple[int, tuple[int, ...]], Fraction] = defaultdict(Fraction)
    for m in s.moves:
        if m.amount > 0:
            amounts[(m.edge, m.path)] += m.amount
    while True:
        chargers = sorted(k for k, a in amounts.items() if a > 0 and e in k[1])
        if not chargers:
            break
        outs = sorted(k for k, a in amounts.items() if a > 0 and k[0] == e)
        if not outs:
            raise SchemeError(f"edge {e} is charged but never charges out")
        k1, k2 = chargers[0], outs[0]
        alpha = min(amounts[k1], amounts[k2])
        m1 = DetourMove(k1[0], k1[1], alpha)
        m2 = DetourMove(k2[0], k2[1], alpha)
        new = shortcut(g, m1, m2, alpha)
        amounts[k1] -= alpha
        amounts[k2] -= alpha
        amounts[(new.edge, new.path)] += alpha
        for k in (k1, k2):
            if amounts[k] == 0:
                del amounts[k]
    moves = [DetourMove(ed, p, a) for (ed, p), a in amounts.items() if ed != e and a > 0]
    return ChargingScheme(s.tree, merge_moves(moves))


# ---------------------------------------------------------------------------
# T² forest and the triangle-move schemes


@dataclass(frozen=True)
class T2Forest:
    """Parent links between edges of the completed graph.

    For a non-tree edge ``jk`` with ``left(j) < left(k)`` and ``i`` the tree
    parent of ``k``, the parent of ``jk`` is ``ij``; ``apex[jk] = i``.
    Tree edges have no parent.
    """

    parent: dict[int, int | None]
    apex: dict[int, int]
    later: dict[int, int]
    left: dict[int, Fraction]
    children: dict[int, tuple[int, ...]]

    def roots(self) -> list[int]:
        return sorted(e for e, p in self.parent.items() if p is None)


def build_t2_forest(g: WeightedGraph, t: MonotoneTree, layout: IntervalLayout) -> T2Forest:
    parent: dict[int, int | None] = {}
    apex: dict[int, int] = {}
    later: dict[int, int] = {}
    left: dict[int, Fraction] = {}
    for edge in g.edges:
        j, k = edge.u, edge.v
        if layout.left(j) > layout.left(k):
            j, k = k, j
        left[edge.id] = layout.left(k)
        later[edge.id] = k
        if edge.id in t.edges:
            parent[edge.id] = None
            continue
        i = t.parent[k]
        ij = g.edge_between(i, j)
        if ij is None:
            raise SchemeError(f"triangle edge {{{min(i, j)},{max(i, j)}}} is missing; the graph is not completed")
        apex[edge.id] = i
        parent[edge.id] = ij
    kids: dict[int, list[int]] = defaultdict(list)
    for e, p in parent.items():
        if p is not None:
            kids[p].append(e)
    children = {p: tuple(sorted(c, key=lambda x: (left[x], x))) for p, c in kids.items()}
    return T2Forest(parent, apex, later, left, children)


def _triangle_move(g: WeightedGraph, forest: T2Forest, t: MonotoneTree, a: int, b: int) -> DetourMove:
    """The unit move for the tour step ``a -> b`` between T² neighbours."""
    if forest.parent.get(a) == b:
        # a = jk charges j - i - k
        i, k = forest.apex[a], forest.later[a]
        j = g.edges[a].other(k)
    elif forest.parent.get(b) == a:
        # a = ij charges i - k - j, where b = jk
        i, k = forest.apex[b], forest.later[b]
        j = g.edges[b].other(k)
        return make_move(g, a, (t.parent_edge[k], b))
    else:  # pragma: no cover - tour steps always follow forest links
        raise SchemeError(f"{a} and {b} are not T2 neighbours")
    return make_move(g, a, (b, t.parent_edge[k]))


def _euler_tour(forest: T2Forest, root: int, allowed) -> list[int]:
    tour = [root]
    stack = [(root, iter([c for c in forest.children.get(root, ()) if c in allowed]))]
    while stack:
        node, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            if stack:
                tour.append(stack[-1][0])
        else:
            tour.append(nxt)
            stack.append((nxt, iter([c for c in forest.children.get(nxt, ()) if c in allowed])))
    return tour


def _tour_moves(g: WeightedGraph, forest: T2Forest, t: MonotoneTree, root: int, allowed) -> list[DetourMove]:
    """Unit moves of one component with every repeat appearance shortcut away.

    The tour is cut at the root into paths ending at the root.  Walking a
    path, a repeat is shortcut into the running charge as soon as it is met.
    """
    tour = _euler_tour(forest, root, allowed)
    cuts = [i for i, x in enumerate(tour) if x == root]
    moves: list[DetourMove] = []
    for lo, hi in zip(cuts, cuts[1:]):
        seq = tour[lo + 1 : hi + 1]
        seen: set[int] = set()
        running: DetourMove | None = None
        for idx, x in enumerate(seq[:-1]):
            step = _triangle_move(g, forest, t, x, seq[idx + 1])
            if x not in seen:
                seen.add(x)
                if running is not None:
                    moves.append(running)
                running = step
            elif running is not None and x in running.path:
                running = shortcut(g, running, step)
            elif running is not None:
                # loop erasure already removed x from the running path
                moves.append(running)
                running = None
        if running is not None:
            moves.append(running)
    return moves


def _require_monotone(g: WeightedGraph, t: MonotoneTree, layout: IntervalLayout) -> None:
    check = is_monotone(g, t.tree, layout)
    if not check.ok or t.root != layout.root():
        raise SchemeError(f"tree is not monotone (witness {check.witness})")


def flap_edge_ids(g: WeightedGraph, layout: IntervalLayout) -> frozenset[int]:
    fv = layout.flap_vertices
    return frozenset(e.id for e in g.edges if e.u in fv or e.v in fv)


def build_kpath_scheme(g: WeightedGraph, t: MonotoneTree, layout: IntervalLayout) -> ChargingScheme:
    """Triangle-move scheme for the spine edges (flap edges are left out)."""
    _require_monotone(g, t, layout)
    forest = build_t2_forest(g, t, layout)
    flap_edges = flap_edge_ids(g, layout)
    allowed = {e for e, p in forest.parent.items() if p is not None and e not in flap_edges}
    moves: list[DetourMove] = []
    for r in forest.roots():
        if r in flap_edges:
            continue
        moves.extend(_tour_moves(g, forest, t, r, allowed))
    return ChargingScheme(t.tree, merge_moves(moves))


def build_flap_scheme(g: WeightedGraph, t: MonotoneTree, d: CaterpillarDecomposition) -> ChargingScheme:
    """Scheme for the non-tree edges touching flap ``Q`` vertices.

    Inside a flap the same triangle moves are used, so charges stay in the
    flap clique.  A flap edge whose T² parent is a non-tree spine edge does
    not charge that edge; it becomes the root of its own group and charges
    the tree path between its endpoints instead, with amount
    ``max(1, charge received)``.
    """
    layout = interval_layout(d)
    _require_monotone(g, t, layout)
    for fi, f in enumerate(d.flaps):
        members = sorted(f.clique)
        for a_i, x in enumerate(members):
            for y in members[a_i + 1 :]:
                if not g.has_edge(x, y):
                    raise SchemeError(f"flap {fi}: {x},{y} not adjacent")
    forest = build_t2_forest(g, t, layout)
    flap_edges = flap_edge_ids(g, layout)
    nodes = {e for e in flap_edges if forest.parent[e] is not None}
    tree_roots = sorted({forest.parent[e] for e in nodes if forest.parent[forest.parent[e]] is None})
    escapes = sorted(e for e in nodes if forest.parent[e] not in nodes and forest.parent[forest.parent[e]] is not None)

    moves: list[DetourMove] = []
    for r in tree_roots:
        moves.extend(_tour_moves(g, forest, t, r, nodes))
    for rho in escapes:
        group = _tour_moves(g, forest, t, rho, nodes)
        received = sum((m.amount for m in group if rho in m.path), Fraction(0))
        moves.extend(group)
        edge = g.edges[rho]
        moves.append(make_move(g, rho, tree_path(g, t.parent, t.parent_edge, edge.u, edge.v), max(Fraction(1), received)))
    return ChargingScheme(t.tree, merge_moves(moves))


def combine_schemes(*schemes: ChargingScheme) -> ChargingScheme:
    trees = {s.tree for s in schemes}
    if len(trees) != 1:
        raise SchemeError("schemes target different trees")
    return ChargingScheme(schemes[0].tree, merge_moves(m for s in schemes for m in s.moves))


def build_scheme(g: WeightedGraph, t: MonotoneTree, d: CaterpillarDecomposition) -> ChargingScheme:
    """Spine and flap schemes together."""
    layout = interval_layout(d)
    return combine_schemes(build_kpath_scheme(g, t, layout), build_flap_scheme(g, t, d))
