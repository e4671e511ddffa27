"""Path and caterpillar decompositions, nice form, and interval layouts."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import WeightedGraph


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class Flap:
    """A clique split into ``P`` (inside spine bag ``anchor``) and ``Q`` (outside the spine)."""

    P: frozenset[int]
    Q: frozenset[int]
    anchor: int

    def __post_init__(self):
        object.__setattr__(self, "P", frozenset(self.P))
        object.__setattr__(self, "Q", frozenset(self.Q))

    @property
    def p(self) -> int:
        return len(self.P)

    @property
    def q(self) -> int:
        return len(self.Q)

    @property
    def clique(self) -> frozenset[int]:
        return self.P | self.Q


@dataclass(frozen=True)
class CaterpillarDecomposition:
    """Spine bag sequence plus attached flaps.

    ``width`` is the declared width ``k``; when omitted it is the catwidth
    computed from the bags and flaps.
    """

    bags: tuple[frozenset[int], ...]
    flaps: tuple[Flap, ...] = ()
    width: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))
        object.__setattr__(self, "flaps", tuple(self.flaps))
        if self.width is None:
            object.__setattr__(self, "width", widths(self)[1])

    @property
    def spine_vertices(self) -> frozenset[int]:
        return frozenset().union(*self.bags)

    @property
    def flap_vertices(self) -> frozenset[int]:
        return frozenset().union(*(f.Q for f in self.flaps))

    def runs(self) -> dict[int, tuple[int, int]]:
        """First and last bag index of every spine vertex."""
        out: dict[int, tuple[int, int]] = {}
        for i, bag in enumerate(self.bags):
            for v in bag:
                first = out[v][0] if v in out else i
                out[v] = (first, i)
        return out

    def is_nice(self) -> bool:
        return all(len(a ^ b) == 1 for a, b in zip(self.bags, self.bags[1:]))


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: tuple
    message: str


def widths(d: CaterpillarDecomposition) -> tuple[int, int]:
    """``(spine width, catwidth)``."""
    spine = max((len(b) for b in d.bags), default=0) - 1
    cat = max([spine, *(f.p + f.q - 1 for f in d.flaps)])
    return spine, cat


def _contiguity_violations(d: CaterpillarDecomposition) -> list[Violation]:
    out = []
    runs = d.runs()
    for v, (first, last) in sorted(runs.items()):
        gaps = [i for i in range(first, last + 1) if v not in d.bags[i]]
        if gaps:
            out.append(
                Violation("interval", (v, gaps[0]), f"bags containing {v} are not contiguous (missing at bag {gaps[0]})")
            )
    return out


def validate(g: WeightedGraph, d: CaterpillarDecomposition) -> list[Violation]:
    """Every violated decomposition condition, each with a witness; ``[]`` means valid."""
    out: list[Violation] = []
    spine = d.spine_vertices
    qverts: dict[int, int] = {}
    for i, b in enumerate(d.bags):
        if not b:
            out.append(Violation("empty-bag", (i,), f"bag {i} is empty"))
        for v in b:
            if not 0 <= v < g.n:
                out.append(Violation("vertex-range", (v, i), f"bag {i} holds unknown vertex {v}"))
    for fi, f in enumerate(d.flaps):
        for v in f.Q:
            if v in qverts:
                out.append(Violation("flap-overlap", (v, qverts[v], fi), f"vertex {v} is in two flaps"))
            qverts[v] = fi

    covered = spine | set(qverts)
    for v in range(g.n):
        if v not in covered:
            out.append(Violation("cover", (v,), f"vertex {v} is in no bag and no flap"))

    out.extend(_contiguity_violations(d))

    pair_bags: set[tuple[int, int]] = set()
    for b in d.bags:
        s = sorted(b)
        for i, x in enumerate(s):
            for y in s[i + 1 :]:
                pair_bags.add((x, y))
    for e in g.edges:
        if e.u in qverts or e.v in qverts:
            flap_ids = {qverts.get(e.u), qverts.get(e.v)} - {None}
            if not any({e.u, e.v} <= d.flaps[fi].clique for fi in flap_ids):
                out.append(Violation("edge", (e.id,), f"flap edge {e.id}=({e.u},{e.v}) leaves its flap clique"))
        elif (e.u, e.v) not in pair_bags:
            out.append(Violation("edge", (e.id,), f"edge {e.id}=({e.u},{e.v}) is in no bag"))

    spine_w, _ = widths(d)
    if spine_w > d.width:
        out.append(Violation("width", (spine_w, d.width), f"spine width {spine_w} exceeds declared width {d.width}"))
    for fi, f in enumerate(d.flaps):
        if f.p < 1 or f.q < 1:
            out.append(Violation("flap-size", (fi,), f"flap {fi} has an empty side"))
        if f.p + f.q > d.width + 1:
            out.append(Violation("flap-size", (fi,), f"flap {fi} has p+q={f.p + f.q} > k+1={d.width + 1}"))
        if not 0 <= f.anchor < len(d.bags) or not f.P <= d.bags[f.anchor]:
            out.append(Violation("flap-anchor", (fi, f.anchor), f"flap {fi}: P is not inside anchor bag {f.anchor}"))
        if f.Q & spine:
            out.append(Violation("flap-spine", (fi,), f"flap {fi}: Q meets the spine"))
        members = sorted(f.clique)
        for i, x in enumerate(members):
            for y in members[i + 1 :]:
                if 0 <= x < g.n and 0 <= y < g.n and not g.has_edge(x, y):
                    out.append(Violation("flap-clique", (fi, x, y), f"flap {fi}: {x},{y} not adjacent"))
        leak = flap_separation_witness(g, f)
        if leak is not None:
            out.append(Violation("flap-separation", (fi, leak), f"flap {fi}: P does not separate Q from {leak}"))
    return out


def flap_separation_witness(g: WeightedGraph, f: Flap) -> int | None:
    """A vertex outside ``P|Q`` reachable from ``Q`` without crossing ``P``, or ``None``."""
    if not f.Q:
        return None
    start = min(f.Q)
    if not 0 <= start < g.n:
        return None
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            if y in seen or y in f.P:
                continue
            if y not in f.Q:
                return y
            seen.add(y)
            queue.append(y)
    return None


def _check_structure(d: CaterpillarDecomposition) -> None:
    if not d.bags:
        raise DecompositionError("decomposition has no bags")
    if any(not b for b in d.bags):
        raise DecompositionError("decomposition has an empty bag")
    bad = _contiguity_violations(d)
    if bad:
        raise DecompositionError(bad[0].message)
    for fi, f in enumerate(d.flaps):
        if not 0 <= f.anchor < len(d.bags) or not f.P <= d.bags[f.anchor]:
            raise DecompositionError(f"flap {fi}: P is not inside anchor bag {f.anchor}")


def _steps(a: frozenset[int], b: frozenset[int]) -> list[frozenset[int]]:
    """Intermediate bags strictly between ``a`` and ``b``; removals first, never empty."""
    out = []
    cur = set(a)
    drop = sorted(a - b)
    add = sorted(b - a)
    # with no common vertex one old vertex waits until the first addition
    keep = drop.pop() if not (a & b) and drop and add else None
    for v in drop:
        cur.discard(v)
        out.append(frozenset(cur))
    for i, v in enumerate(add):
        cur.add(v)
        out.append(frozenset(cur))
        if i == 0 and keep is not None:
            cur.discard(keep)
            out.append(frozenset(cur))
    if out and out[-1] == b:
        out.pop()
    return out


def nicify(d: CaterpillarDecomposition) -> CaterpillarDecomposition:
    """Insert intermediate bags so neighbouring bags differ by exactly one vertex."""
    _check_structure(d)
    if d.is_nice():
        return d
    bags: list[frozenset[int]] = [d.bags[0]]
    where = [0]
    for nxt in d.bags[1:]:
        if nxt == bags[-1]:
            where.append(len(bags) - 1)
            continue
        bags.extend(_steps(bags[-1], nxt))
        bags.append(nxt)
        where.append(len(bags) - 1)
    flaps = tuple(Flap(f.P, f.Q, where[f.anchor]) for f in d.flaps)
    return CaterpillarDecomposition(tuple(bags), flaps, d.width)


@dataclass(frozen=True)
class IntervalLayout:
    """Closed interval per vertex with pairwise distinct rational endpoints.

    Spine vertices get ``[first + o(v), last + 1 - o(v)]`` with a per-vertex
    offset ``o(v) < 1/2``.  Flap ``Q`` vertices get short nested intervals
    inside the anchor bag's span, after every left endpoint of that bag.
    """

    intervals: dict[int, tuple[Fraction, Fraction]]
    flap_cliques: tuple[frozenset[int], ...] = ()
    flap_vertices: frozenset[int] = field(default_factory=frozenset)

    def left(self, v: int) -> Fraction:
        return self.intervals[v][0]

    def right(self, v: int) -> Fraction:
        return self.intervals[v][1]

    def intersects(self, u: int, v: int) -> bool:
        (a, b), (c, e) = self.intervals[u], self.intervals[v]
        return a <= e and c <= b

    def order(self) -> list[int]:
        """Vertices sorted by left endpoint."""
        return sorted(self.intervals, key=lambda v: self.intervals[v][0])

    def root(self) -> int:
        return min(self.intervals, key=lambda v: self.intervals[v][0])

    def spine_overlaps(self) -> list[tuple[int, int]]:
        """Pairs ``(u, v)`` of spine vertices with intersecting intervals."""
        events = []
        for v, (a, b) in self.intervals.items():
            if v in self.flap_vertices:
                continue
            events.append((a, 0, v))
            events.append((b, 1, v))
        events.sort()
        active: set[int] = set()
        pairs = []
        for _, kind, v in events:
            if kind == 0:
                pairs.extend((min(u, v), max(u, v)) for u in active)
                active.add(v)
            else:
                active.discard(v)
        return sorted(pairs)

    def max_coverage(self, vertices: Iterable[int] | None = None) -> int:
        chosen = self.intervals if vertices is None else {v: self.intervals[v] for v in vertices}
        events = sorted((p, kind) for a, b in chosen.values() for p, kind in ((a, 0), (b, 1)))
        best = cur = 0
        for _, kind in events:
            cur += 1 if kind == 0 else -1
            best = max(best, cur)
        return best


def interval_layout(d: CaterpillarDecomposition) -> IntervalLayout:
    if not d.is_nice():
        raise DecompositionError("interval layout needs a nice decomposition")
    _check_structure(d)
    everything = d.spine_vertices | d.flap_vertices
    big = (max(everything) if everything else 0) + 2
    unit = Fraction(1, 2 * big)
    intervals: dict[int, tuple[Fraction, Fraction]] = {}
    for v, (first, last) in d.runs().items():
        off = (v + 1) * unit
        intervals[v] = (first + off, last + 1 - off)

    by_anchor: dict[int, list[Flap]] = {}
    for f in d.flaps:
        by_anchor.setdefault(f.anchor, []).append(f)
    for a, group in by_anchor.items():
        lo = a + Fraction(1, 2) - unit / 2
        span = (unit / 2) / len(group)
        for j, f in enumerate(group):
            base = lo + j * span
            step = span / (2 * (f.q + 1))
            for r, qv in enumerate(sorted(f.Q)):
                intervals[qv] = (base + (r + 1) * step, base + span - (r + 1) * step)
    return IntervalLayout(
        intervals,
        tuple(f.clique for f in d.flaps),
        d.flap_vertices,
    )


def layout_violations(g: WeightedGraph, d: CaterpillarDecomposition, layout: IntervalLayout) -> list[str]:
    """Layout invariants: distinct endpoints, edges intersect, spine coverage within width+1."""
    out = []
    points = [p for iv in layout.intervals.values() for p in iv]
    if len(set(points)) != len(points):
        out.append("interval endpoints are not pairwise distinct")
    for e in g.edges:
        if e.u in layout.intervals and e.v in layout.intervals and not layout.intersects(e.u, e.v):
            out.append(f"edge {e.id} joins disjoint intervals")
    spine_w, _ = widths(d)
    cov = layout.max_coverage(d.spine_vertices)
    if cov > spine_w + 1:
        out.append(f"spine coverage {cov} exceeds width+1={spine_w + 1}")
    for f in d.flaps:
        a = f.anchor
        for qv in f.Q:
            lo, hi = layout.intervals[qv]
            if not (a < lo < hi < a + 1):
                out.append(f"flap vertex {qv} leaves the span of bag {a}")
            if any(layout.left(pv) >= lo for pv in f.P):
                out.append(f"flap vertex {qv} starts before a P vertex")
    return out


def decomposition_from_bags(bags: Sequence[Iterable[int]], flaps: Sequence[Flap] = (), width: int | None = None):
    return CaterpillarDecomposition(tuple(frozenset(b) for b in bags), tuple(flaps), width)
