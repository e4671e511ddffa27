"""Greedy spanner with forced tree edges, certification, and the full pipeline."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .charging import ChargingScheme, SchemeReport, build_scheme, verify_acyclic, verify_scheme
from .decomposition import CaterpillarDecomposition, interval_layout, nicify, validate
from .graph import (
    GraphError,
    NotConnectedError,
    TreeEdges,
    WeightedGraph,
    _csr,
    dijkstra_exact,
    integral_scale,
    is_spanning_tree,
    minimum_spanning_tree,
    subgraph_weight,
)
from .monotone import MonotoneTree, lightest_monotone_tree
from .reductions import ReductionTrace, complete, compose, degree_reduce, lift_spanner


def as_epsilon(eps) -> Fraction:
    """Exact value of ``eps``; floats are read through their shortest repr (0.1 -> 1/10)."""
    if isinstance(eps, float):
        eps = Fraction(repr(eps))
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    return eps


class GreedyStep(NamedTuple):
    edge: int
    distance: object  # d_{G'} at scan time, None when farther than the threshold
    accepted: bool


def greedy_steps(g: WeightedGraph, t: TreeEdges, epsilon) -> list[GreedyStep]:
    """Replayable log of the greedy scan.

    Start from ``T``; scan the other edges by ``(weight, id)`` and keep ``e``
    iff ``(1+eps) w(e) < d_{G'}(e)``.  Distances are computed by Dijkstra on
    ``G'`` cut off at ``(1+eps) w(e)``; a rejected edge logs the exact
    distance found.
    """
    eps = as_epsilon(epsilon)
    if not is_spanning_tree(g, t.edges):
        raise GraphError("tree edges do not span the graph")
    scale = integral_scale([e.weight for e in g.edges]) or None
    w = [e.weight * scale for e in g.edges] if scale else [e.weight for e in g.edges]
    adj: list[list[tuple[int, object]]] = [[] for _ in range(g.n)]
    for e in t.edges:
        a, b = g.edges[e].endpoints
        adj[a].append((b, w[e]))
        adj[b].append((a, w[e]))
    steps = []
    for e in sorted((x for x in range(g.m) if x not in t.edges), key=lambda x: (g.edges[x].weight, x)):
        u, v = g.edges[e].endpoints
        limit = (1 + eps) * w[e]
        dist = {u: 0}
        done = set()
        heap = [(0, u)]
        found = None
        while heap:
            d, x = heapq.heappop(heap)
            if x in done:
                continue
            if d > limit:
                break
            if x == v:
                found = d
                break
            done.add(x)
            for y, wy in adj[x]:
                nd = d + wy
                if nd <= limit and (y not in dist or nd < dist[y]):
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
        accepted = found is None
        if found is not None and scale:
            found = Fraction(found, scale) if scale != 1 else found
        steps.append(GreedyStep(e, found, accepted))
        if accepted:
            adj[u].append((v, w[e]))
            adj[v].append((u, w[e]))
    return steps


def greedy_spanner(g: WeightedGraph, t: TreeEdges, epsilon) -> frozenset[int]:
    steps = greedy_steps(g, t, epsilon)
    return frozenset(t.edges) | frozenset(s.edge for s in steps if s.accepted)


class Stretch(NamedTuple):
    value: Fraction
    witness: tuple[int, int] | None


def base_distances(g: WeightedGraph) -> np.ndarray | None:
    """Scaled APSP of ``g`` for reuse across :func:`max_stretch` calls (``None`` if not float-exact)."""
    scale = integral_scale([e.weight for e in g.edges])
    if scale is None or g.n <= 1:
        return None
    return dijkstra(_csr(g, scale, None), directed=False)


def max_stretch(g: WeightedGraph, spanner: Iterable[int], base: np.ndarray | None = None) -> Stretch:
    """Exact ``max d_{G'}(u,v) / d_G(u,v)`` over connected pairs.

    Pairs at distance 0 count as stretch 1 when ``G'`` also has them at 0
    and as infinite (``witness`` set, value ``-1``) otherwise.  ``base`` is
    an optional precomputed :func:`base_distances` table of ``g``.
    """
    sp = sorted(set(spanner))
    if g.n <= 1:
        return Stretch(Fraction(1), None)
    scale = integral_scale([e.weight for e in g.edges])
    if scale is not None:
        dg = base if base is not None else dijkstra(_csr(g, scale, None), directed=False)
        ds = dijkstra(_csr(g, scale, sp), directed=False)
    else:
        dg = np.full((g.n, g.n), np.inf)
        ds = np.full((g.n, g.n), np.inf)
        exact = {}
        for s in range(g.n):
            for x, d in dijkstra_exact(g, s).items():
                dg[s, x] = float(d)
                exact[(s, x)] = d
            for x, d in dijkstra_exact(g, s, sp).items():
                ds[s, x] = float(d)
                exact[(s, x, 1)] = d
    iu, ju = np.triu_indices(g.n, 1)
    a, b = dg[iu, ju], ds[iu, ju]
    reach = np.isfinite(a)
    broken = reach & ~np.isfinite(b)
    if broken.any():
        i = int(np.argmax(broken))
        return Stretch(Fraction(-1), (int(iu[i]), int(ju[i])))
    zero = reach & (a == 0)
    bad_zero = zero & (b > 0)
    if bad_zero.any():
        i = int(np.argmax(bad_zero))
        return Stretch(Fraction(-1), (int(iu[i]), int(ju[i])))
    live = reach & (a > 0)
    if not live.any():
        return Stretch(Fraction(1), None)
    ratio = np.where(live, b / np.where(live, a, 1), 0.0)
    top = ratio.max()
    cand = np.nonzero(ratio >= top * (1 - 1e-9))[0]
    if scale is not None:
        num = b[cand].astype(np.int64)
        den = a[cand].astype(np.int64)
        g_ = np.gcd(num, den)
        # the first pair (in row-major order) of each distinct exact ratio
        reduced, first = np.unique(np.stack([num // g_, den // g_], axis=1), axis=0, return_index=True)
        exact_ratios = [(Fraction(int(x), int(y)), int(cand[i])) for (x, y), i in zip(reduced, first)]
    else:
        exact_ratios = []
        for i in cand:
            u, v = int(iu[i]), int(ju[i])
            exact_ratios.append((Fraction(exact[(u, v, 1)]) / Fraction(exact[(u, v)]), int(i)))
    value = max(r for r, _ in exact_ratios)
    i = min(i for r, i in exact_ratios if r == value)
    best = Stretch(value, (int(iu[i]), int(ju[i])))
    return best


@dataclass(frozen=True)
class SpannerCertificate:
    spanner: frozenset[int]
    epsilon: Fraction
    max_stretch: Fraction
    witness: tuple[int, int] | None
    w_spanner: object
    w_tree: object
    w_mst: object
    value: Fraction | None
    bound_ok: bool
    certified: bool
    reason: str | None = None

    @property
    def stretch_ok(self) -> bool:
        return 0 <= self.max_stretch <= 1 + self.epsilon

    @property
    def lightness(self) -> Fraction:
        return Fraction(self.w_spanner) / Fraction(self.w_mst) if self.w_mst else Fraction(1)

    @property
    def bound(self) -> Fraction | None:
        """``(1 + v/eps) w(T)``."""
        if self.value is None:
            return None
        return (1 + self.value / self.epsilon) * Fraction(self.w_tree)


def certify(
    g: WeightedGraph,
    t: TreeEdges,
    spanner: Iterable[int],
    epsilon,
    scheme: ChargingScheme | None,
    report: SchemeReport | None = None,
    base: np.ndarray | None = None,
    acyclic: bool | None = None,
) -> SpannerCertificate:
    """Measure stretch and weights, and check ``w(G') <= (1 + v/eps) w(T)``.

    ``v`` comes from verifying ``scheme``; without a valid acyclic scheme
    the certificate is marked uncertified and ``bound_ok`` is false.
    """
    eps = as_epsilon(epsilon)
    sp = frozenset(spanner)
    if not t.edges <= sp:
        raise GraphError("spanner does not contain the tree")
    st = max_stretch(g, sp, base)
    w_sp = subgraph_weight(g, sp)
    w_t = subgraph_weight(g, t.edges)
    w_mst = subgraph_weight(g, minimum_spanning_tree(g).edges)
    reason = None
    value = None
    if scheme is None:
        reason = "no charging scheme supplied"
    else:
        if scheme.tree.edges != t.edges:
            reason = "scheme targets a different tree"
        else:
            rep = report or verify_scheme(g, scheme)
            if acyclic is None:
                acyc = verify_acyclic(g, scheme)
                acyclic, why = acyc.acyclic, (acyc.violations[0].message if acyc.violations else "")
            else:
                why = "see verify_acyclic"
            value = rep.value
            if not rep.valid:
                reason = f"scheme invalid: {rep.violations[0].message}"
            elif not acyclic:
                reason = f"scheme not acyclic: {why}"
    bound_ok = reason is None and Fraction(w_sp) <= (1 + value / eps) * Fraction(w_t)
    stretch_ok = 0 <= st.value <= 1 + eps
    if reason is None and not stretch_ok:
        reason = f"stretch {st.value} exceeds {1 + eps}"
    if reason is None and not bound_ok:
        reason = "weight bound fails"
    return SpannerCertificate(sp, eps, st.value, st.witness, w_sp, w_t, w_mst, value, bound_ok, reason is None, reason)


# ---------------------------------------------------------------------------
# pipeline


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class Prepared:
    """Everything upstream of the greedy step; independent of epsilon."""

    source: WeightedGraph
    graph: WeightedGraph
    decomposition: CaterpillarDecomposition
    trace: ReductionTrace
    tree: MonotoneTree
    scheme: ChargingScheme
    report: SchemeReport
    acyclic: bool
    base: np.ndarray | None = None
    source_base: np.ndarray | None = None


@dataclass(frozen=True)
class PipelineResult:
    prepared: Prepared
    certificate: SpannerCertificate
    lifted: frozenset[int]
    lifted_stretch: Fraction
    lifted_witness: tuple[int, int] | None
    lifted_weight: object
    mst: object

    @property
    def lightness(self) -> Fraction:
        return Fraction(self.lifted_weight) / Fraction(self.mst) if self.mst else Fraction(1)

    @property
    def bound_ratio(self) -> Fraction | None:
        b = self.certificate.bound
        return None if not b else Fraction(self.certificate.w_spanner) / b


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except Exception as exc:  # noqa: BLE001 - re-raised with the stage tag
        raise PipelineError(name, exc) from exc


def prepare(g: WeightedGraph, d: CaterpillarDecomposition) -> Prepared:
    """Nice form, degree bound, completion, monotone tree, and scheme."""
    problems = validate(g, d)
    if problems:
        raise PipelineError("validate", GraphError(problems[0].message))
    if not g.is_connected():
        raise PipelineError("validate", NotConnectedError())
    d1 = _stage("nicify", nicify, d)
    g2, d2, tr1 = _stage("degree_reduce", degree_reduce, g, d1)
    layout = _stage("interval_layout", interval_layout, d2)
    g3, tr2 = _stage("complete", complete, g2, layout)
    tree = _stage("monotone_tree", lightest_monotone_tree, g3, d2)
    scheme = _stage("scheme", build_scheme, g3, tree, d2)
    report = _stage("verify_scheme", verify_scheme, g3, scheme)
    acyclic = _stage("verify_acyclic", verify_acyclic, g3, scheme).acyclic
    return Prepared(
        g, g3, d2, compose(tr1, tr2), tree, scheme, report, acyclic, base_distances(g3), base_distances(g)
    )


def run(prep: Prepared, epsilon) -> PipelineResult:
    g3, tree = prep.graph, prep.tree.tree
    spanner = _stage("greedy", greedy_spanner, g3, tree, epsilon)
    cert = _stage("certify", certify, g3, tree, spanner, epsilon, prep.scheme, prep.report, prep.base, prep.acyclic)
    lifted = _stage("lift", lift_spanner, spanner, prep.trace)
    st = _stage("lift", max_stretch, prep.source, lifted, prep.source_base)
    w_lift = subgraph_weight(prep.source, lifted)
    mst = subgraph_weight(prep.source, minimum_spanning_tree(prep.source).edges)
    return PipelineResult(prep, cert, lifted, st.value, st.witness, w_lift, mst)


def pipeline(g: WeightedGraph, d: CaterpillarDecomposition, epsilon) -> PipelineResult:
    """Certified spanner of the reduced graph, lifted back onto ``g``."""
    as_epsilon(epsilon)
    return run(prepare(g, d), epsilon)
