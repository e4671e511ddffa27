"""Text graph files and JSON documents.

Graph file, one record per line (``#`` starts a comment)::

    catspan-graph 1
    n 5
    k 2
    edge 0 1 7          # edge ids follow line order
    edge 1 2 3/2        # rationals as numerator/denominator
    bag 0 1 2           # spine bags in order
    flap 1 P 1 2 Q 4    # anchor bag index, then P and Q
    interval 0 1/14 29/14

``interval`` lines are derived from the nice form of the decomposition;
they are written for inspection and checked when read back.  A spanner
file is a graph file without bags.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from ..charging import ChargingScheme, DetourMove
from ..decomposition import CaterpillarDecomposition, Flap, interval_layout, nicify
from ..graph import GraphError, TreeEdges, WeightedGraph

FORMAT_VERSION = 1
HEADER = "catspan-graph"


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def fmt_number(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_number(text: str):
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad number {text!r}") from exc
    return x.numerator if x.denominator == 1 else x


@dataclass(frozen=True)
class GraphDocument:
    graph: WeightedGraph
    decomposition: CaterpillarDecomposition | None = None
    k: int | None = None


def dump_graph(g: WeightedGraph, d: CaterpillarDecomposition | None = None, k: int | None = None) -> str:
    lines = [f"{HEADER} {FORMAT_VERSION}", f"n {g.n}"]
    if k is None and d is not None:
        k = d.width
    if k is not None:
        lines.append(f"k {k}")
    for e in g.edges:
        lines.append(f"edge {e.u} {e.v} {fmt_number(e.weight)}")
    if d is not None:
        for bag in d.bags:
            lines.append("bag " + " ".join(str(v) for v in sorted(bag)))
        for f in d.flaps:
            lines.append(
                f"flap {f.anchor} P " + " ".join(map(str, sorted(f.P))) + " Q " + " ".join(map(str, sorted(f.Q)))
            )
        if d.bags:
            for v, (lo, hi) in sorted(_intervals(d).items()):
                lines.append(f"interval {v} {fmt_number(lo)} {fmt_number(hi)}")
    return "\n".join(lines) + "\n"


def _intervals(d: CaterpillarDecomposition) -> dict[int, tuple[Fraction, Fraction]]:
    return dict(interval_layout(nicify(d)).intervals)


def _ints(tokens, lineno) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(f"expected integers, got {' '.join(tokens)!r}", lineno) from exc


def parse_graph(text: str) -> GraphDocument:
    n = k = None
    edges: list[tuple[int, int, object]] = []
    bags: list[frozenset[int]] = []
    flaps: list[Flap] = []
    intervals: dict[int, tuple] = {}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if not seen_header:
            if tok != [HEADER, str(FORMAT_VERSION)]:
                raise FormatError(f"expected header '{HEADER} {FORMAT_VERSION}'", lineno)
            seen_header = True
            continue
        kind, rest = tok[0], tok[1:]
        if kind in ("n", "k"):
            if len(rest) != 1:
                raise FormatError(f"'{kind}' takes one value", lineno)
            (val,) = _ints(rest, lineno)
            if kind == "n":
                n = val
            else:
                k = val
        elif kind == "edge":
            if len(rest) != 3:
                raise FormatError("edge needs u v weight", lineno)
            u, v = _ints(rest[:2], lineno)
            try:
                edges.append((u, v, parse_number(rest[2])))
            except FormatError as exc:
                raise FormatError(str(exc), lineno) from exc
        elif kind == "bag":
            bags.append(frozenset(_ints(rest, lineno)))
        elif kind == "flap":
            if "P" not in rest or "Q" not in rest:
                raise FormatError("flap needs anchor, P list and Q list", lineno)
            ip, iq = rest.index("P"), rest.index("Q")
            if ip != 1 or iq < ip:
                raise FormatError("flap layout is 'flap anchor P ... Q ...'", lineno)
            (anchor,) = _ints(rest[:1], lineno)
            flaps.append(Flap(frozenset(_ints(rest[2:iq], lineno)), frozenset(_ints(rest[iq + 1 :], lineno)), anchor))
        elif kind == "interval":
            if len(rest) != 3:
                raise FormatError("interval needs v left right", lineno)
            (v,) = _ints(rest[:1], lineno)
            intervals[v] = (Fraction(parse_number(rest[1])), Fraction(parse_number(rest[2])))
        else:
            raise FormatError(f"unknown record {kind!r}", lineno)
    if not seen_header:
        raise FormatError("empty file")
    if n is None:
        raise FormatError("missing 'n' record")
    try:
        g = WeightedGraph(n, edges)
    except GraphError as exc:
        raise FormatError(str(exc)) from exc
    d = None
    if bags or flaps:
        if flaps and not bags:
            raise FormatError("flaps without bags")
        for f in flaps:
            if not 0 <= f.anchor < len(bags):
                raise FormatError(f"flap anchor {f.anchor} out of range")
        d = CaterpillarDecomposition(tuple(bags), tuple(flaps), k)
        if intervals:
            try:
                expected = _intervals(d)
            except ValueError as exc:
                raise FormatError(f"decomposition has no interval layout: {exc}") from exc
            if intervals != expected:
                raise FormatError("interval table does not match the decomposition")
    elif intervals:
        raise FormatError("intervals without bags")
    return GraphDocument(g, d, k)


def read_graph(path) -> GraphDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def subgraph(g: WeightedGraph, edges) -> WeightedGraph:
    """``g`` restricted to ``edges``; kept edges are renumbered in id order."""
    return WeightedGraph(g.n, [g.edges[e].endpoints + (g.edges[e].weight,) for e in sorted(edges)])


def match_edges(g: WeightedGraph, sub: WeightedGraph) -> frozenset[int]:
    """Edge ids of ``g`` named by ``sub``; endpoints and weights must agree."""
    if sub.n != g.n:
        raise FormatError(f"vertex count {sub.n} does not match the graph's {g.n}")
    out = set()
    for e in sub.edges:
        gid = g.edge_between(e.u, e.v)
        if gid is None:
            raise FormatError(f"edge {e.u}-{e.v} is not in the graph")
        if g.edges[gid].weight != e.weight:
            raise FormatError(f"edge {e.u}-{e.v} has weight {fmt_number(e.weight)}, graph says {fmt_number(g.edges[gid].weight)}")
        out.add(gid)
    return frozenset(out)


# ---------------------------------------------------------------------------
# JSON


def dumps(doc) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def scheme_to_json(g: WeightedGraph, s: ChargingScheme, extra: dict | None = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "graph": {"n": g.n, "edges": [[e.u, e.v, fmt_number(e.weight)] for e in g.edges]},
        "tree": {"root": s.tree.root, "edges": sorted(s.tree.edges)},
        "moves": [{"edge": m.edge, "path": list(m.path), "amount": fmt_number(m.amount)} for m in s.moves],
    }
    if extra:
        doc.update(extra)
    return doc


def scheme_from_json(doc: dict) -> tuple[WeightedGraph, ChargingScheme]:
    try:
        if doc.get("format_version") != FORMAT_VERSION:
            raise FormatError(f"unsupported format_version {doc.get('format_version')!r}")
        gd = doc["graph"]
        g = WeightedGraph(gd["n"], [(u, v, parse_number(w)) for u, v, w in gd["edges"]])
        tree = TreeEdges(frozenset(doc["tree"]["edges"]), doc["tree"]["root"])
        moves = tuple(DetourMove(m["edge"], tuple(m["path"]), Fraction(m["amount"])) for m in doc["moves"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed scheme document: {exc}") from exc
    return g, ChargingScheme(tree, moves)
