"""Look inside a charging scheme on a small 2-path.

Shows the monotone tree, a few detour moves, the per-edge Out/In/Net
ledger, and what happens when one non-tree edge is eliminated.
"""

from __future__ import annotations

from catspan.charging import eliminate_edge, verify_acyclic, verify_scheme
from catspan.spanner import prepare
from catspan.toolkit.generators import InstanceSpec, gen_kpath


def show_edge(g, e) -> str:
    x = g.edges[e]
    return f"{e}:{x.u}-{x.v}(w={x.weight})"


def main() -> None:
    g, d = gen_kpath(InstanceSpec(n=9, k=2, seed=3))
    prep = prepare(g, d)
    gr, s = prep.graph, prep.scheme
    tree = sorted(s.tree.edges)
    print(f"reduced graph: {gr.n} vertices, {gr.m} edges; tree has {len(tree)} edges")
    print("tree:", ", ".join(show_edge(gr, e) for e in tree))

    print(f"\n{len(s.moves)} detour moves, first five:")
    for m in s.moves[:5]:
        print(f"  {show_edge(gr, m.edge)} -> path {list(m.path)} x{m.amount}")

    rep = verify_scheme(gr, s)
    print(f"\nvalid={rep.valid} acyclic={verify_acyclic(gr, s).acyclic} value={rep.value}")
    busiest = sorted(s.tree.edges, key=lambda e: -rep.net(e))[:3]
    for e in busiest:
        print(f"  tree edge {show_edge(gr, e)} net charge {rep.net(e)}")

    victim = max((e for e in range(gr.m) if e not in s.tree.edges), key=lambda e: (rep.in_charge.get(e, 0), e))
    out = eliminate_edge(gr, s, victim)
    rest = set(range(gr.m)) - {victim}
    rep2 = verify_scheme(gr, out, rest)
    print(f"\nafter removing {show_edge(gr, victim)}: {len(out.moves)} moves, valid={rep2.valid}, value={rep2.value}")


if __name__ == "__main__":
    main()
