"""Build a certified light spanner for one seeded 2-caterpillar.

Run with ``python3 demos/quickstart.py``.
"""

from __future__ import annotations

from fractions import Fraction

from catspan.spanner import pipeline
from catspan.toolkit.generators import InstanceSpec, gen_kcaterpillar


def main() -> None:
    spec = InstanceSpec(n=80, k=2, flaps=((1, 2, 3), (2, 1, 2)), seed=7)
    g, d = gen_kcaterpillar(spec)
    print(f"input: {g.n} vertices, {g.m} edges, {len(d.bags)} bags, {len(d.flaps)} flaps")

    for eps in (Fraction(1, 10), Fraction(1, 2), Fraction(1)):
        res = pipeline(g, d, eps)
        c = res.certificate
        print(f"\neps = {eps}")
        print(f"  reduced graph      {res.prepared.graph.n} vertices, {res.prepared.graph.m} edges")
        print(f"  scheme value v     {c.value}")
        print(f"  stretch            {float(c.max_stretch):.4f}  (limit {float(1 + eps):.4f})")
        print(f"  w(G') / bound      {float(res.bound_ratio):.4f}")
        print(f"  lifted edges       {len(res.lifted)} of {g.m}")
        print(f"  lightness          {float(res.lightness):.3f} x MST")
        print(f"  certified          {c.certified}")


if __name__ == "__main__":
    main()
