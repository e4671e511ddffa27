"""Measured lightness against k^3/eps on a small seeded corpus.

Prints one row per (k, eps) with the worst lightness seen and its ratio to
k^3/eps.  Pass ``--seeds`` to widen the corpus.
"""

from __future__ import annotations

import argparse
from fractions import Fraction

from catspan.spanner import prepare, run
from catspan.toolkit.generators import gen_kcaterpillar
from catspan.toolkit.sweep import SweepConfig, corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=6)
    args = ap.parse_args()
    cfg = SweepConfig((1, 2, 3, 4), args.seeds, 20, 120, (Fraction(1, 10), Fraction(1, 2), Fraction(1)))

    worst: dict[tuple[int, Fraction], Fraction] = {}
    for spec in corpus(cfg):
        prep = prepare(*gen_kcaterpillar(spec))
        for eps in cfg.eps:
            res = run(prep, eps)
            key = (spec.k, eps)
            worst[key] = max(worst.get(key, Fraction(0)), res.lightness)

    print(f"{'k':>2} {'eps':>5} {'lightness':>10} {'k^3/eps':>8} {'ratio':>7}")
    for (k, eps), light in sorted(worst.items()):
        ref = Fraction(k**3) / eps
        print(f"{k:>2} {float(eps):>5.2f} {float(light):>10.3f} {float(ref):>8.1f} {float(light / ref):>7.4f}")


if __name__ == "__main__":
    main()
