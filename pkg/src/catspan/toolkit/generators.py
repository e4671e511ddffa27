"""Seeded k-path and k-caterpillar instances.

Draw order (part of the reproducibility contract): spine structure,
then flaps in profile order, then one weight per edge in edge-id order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..decomposition import CaterpillarDecomposition, Flap
from ..graph import WeightedGraph
from .rng import SplitMix64

WEIGHT_MODELS = ("uniform", "unit", "exp")


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceSpec:
    """What to generate.

    ``flaps`` lists ``(p, q, count)`` with ``p + q = k + 1``.  ``weights`` is
    ``uniform`` (integers in ``1..max_weight``), ``unit``, or ``exp``
    (rationals ``x/1000`` whose scale doubles with a random exponent, a
    cheap heavy-tailed stand-in).  With ``density < 1`` every new spine
    vertex keeps one random window edge and each other window edge with
    that probability; flap cliques are always complete.
    """

    n: int
    k: int
    flaps: tuple[tuple[int, int, int], ...] = ()
    weights: str = "uniform"
    seed: int = 0
    max_weight: int = 1000
    density: Fraction = field(default=Fraction(1))

    def __post_init__(self):
        object.__setattr__(self, "flaps", tuple(tuple(int(x) for x in f) for f in self.flaps))
        object.__setattr__(self, "density", Fraction(self.density))
        if self.k < 0:
            raise SpecError("k must be nonnegative")
        for p, q, c in self.flaps:
            if p < 1 or q < 1 or c < 0:
                raise SpecError(f"bad flap profile entry {(p, q, c)}")
            if p + q != self.k + 1:
                raise SpecError(f"flap ({p},{q}) needs p+q = k+1 = {self.k + 1}")
        if self.weights not in WEIGHT_MODELS:
            raise SpecError(f"unknown weight model {self.weights!r}")
        if not 0 < self.density <= 1:
            raise SpecError("density must lie in (0, 1]")
        if self.max_weight < 1:
            raise SpecError("max_weight must be positive")
        if self.spine_size < self.k + 1:
            raise SpecError(f"n={self.n} leaves fewer than k+1={self.k + 1} spine vertices")

    @property
    def spine_size(self) -> int:
        return self.n - sum(q * c for _, q, c in self.flaps)


def _draw_weight(rng: SplitMix64, spec: InstanceSpec):
    if spec.weights == "unit":
        return 1
    if spec.weights == "uniform":
        return 1 + rng.below(spec.max_weight)
    shift = rng.below(8)
    return Fraction(1 + rng.below(1000 << shift), 1000)


def _spine(rng: SplitMix64, spec: InstanceSpec, pairs: list[tuple[int, int]], have: set):
    k = spec.k
    window = list(range(k + 1))
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            pairs.append((i, j))
            have.add((i, j))
    bags = [frozenset(window)]
    for v in range(k + 1, spec.spine_size):
        window.sort()
        window.pop(rng.below(len(window)))
        if spec.density == 1:
            keep = list(window)
        else:
            anchor = window[rng.below(len(window))]
            num, den = spec.density.numerator, spec.density.denominator
            keep = [u for u in window if u == anchor or rng.chance(num, den)]
        for u in keep:
            pairs.append((u, v))
            have.add((u, v))
        window.append(v)
        bags.append(frozenset(window))
    return bags


def gen_kcaterpillar(spec: InstanceSpec) -> tuple[WeightedGraph, CaterpillarDecomposition]:
    """k-path spine with the flap profile attached, one clique per flap."""
    rng = SplitMix64(spec.seed)
    pairs: list[tuple[int, int]] = []
    have: set[tuple[int, int]] = set()
    bags = _spine(rng, spec, pairs, have)
    next_v = spec.spine_size
    flaps = []
    for p, q, count in spec.flaps:
        for _ in range(count):
            anchor = rng.below(len(bags))
            P = sorted(rng.shuffled(sorted(bags[anchor]))[:p])
            Q = list(range(next_v, next_v + q))
            next_v += q
            members = P + Q
            for i, a in enumerate(members):
                for b in members[i + 1 :]:
                    key = (min(a, b), max(a, b))
                    if key not in have:
                        pairs.append(key)
                        have.add(key)
            flaps.append(Flap(frozenset(P), frozenset(Q), anchor))
    triples = [(u, v, _draw_weight(rng, spec)) for u, v in pairs]
    g = WeightedGraph(spec.n, triples)
    return g, CaterpillarDecomposition(tuple(bags), tuple(flaps), spec.k)


def gen_kpath(spec: InstanceSpec) -> tuple[WeightedGraph, CaterpillarDecomposition]:
    if spec.flaps and any(c for _, _, c in spec.flaps):
        raise SpecError("a k-path has no flaps")
    return gen_kcaterpillar(spec)
