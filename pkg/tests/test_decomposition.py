from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given

from catspan.decomposition import (
    CaterpillarDecomposition,
    DecompositionError,
    Flap,
    flap_separation_witness,
    interval_layout,
    layout_violations,
    nicify,
    validate,
    widths,
)
from catspan.graph import WeightedGraph
from catspan.toolkit.generators import gen_kcaterpillar

from conftest import instance_specs


def conditions(report):
    return {v.condition for v in report}


class TestValidate:
    def test_single_bag(self):
        g = WeightedGraph(2, [(0, 1, 1)])
        d = CaterpillarDecomposition(({0, 1},))
        assert validate(g, d) == []
        assert widths(d) == (1, 1)

    def test_broken_run(self):
        g = WeightedGraph(2, [(0, 1, 1)])
        d = CaterpillarDecomposition(({0}, {1}, {0}))
        report = validate(g, d)
        assert "interval" in conditions(report)
        bad = next(v for v in report if v.condition == "interval")
        assert bad.witness == (0, 1)

    def test_edge_outside_bags(self):
        g = WeightedGraph(3, [(0, 1, 1), (0, 2, 1)])
        d = CaterpillarDecomposition(({0, 1}, {1, 2}))
        report = validate(g, d)
        assert [v.witness for v in report if v.condition == "edge"] == [(1,)]

    def test_uncovered_vertex(self):
        g = WeightedGraph(3, [(0, 1, 1)])
        assert "cover" in conditions(validate(g, CaterpillarDecomposition(({0, 1},))))

    def test_declared_width_too_small(self):
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        assert "width" in conditions(validate(g, CaterpillarDecomposition(({0, 1, 2},), (), 1)))

    def test_flap_must_be_separated(self):
        # Q={3} hangs off P={1,2} but also touches 0
        g = WeightedGraph(4, [(0, 1, 1), (0, 2, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1), (0, 3, 1)])
        f = Flap({1, 2}, {3}, 0)
        d = CaterpillarDecomposition(({0, 1, 2},), (f,), 2)
        assert flap_separation_witness(g, f) == 0
        assert {"flap-separation", "edge"} <= conditions(validate(g, d))

    def test_flap_must_be_clique(self):
        g = WeightedGraph(4, [(0, 1, 1), (0, 2, 1), (1, 2, 1), (1, 3, 1)])
        d = CaterpillarDecomposition(({0, 1, 2},), (Flap({1, 2}, {3}, 0),), 2)
        assert "flap-clique" in conditions(validate(g, d))

    def test_flap_anchor_must_hold_p(self):
        g = WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)])
        d = CaterpillarDecomposition(({0, 1}, {1, 2}), (Flap({1, 2}, {3}, 0),), 2)
        assert "flap-anchor" in conditions(validate(g, d))

    def test_widths_with_flap(self):
        d = CaterpillarDecomposition(({0, 1, 2}, {1, 2, 3}), (Flap({1, 2}, {4}, 0),))
        assert widths(d) == (2, 2)

    @given(instance_specs())
    def test_generated_instances_validate(self, spec):
        g, d = gen_kcaterpillar(spec)
        assert validate(g, d) == []
        assert widths(d) == (spec.k, spec.k)
        for f in d.flaps:
            assert flap_separation_witness(g, f) is None


class TestNicify:
    def test_disjoint_bags(self):
        d = nicify(CaterpillarDecomposition(({0, 1}, {2, 3})))
        assert d.is_nice()
        assert d.bags[0] == {0, 1} and d.bags[-1] == {2, 3}
        assert all(d.bags)
        assert widths(d)[0] == 1

    def test_idempotent_on_nice_input(self):
        d = CaterpillarDecomposition(({0}, {0, 1}, {1}))
        assert nicify(d) is d

    def test_duplicate_bags_merge(self):
        d = nicify(CaterpillarDecomposition(({0, 1}, {0, 1}, {1})))
        assert d.bags == (frozenset({0, 1}), frozenset({1}))

    def test_invalid_input(self):
        with pytest.raises(DecompositionError):
            nicify(CaterpillarDecomposition(({0}, {1}, {0})))

    def test_flap_anchor_follows_bag(self):
        d = CaterpillarDecomposition(({0, 1}, {2, 3}), (Flap({2, 3}, {4}, 1),))
        n = nicify(d)
        assert n.flaps[0].P <= n.bags[n.flaps[0].anchor]

    @given(instance_specs())
    def test_properties(self, spec):
        g, d = gen_kcaterpillar(spec)
        n = nicify(d)
        assert n.is_nice()
        assert validate(g, n) == []
        assert widths(n) == widths(d)
        assert nicify(n) == n
        for f, f2 in zip(d.flaps, n.flaps):
            assert n.bags[f2.anchor] == d.bags[f.anchor]


class TestLayout:
    def test_staircase(self):
        lay = interval_layout(CaterpillarDecomposition(({0}, {0, 1}, {1})))
        assert lay.left(0) < lay.left(1) < lay.right(0) < lay.right(1)

    def test_single_bag(self):
        lay = interval_layout(CaterpillarDecomposition(({0, 1, 2},)))
        assert all(lay.intersects(u, v) for u in range(3) for v in range(3))
        assert lay.max_coverage() == 3

    def test_rejects_non_nice(self):
        with pytest.raises(DecompositionError):
            interval_layout(CaterpillarDecomposition(({0, 1}, {2, 3})))

    def test_rational_endpoints(self):
        lay = interval_layout(CaterpillarDecomposition(({0}, {0, 1})))
        assert all(isinstance(x, Fraction) for iv in lay.intervals.values() for x in iv)

    def test_flap_intervals_sit_inside_anchor(self):
        d = CaterpillarDecomposition(({0, 1}, {0, 1, 2}), (Flap({1}, {3}, 1), Flap({1, 2}, {4}, 1)), 2)
        lay = interval_layout(d)
        for qv in (3, 4):
            assert 1 < lay.left(qv) < lay.right(qv) < 2
        assert not lay.intersects(3, 4)
        assert lay.left(1) < lay.left(3) and lay.left(2) < lay.left(4)

    @given(instance_specs())
    def test_generated_layout(self, spec):
        g, d = gen_kcaterpillar(spec)
        n = nicify(d)
        lay = interval_layout(n)
        assert layout_violations(g, n, lay) == []
        assert lay.max_coverage(n.spine_vertices) <= spec.k + 1
        assert lay.order()[0] == lay.root()
