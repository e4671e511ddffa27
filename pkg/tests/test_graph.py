from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catspan.graph import (
    GraphError,
    NotConnectedError,
    WeightedGraph,
    all_pairs_distances,
    as_weight,
    is_spanning_tree,
    minimum_spanning_tree,
    shortest_path,
    subgraph_weight,
    tree_parents,
    tree_path,
    TreeEdges,
)

from conftest import connected_graphs


def brute_mst_weight(g: WeightedGraph):
    best = None
    for combo in itertools.combinations(range(g.m), g.n - 1):
        if is_spanning_tree(g, combo):
            w = subgraph_weight(g, combo)
            best = w if best is None else min(best, w)
    return best


def simple_paths(g: WeightedGraph, u: int, v: int):
    def walk(x, seen, path):
        if x == v:
            yield tuple(path)
            return
        for y, e in g.adj[x]:
            if y not in seen:
                yield from walk(y, seen | {y}, path + [e])

    yield from walk(u, {u}, [])


class TestConstruction:
    def test_rejects_self_loop(self):
        with pytest.raises(GraphError):
            WeightedGraph(2, [(1, 1, 3)])

    def test_rejects_parallel(self):
        with pytest.raises(GraphError):
            WeightedGraph(2, [(0, 1, 3), (1, 0, 4)])

    def test_rejects_negative(self):
        with pytest.raises(GraphError):
            WeightedGraph(2, [(0, 1, -1)])

    def test_float_weights_are_exact(self):
        assert as_weight(0.5) == Fraction(1, 2)
        assert as_weight(3.0) == 3 and isinstance(as_weight(3.0), int)

    def test_endpoints_normalized(self):
        g = WeightedGraph(3, [(2, 0, 4)])
        assert g.edges[0].endpoints == (0, 2)
        assert g.edge_between(2, 0) == 0


class TestShortestPath:
    def test_path_graph(self):
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 2)])
        assert shortest_path(g, 0, 2) == (3, (0, 1))

    def test_identity(self):
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 2)])
        assert shortest_path(g, 0, 0) == (0, ())

    def test_triangle_detour(self):
        # ab=5 (id 0), bc=1 (id 1), ac=1 (id 2)
        g = WeightedGraph(3, [(0, 1, 5), (1, 2, 1), (0, 2, 1)])
        assert shortest_path(g, 0, 1) == (2, (2, 1))

    def test_unreachable_is_none(self):
        g = WeightedGraph(3, [(0, 1, 1)])
        assert shortest_path(g, 0, 2) is None

    def test_lexicographic_tie_break(self):
        # two shortest 0-3 routes: via 1 (ids 0, 2) and via 2 (ids 1, 3)
        g = WeightedGraph(4, [(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)])
        assert shortest_path(g, 0, 3).edges == (0, 2)
        g2 = WeightedGraph(4, [(0, 2, 1), (0, 1, 1), (2, 3, 1), (1, 3, 1)])
        assert shortest_path(g2, 0, 3).edges == (0, 2)

    def test_zero_weight_tie_break_stays_simple(self):
        g = WeightedGraph(4, [(0, 1, 0), (1, 2, 0), (0, 2, 0), (2, 3, 1)])
        sp = shortest_path(g, 0, 3)
        assert sp.distance == 1
        verts = [0]
        for e in sp.edges:
            verts.append(g.edges[e].other(verts[-1]))
        assert verts[-1] == 3 and len(set(verts)) == len(verts)

    @given(connected_graphs(max_n=6), st.data())
    def test_not_longer_than_any_simple_path(self, g, data):
        u = data.draw(st.integers(0, g.n - 1))
        v = data.draw(st.integers(0, g.n - 1))
        sp = shortest_path(g, u, v)
        assert subgraph_weight(g, sp.edges) == sp.distance
        paths = list(simple_paths(g, u, v))
        assert sp.distance == min(subgraph_weight(g, p) for p in paths)
        tight = sorted(p for p in paths if subgraph_weight(g, p) == sp.distance)
        assert sp.edges == tight[0]


class TestAllPairs:
    def test_single_vertex(self):
        assert all_pairs_distances(WeightedGraph(1)).tolist() == [[0.0]]

    def test_single_edge(self):
        assert all_pairs_distances(WeightedGraph(2, [(0, 1, 3)])).tolist() == [[0, 3], [3, 0]]

    def test_unreachable_is_inf(self):
        d = all_pairs_distances(WeightedGraph(3, [(0, 1, 3)]))
        assert np.isinf(d[0, 2]) and np.isinf(d[2, 1])

    def test_zero_weight_edges_count(self):
        d = all_pairs_distances(WeightedGraph(3, [(0, 1, 0), (1, 2, 2)]))
        assert d[0, 1] == 0 and d[0, 2] == 2

    def test_huge_weights_fall_back(self):
        big = 2**60
        g = WeightedGraph(3, [(0, 1, big), (1, 2, 1)])
        assert all_pairs_distances(g)[0, 2] == float(big + 1)

    @given(connected_graphs(max_n=8, zero=True))
    def test_matches_per_pair_oracle(self, g):
        d = all_pairs_distances(g)
        for u in range(g.n):
            for v in range(g.n):
                assert d[u, v] == shortest_path(g, u, v).distance

    @given(connected_graphs(max_n=8, zero=True))
    def test_metric(self, g):
        d = all_pairs_distances(g)
        assert np.array_equal(d, d.T)
        assert np.all(np.diag(d) == 0) and np.all(d >= 0)
        for x in range(g.n):
            assert np.all(d <= d[:, [x]] + d[[x], :])

    def test_rational_weights_exact(self):
        g = WeightedGraph(3, [(0, 1, Fraction(1, 3)), (1, 2, Fraction(1, 6))])
        assert all_pairs_distances(g)[0, 2] == 0.5


class TestMST:
    def test_tree_is_its_own_mst(self):
        g = WeightedGraph(4, [(0, 1, 5), (1, 2, 1), (1, 3, 9)])
        assert minimum_spanning_tree(g).edges == frozenset({0, 1, 2})

    def test_triangle(self):
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 2)])
        assert minimum_spanning_tree(g).edges == frozenset({0, 1})

    def test_tie_prefers_smaller_id(self):
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        assert minimum_spanning_tree(g).edges == frozenset({0, 1})

    def test_disconnected(self):
        with pytest.raises(NotConnectedError, match="graph not connected"):
            minimum_spanning_tree(WeightedGraph(3, [(0, 1, 1)]))

    @given(connected_graphs(max_n=7))
    def test_matches_enumeration(self, g):
        t = minimum_spanning_tree(g)
        assert is_spanning_tree(g, t.edges)
        assert subgraph_weight(g, t.edges) == brute_mst_weight(g)

    @given(connected_graphs(max_n=8), st.randoms(use_true_random=False))
    def test_weight_invariant_under_relabeling(self, g, rnd):
        triples = g.triples()
        rnd.shuffle(triples)
        h = WeightedGraph(g.n, triples)
        assert subgraph_weight(g, minimum_spanning_tree(g).edges) == subgraph_weight(h, minimum_spanning_tree(h).edges)


class TestWeights:
    def test_empty(self, triangle):
        assert subgraph_weight(triangle, []) == 0

    def test_triangle_total(self):
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 2)])
        assert subgraph_weight(g, range(3)) == 4

    def test_unknown_id(self, triangle):
        with pytest.raises(GraphError):
            subgraph_weight(triangle, [7])


def test_tree_path_walks_the_tree():
    g = WeightedGraph(5, [(0, 1, 1), (1, 2, 1), (1, 3, 1), (3, 4, 1), (0, 4, 9)])
    parent, pedge = tree_parents(g, TreeEdges(frozenset({0, 1, 2, 3}), 0))
    assert tree_path(g, parent, pedge, 2, 4) == (1, 2, 3)
    assert tree_path(g, parent, pedge, 4, 4) == ()


def test_random_paths_never_beat_dijkstra():
    rnd = random.Random(7)
    pairs = [(u, v) for u, v in itertools.combinations(range(9), 2) if v == u + 1 or rnd.random() < 0.5]
    g = WeightedGraph(9, [(u, v, rnd.randint(1, 20)) for u, v in pairs])
    d = all_pairs_distances(g)
    for _ in range(200):
        walk = [rnd.randrange(g.n)]
        for _ in range(rnd.randint(1, 6)):
            walk.append(rnd.choice(g.neighbors(walk[-1])))
        w = sum(g.weight(g.edge_between(a, b)) for a, b in zip(walk, walk[1:]))
        assert d[walk[0], walk[-1]] <= w
