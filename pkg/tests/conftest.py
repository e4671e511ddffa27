from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from catspan.graph import WeightedGraph
from catspan.toolkit.generators import InstanceSpec

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=40)
settings.load_profile("repo")


@st.composite
def connected_graphs(draw, max_n=7, max_w=9, zero=False):
    """Random connected graph: a random spanning tree plus random extra edges."""
    n = draw(st.integers(1, max_n))
    lo = 0 if zero else 1
    edges = {}
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges[(u, v)] = draw(st.integers(lo, max_w))
    for u, v in itertools.combinations(range(n), 2):
        if (u, v) not in edges and draw(st.booleans()):
            edges[(u, v)] = draw(st.integers(lo, max_w))
    order = draw(st.permutations(sorted(edges)))
    return WeightedGraph(n, [(u, v, edges[(u, v)]) for u, v in order])


@st.composite
def instance_specs(draw, max_n=40, ks=(1, 2, 3), flaps=True):
    k = draw(st.sampled_from(ks))
    n = draw(st.integers(k + 1, max_n))
    profile = ()
    if flaps and k >= 1:
        p = draw(st.integers(1, k))
        count = draw(st.integers(0, 3))
        if n - (k + 1 - p) * count >= k + 1:
            profile = ((p, k + 1 - p, count),)
    density = draw(st.sampled_from([Fraction(1), Fraction(1, 2)]))
    weights = draw(st.sampled_from(["uniform", "unit", "exp"]))
    seed = draw(st.integers(0, 2**64 - 1))
    return InstanceSpec(n, k, profile, weights, seed, density=density)


@pytest.fixture
def triangle():
    # ids: ab=0, bc=1, ac=2
    return WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line():
    """Record one summary line; all of them are echoed after the run."""

    def emit(text: str) -> None:
        print(text)
        ACCEPTANCE_LINES.append(text)

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
