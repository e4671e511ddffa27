from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from catspan.decomposition import CaterpillarDecomposition, Flap, validate, widths
from catspan.graph import WeightedGraph
from catspan.toolkit.cli import main
from catspan.toolkit.formats import (
    FormatError,
    dump_graph,
    fmt_number,
    parse_graph,
    scheme_from_json,
    scheme_to_json,
)
from catspan.toolkit.generators import InstanceSpec, SpecError, gen_kcaterpillar, gen_kpath
from catspan.toolkit.rng import SplitMix64
from catspan.toolkit.sweep import SweepConfig, corpus
from catspan.spanner import prepare

from conftest import instance_specs


class TestRng:
    def test_reference_stream(self):
        r = SplitMix64(0)
        assert [r.next_u64() for _ in range(3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]

    def test_below_range(self):
        r = SplitMix64(5)
        draws = [r.below(7) for _ in range(500)]
        assert set(draws) == set(range(7))

    def test_shuffle_is_permutation(self):
        assert sorted(SplitMix64(1).shuffled(range(10))) == list(range(10))


class TestGenerators:
    def test_single_clique(self):
        g, d = gen_kpath(InstanceSpec(4, 3, seed=9))
        assert g.m == 6 and d.bags == (frozenset(range(4)),)

    def test_deterministic(self):
        spec = InstanceSpec(40, 2, ((1, 2, 3),), "exp", seed=123)
        assert dump_graph(*gen_kcaterpillar(spec)) == dump_graph(*gen_kcaterpillar(spec))

    def test_empty_profile_matches_kpath(self):
        a = gen_kcaterpillar(InstanceSpec(30, 2, seed=4))
        b = gen_kpath(InstanceSpec(30, 2, seed=4))
        assert a == b

    def test_one_leaf(self):
        g, d = gen_kcaterpillar(InstanceSpec(10, 2, ((2, 1, 1),), seed=2))
        (f,) = d.flaps
        assert f.q == 1 and f.p == 2
        (leaf,) = f.Q
        assert g.degree(leaf) == 2

    def test_bad_profiles(self):
        with pytest.raises(SpecError):
            InstanceSpec(10, 2, ((1, 1, 1),))
        with pytest.raises(SpecError):
            InstanceSpec(2, 2)
        with pytest.raises(SpecError):
            InstanceSpec(10, 2, weights="gaussian")
        with pytest.raises(SpecError):
            gen_kpath(InstanceSpec(10, 2, ((1, 2, 1),)))

    def test_unit_and_exp_weights(self):
        g, _ = gen_kcaterpillar(InstanceSpec(20, 2, weights="unit"))
        assert {e.weight for e in g.edges} == {1}
        g, _ = gen_kcaterpillar(InstanceSpec(20, 2, weights="exp", seed=3))
        assert all(w > 0 for w in (e.weight for e in g.edges))
        assert any(isinstance(e.weight, Fraction) for e in g.edges)

    @given(instance_specs(max_n=60, ks=(1, 2, 3, 4)))
    def test_valid_and_connected(self, spec):
        g, d = gen_kcaterpillar(spec)
        assert g.n == spec.n and g.is_connected()
        assert validate(g, d) == []
        assert widths(d)[1] == spec.k


class TestFormats:
    def test_numbers(self):
        assert fmt_number(3) == "3" and fmt_number(Fraction(6, 4)) == "3/2"

    def test_small_round_trip(self):
        g = WeightedGraph(4, [(0, 1, 2), (1, 2, Fraction(3, 2)), (1, 3, 1), (2, 3, 1)])
        d = CaterpillarDecomposition(({0, 1}, {1, 2}), (Flap({1, 2}, {3}, 1),), 2)
        text = dump_graph(g, d)
        doc = parse_graph(text)
        assert doc.graph == g and doc.decomposition == d and doc.k == 2
        assert dump_graph(doc.graph, doc.decomposition) == text

    @given(instance_specs(max_n=40))
    def test_round_trip(self, spec):
        g, d = gen_kcaterpillar(spec)
        text = dump_graph(g, d)
        doc = parse_graph(text)
        assert doc.graph == g and doc.decomposition == d
        assert [e.weight for e in doc.graph.edges] == [e.weight for e in g.edges]
        assert dump_graph(doc.graph, doc.decomposition) == text

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "not-a-graph 1\n",
            "catspan-graph 1\nedge 0 1 1\n",
            "catspan-graph 1\nn 2\nedge 0 1\n",
            "catspan-graph 1\nn 2\nedge 0 1 x\n",
            "catspan-graph 1\nn 2\nedge 0 0 1\n",
            "catspan-graph 1\nn 2\nedge 0 1 1\nbag 0 1\ninterval 0 0 5\n",
            "catspan-graph 1\nn 2\nwat 3\n",
            "catspan-graph 1\nn 3\nbag 0 1\nflap 4 P 1 Q 2\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(FormatError):
            parse_graph(text)

    def test_scheme_json_round_trip(self):
        spec = InstanceSpec(25, 2, ((1, 2, 2),), seed=8)
        prep = prepare(*gen_kcaterpillar(spec))
        doc = json.loads(json.dumps(scheme_to_json(prep.graph, prep.scheme)))
        g, s = scheme_from_json(doc)
        assert g == prep.graph and s == prep.scheme


class TestSweepCorpus:
    def test_shape(self):
        cfg = SweepConfig.from_json({"k": [1, 2], "seeds": 5, "n_min": 20, "n_max": 60, "eps": [0.5]})
        specs = corpus(cfg)
        assert len(specs) == 10
        assert [s.n for s in specs[:5]] == [20, 30, 40, 50, 60]
        assert len({s.seed for s in specs}) == 10

    def test_bad_config(self):
        with pytest.raises(FormatError):
            SweepConfig.from_json({"k": [1]})
        with pytest.raises(FormatError):
            SweepConfig.from_json({"k": [1], "seeds": 1, "n_min": 9, "n_max": 3, "eps": [1]})


def run_cli(capsys, *args):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


class TestCli:
    def test_end_to_end(self, tmp_path, capsys):
        gfile, sfile, rfile, mfile = (tmp_path / x for x in ("g.txt", "s.txt", "r.json", "m.json"))
        assert run_cli(capsys, "gen", "--n", 30, "--k", 2, "--flaps", "1:2:2", "--seed", 5, "--out", gfile)[0] == 0
        code, _, _ = run_cli(capsys, "spanner", "--in", gfile, "--epsilon", "0.5", "--out", sfile, "--report", rfile)
        assert code == 0
        report = json.loads(rfile.read_text())
        assert report["format_version"] == 1 and report["certificate"]["bound_ok"]
        code, out, _ = run_cli(capsys, "verify", "--graph", gfile, "--spanner", sfile, "--epsilon", "0.5")
        assert code == 0 and json.loads(out)["ok"]
        code, out, _ = run_cli(capsys, "scheme", "--in", gfile, "--dump", mfile, "--check")
        assert code == 0 and json.loads(out)["valid"]
        assert json.loads(mfile.read_text())["moves"]

    def test_verify_whole_graph(self, tmp_path, capsys):
        gfile = tmp_path / "g.txt"
        run_cli(capsys, "gen", "--n", 12, "--k", 2, "--out", gfile)
        code, out, _ = run_cli(capsys, "verify", "--graph", gfile, "--spanner", gfile, "--epsilon", "0.1")
        assert code == 0 and json.loads(out)["max_stretch"] == "1"

    def test_verify_fails_on_sparse_spanner(self, tmp_path, capsys):
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        (tmp_path / "g.txt").write_text(dump_graph(g))
        (tmp_path / "s.txt").write_text(dump_graph(WeightedGraph(3, [(0, 1, 1), (1, 2, 1)])))
        code, out, _ = run_cli(
            capsys, "verify", "--graph", tmp_path / "g.txt", "--spanner", tmp_path / "s.txt", "--epsilon", "0.5"
        )
        assert code == 1 and json.loads(out)["witness"] == [0, 2]

    def test_scheme_on_single_edge(self, tmp_path, capsys):
        g = WeightedGraph(2, [(0, 1, 3)])
        (tmp_path / "t.txt").write_text(dump_graph(g, CaterpillarDecomposition(({0, 1},))))
        code, out, _ = run_cli(capsys, "scheme", "--in", tmp_path / "t.txt", "--check")
        assert code == 0 and json.loads(out)["value"] == "0"

    def test_scheme_on_path(self, tmp_path, capsys):
        # the reduced graph gains copy vertices and completion edges, so v may be positive
        g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1)])
        (tmp_path / "t.txt").write_text(dump_graph(g, CaterpillarDecomposition(({0, 1}, {1, 2}))))
        code, out, _ = run_cli(capsys, "scheme", "--in", tmp_path / "t.txt", "--check")
        doc = json.loads(out)
        assert code == 0 and doc["valid"] and doc["acyclic"]
        assert Fraction(doc["value"]) <= 4

    def test_sweep(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"k": [1, 2], "seeds": 2, "n_min": 10, "n_max": 14, "eps": [0.5, 1]}))
        code, _, _ = run_cli(capsys, "sweep", "--config", cfg, "--out", tmp_path / "r.csv")
        lines = (tmp_path / "r.csv").read_text().splitlines()
        assert code == 0
        assert lines[0] == "seed,n,k,eps,w_mst,w_tree,w_spanner,v,stretch,bound_ok"
        assert len(lines) == 1 + 2 * 2 * 2

    @pytest.mark.parametrize(
        "args",
        [
            ["spanner", "--in", "missing.txt", "--epsilon", "1"],
            ["spanner", "--in", "BAD", "--epsilon", "1"],
            ["spanner", "--in", "BAD", "--epsilon", "-1"],
            ["gen", "--n", "2", "--k", "3"],
            ["gen", "--n", "9", "--k", "2", "--flaps", "1-1-1"],
            ["verify", "--graph", "BAD", "--spanner", "BAD", "--epsilon", "1"],
            ["sweep", "--config", "BAD"],
            ["frobnicate"],
        ],
    )
    def test_errors_are_json(self, tmp_path, capsys, args):
        bad = tmp_path / "bad.txt"
        bad.write_text("catspan-graph 1\nn 2\nedge 0 1 oops\n")
        args = [str(bad) if a == "BAD" else a for a in args]
        code, _, err = run_cli(capsys, *args)
        assert code != 0
        payload = json.loads(err.strip().splitlines()[-1])
        assert set(payload) == {"error", "message"}
