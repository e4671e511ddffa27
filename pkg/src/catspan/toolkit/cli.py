"""``catspan`` command line.

Every failure exits nonzero with one JSON object on stderr:
``{"error": kind, "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from ..charging import verify_acyclic, verify_scheme
from ..graph import GraphError, minimum_spanning_tree, subgraph_weight
from ..spanner import PipelineError, as_epsilon, max_stretch, prepare, run
from .formats import (
    FORMAT_VERSION,
    FormatError,
    dump_graph,
    dumps,
    fmt_number,
    match_edges,
    read_graph,
    scheme_to_json,
    subgraph,
    write_text,
)
from .generators import InstanceSpec, SpecError, gen_kcaterpillar
from .sweep import SweepConfig, rows_to_csv, sweep


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int = 2):
        super().__init__(message)
        self.kind = kind
        self.code = code


def _emit(text: str, path: str | None) -> None:
    if path and path != "-":
        write_text(path, text)
    else:
        sys.stdout.write(text)


def _flap_arg(text: str) -> tuple[int, int, int]:
    try:
        p, q, c = (int(x) for x in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected p:q:count, got {text!r}") from exc
    return p, q, c


def _epsilon_arg(text: str) -> Fraction:
    try:
        return as_epsilon(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"epsilon must be a positive number, got {text!r}") from exc


def _load(path: str, need_decomposition: bool = True):
    try:
        doc = read_graph(path)
    except OSError as exc:
        raise CliError("io", f"{path}: {exc.strerror or exc}") from exc
    except FormatError as exc:
        raise CliError("format", f"{path}: {exc}") from exc
    if need_decomposition and doc.decomposition is None:
        raise CliError("format", f"{path}: no decomposition (bag records) in file")
    return doc


def _prepare(doc):
    try:
        return prepare(doc.graph, doc.decomposition)
    except PipelineError as exc:
        raise CliError("pipeline", f"stage {exc.stage}: {exc.cause}") from exc


def cmd_gen(args) -> int:
    try:
        spec = InstanceSpec(args.n, args.k, tuple(args.flaps or ()), args.weights, args.seed, density=args.density)
    except SpecError as exc:
        raise CliError("spec", str(exc)) from exc
    g, d = gen_kcaterpillar(spec)
    _emit(dump_graph(g, d, spec.k), args.out)
    return 0


def cmd_spanner(args) -> int:
    doc = _load(args.inp)
    prep = _prepare(doc)
    try:
        res = run(prep, args.epsilon)
    except PipelineError as exc:
        raise CliError("pipeline", f"stage {exc.stage}: {exc.cause}") from exc
    c = res.certificate
    report = {
        "format_version": FORMAT_VERSION,
        "epsilon": fmt_number(c.epsilon),
        "source": {"n": doc.graph.n, "m": doc.graph.m, "k": doc.decomposition.width},
        "reduced": {"n": prep.graph.n, "m": prep.graph.m},
        "certificate": {
            "certified": c.certified,
            "reason": c.reason,
            "max_stretch": fmt_number(c.max_stretch),
            "witness": list(c.witness) if c.witness else None,
            "w_spanner": fmt_number(c.w_spanner),
            "w_tree": fmt_number(c.w_tree),
            "w_mst": fmt_number(c.w_mst),
            "value": fmt_number(c.value) if c.value is not None else None,
            "bound": fmt_number(c.bound) if c.bound is not None else None,
            "bound_ok": c.bound_ok,
            "spanner_edges": len(c.spanner),
        },
        "lifted": {
            "edges": len(res.lifted),
            "weight": fmt_number(res.lifted_weight),
            "mst": fmt_number(res.mst),
            "lightness": fmt_number(res.lightness),
            "lightness_float": float(res.lightness),
            "max_stretch": fmt_number(res.lifted_stretch),
            "witness": list(res.lifted_witness) if res.lifted_witness else None,
        },
    }
    _emit(dump_graph(subgraph(doc.graph, res.lifted)), args.out)
    if args.report:
        write_text(args.report, dumps(report))
    return 0 if c.certified and 0 <= res.lifted_stretch <= 1 + c.epsilon else 1


def cmd_verify(args) -> int:
    gdoc = _load(args.graph, need_decomposition=False)
    sdoc = _load(args.spanner, need_decomposition=False)
    try:
        edges = match_edges(gdoc.graph, sdoc.graph)
    except FormatError as exc:
        raise CliError("format", f"{args.spanner}: {exc}") from exc
    st = max_stretch(gdoc.graph, edges)
    ok = 0 <= st.value <= 1 + args.epsilon
    out = {
        "format_version": FORMAT_VERSION,
        "epsilon": fmt_number(args.epsilon),
        "max_stretch": fmt_number(st.value) if st.value >= 0 else "inf",
        "max_stretch_float": float(st.value) if st.value >= 0 else None,
        "witness": list(st.witness) if st.witness else None,
        "ok": ok,
    }
    sys.stdout.write(dumps(out))
    return 0 if ok else 1


def cmd_scheme(args) -> int:
    doc = _load(args.inp)
    prep = _prepare(doc)
    rep = verify_scheme(prep.graph, prep.scheme)
    acyc = verify_acyclic(prep.graph, prep.scheme)
    w_mst = subgraph_weight(prep.graph, minimum_spanning_tree(prep.graph).edges)
    summary = {
        "format_version": FORMAT_VERSION,
        "value": fmt_number(rep.value),
        "valid": rep.valid,
        "acyclic": acyc.acyclic,
        "moves": len(prep.scheme.moves),
        "w_tree": fmt_number(prep.tree.weight(prep.graph)),
        "w_mst": fmt_number(w_mst),
        "violations": [f"({v.condition}) {v.message}" for v in rep.violations + acyc.violations][:20],
    }
    if args.dump:
        write_text(args.dump, dumps(scheme_to_json(prep.graph, prep.scheme, {"value": summary["value"]})))
    sys.stdout.write(dumps(summary))
    if args.check and not (rep.valid and acyc.acyclic):
        return 1
    return 0


def cmd_sweep(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CliError("io", f"{args.config}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError("format", f"{args.config}: {exc}") from exc
    if not isinstance(raw, dict):
        raise CliError("format", f"{args.config}: expected a JSON object")
    try:
        cfg = SweepConfig.from_json(raw)
    except FormatError as exc:
        raise CliError("format", f"{args.config}: {exc}") from exc
    try:
        rows = sweep(cfg)
    except PipelineError as exc:
        raise CliError("pipeline", f"stage {exc.stage}: {exc.cause}") from exc
    _emit(rows_to_csv(rows), args.out)
    return 0 if all(r["bound_ok"] == "true" for r in rows) else 1


class _Parser(argparse.ArgumentParser):
    """Usage errors become :class:`CliError` so they are reported as JSON."""

    def error(self, message):
        raise CliError("usage", f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="catspan", description="Light greedy spanners with charging-scheme certificates.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded k-path or k-caterpillar")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--flaps", type=_flap_arg, action="append", metavar="P:Q:COUNT")
    p.add_argument("--weights", choices=("uniform", "unit", "exp"), default="uniform")
    p.add_argument("--density", type=Fraction, default=Fraction(1))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("spanner", help="run the pipeline and write the lifted spanner")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--epsilon", type=_epsilon_arg, required=True)
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(fn=cmd_spanner)

    p = sub.add_parser("verify", help="check the stretch of a spanner file")
    p.add_argument("--graph", required=True)
    p.add_argument("--spanner", required=True)
    p.add_argument("--epsilon", type=_epsilon_arg, required=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("scheme", help="build and verify the charging scheme")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--dump")
    p.add_argument("--check", action="store_true")
    p.set_defaults(fn=cmd_scheme)

    p = sub.add_parser("sweep", help="run a corpus and write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sweep)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except CliError as exc:
        sys.stderr.write(json.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return exc.code
    except (GraphError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": "invalid", "message": str(exc)}) + "\n")
        return 2
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io", "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
