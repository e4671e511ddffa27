"""Seeded corpora and sweep runs.

A sweep config is JSON::

    {"format_version": 1, "k": [1, 2, 3, 4], "seeds": 50,
     "n_min": 20, "n_max": 200, "eps": [0.1, 0.5, 1.0]}

Optional keys: ``flaps`` (default true) and ``density_mix`` (default true).
Instance ``i`` of width ``k`` gets seed ``1000*k + i`` and ``n`` spread
evenly over ``[n_min, n_max]``.  Flap profiles and densities cycle with
``i``: no flaps, ``(k,1)`` leaves, or one of every ``(p, k+1-p)``; every
other seed keeps half of the optional spine edges.  Every seventh seed
uses unit weights; the rest draw integers in ``1..1000``.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from ..spanner import as_epsilon, prepare, run
from .formats import FORMAT_VERSION, FormatError, fmt_number
from .generators import InstanceSpec, gen_kcaterpillar

COLUMNS = ("seed", "n", "k", "eps", "w_mst", "w_tree", "w_spanner", "v", "stretch", "bound_ok")

ACCEPTANCE_CONFIG = {
    "format_version": FORMAT_VERSION,
    "k": [1, 2, 3, 4],
    "seeds": 50,
    "n_min": 20,
    "n_max": 200,
    "eps": [0.1, 0.5, 1.0],
}


@dataclass(frozen=True)
class SweepConfig:
    ks: tuple[int, ...]
    seeds: int
    n_min: int
    n_max: int
    eps: tuple[Fraction, ...]
    flaps: bool = True
    density_mix: bool = True

    @classmethod
    def from_json(cls, doc: dict) -> SweepConfig:
        try:
            if doc.get("format_version", FORMAT_VERSION) != FORMAT_VERSION:
                raise FormatError(f"unsupported format_version {doc['format_version']!r}")
            cfg = cls(
                tuple(int(k) for k in doc["k"]),
                int(doc["seeds"]),
                int(doc["n_min"]),
                int(doc["n_max"]),
                tuple(as_epsilon(e) for e in doc["eps"]),
                bool(doc.get("flaps", True)),
                bool(doc.get("density_mix", True)),
            )
        except FormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed sweep config: {exc}") from exc
        if cfg.seeds < 1 or cfg.n_min > cfg.n_max or not cfg.ks or not cfg.eps:
            raise FormatError("sweep config ranges are empty")
        return cfg


def _profile(k: int, i: int, n: int) -> tuple[tuple[int, int, int], ...]:
    room = max(1, n // 20)
    kind = i % 3
    if kind == 0 or k < 1:
        return ()
    if kind == 1:
        return ((k, 1, room),)
    return tuple((p, k + 1 - p, 1) for p in range(1, k + 1))


def corpus(cfg: SweepConfig) -> list[InstanceSpec]:
    out = []
    for k in cfg.ks:
        for i in range(cfg.seeds):
            span = cfg.n_max - cfg.n_min
            n = cfg.n_min + (span * i // (cfg.seeds - 1) if cfg.seeds > 1 else 0)
            n = max(n, k + 1)
            flaps = _profile(k, i, n) if cfg.flaps else ()
            while flaps and n - sum(q * c for _, q, c in flaps) < k + 1:
                flaps = flaps[:-1]
            density = Fraction(1, 2) if cfg.density_mix and i % 2 else Fraction(1)
            weights = "unit" if i % 7 == 6 else "uniform"
            out.append(InstanceSpec(n, k, flaps, weights, 1000 * k + i, density=density))
    return out


def run_instance(spec: InstanceSpec, eps_values) -> list[dict]:
    g, d = gen_kcaterpillar(spec)
    prep = prepare(g, d)
    rows = []
    for eps in eps_values:
        res = run(prep, eps)
        c = res.certificate
        rows.append(
            {
                "seed": spec.seed,
                "n": spec.n,
                "k": spec.k,
                "eps": fmt_number(c.epsilon),
                "w_mst": fmt_number(c.w_mst),
                "w_tree": fmt_number(c.w_tree),
                "w_spanner": fmt_number(c.w_spanner),
                "v": fmt_number(c.value),
                "stretch": fmt_number(c.max_stretch),
                "bound_ok": "true" if c.bound_ok else "false",
            }
        )
    return rows


def _job(args):
    spec, eps = args
    return run_instance(spec, eps)


def thread_cap() -> int:
    raw = os.environ.get("CATSPAN_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def sweep(cfg: SweepConfig, workers: int | None = None) -> list[dict]:
    """All rows, ordered by corpus position (seed order within each ``k``)."""
    specs = corpus(cfg)
    jobs = [(s, cfg.eps) for s in specs]
    workers = min(workers or thread_cap(), len(jobs)) or 1
    if workers == 1:
        batches = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(workers) as pool:
            batches = list(pool.map(_job, jobs))
    return [row for batch in batches for row in batch]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
