"""Benchmark harness: run all matchers on one workload and report.

Baselines are timed with a monotonic clock (warm-up plus median of several
repetitions); the array path reports modeled latency and energy instead,
since its cost comes from the analytic model, not from simulator wall
clock.  A disagreement between the array matcher and brute force is a
hard failure surfaced in the report.
"""

from __future__ import annotations

import csv
import io
import json
import os
import platform
import statistics
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .array import ArrayGeometry, program_array, query as array_query
from .baselines import (
    DEFAULT_BANDS,
    DEFAULT_K,
    DEFAULT_ROWS,
    brute_force_match,
    build_lsh_index,
    lsh_query,
    prepare_refs,
)
from .datagen import LifParams, generate_dataset
from .device import DeviceParams
from .errors import ConfigError
from .patterns import dumps_document, patterns_to_document
from .perf import PerfParams, estimate_pattern_query

MATCHERS = ("nand", "brute", "lsh")


@dataclass(frozen=True)
class BenchConfig:
    """Workload, geometry and measurement knobs for one benchmark run."""

    n: int = 500
    grid: int = 8
    steps: int = 10
    seed: int = 42
    p_jitter: float = 0.1
    p_flip: float = 0.02
    queries: int = 1
    query_p_jitter: float = 0.05
    query_p_flip: float = 0.01
    geometry: ArrayGeometry = field(
        default_factory=lambda: ArrayGeometry(blocks=64, dsl=3, wl=32, bl=13824)
    )
    device: DeviceParams = field(default_factory=DeviceParams)
    perf: PerfParams = field(default_factory=PerfParams)
    lif: LifParams = field(default_factory=LifParams)
    delta_t: float = 1e-7
    matchers: tuple[str, ...] = MATCHERS
    repeats: int = 5
    warmup: int = 1
    compact_rounds: bool = True
    lsh_k: int = DEFAULT_K
    lsh_bands: int = DEFAULT_BANDS
    lsh_rows: int = DEFAULT_ROWS

    def __post_init__(self):
        unknown = sorted(set(self.matchers) - set(MATCHERS))
        if unknown:
            raise ConfigError(f"unknown matchers: {', '.join(unknown)}")
        if not self.matchers:
            raise ConfigError("at least one matcher is required")
        if self.queries < 1:
            raise ConfigError("queries must be >= 1")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")


@dataclass
class BenchReport:
    """Everything one run produced; ``to_dict`` is the summary document."""

    config: dict
    environment: dict
    rows: list[dict]
    agreement: dict
    nand_perf: dict
    ratios: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "environment": self.environment,
            "results": self.rows,
            "agreement": self.agreement,
            "nand_perf": self.nand_perf,
            "ratios": self.ratios,
        }

    @property
    def agreement_ok(self) -> bool:
        return bool(self.agreement["nand_vs_brute"]["ok"]) and bool(
            self.agreement["lsh_subset_of_brute"]["ok"]
        )

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["matcher", "query", "latency_s", "modeled", "energy_j", "n_matches"]
        )
        for row in self.rows:
            writer.writerow(
                [
                    row["matcher"],
                    row["query"],
                    repr(row["latency_s"]),
                    int(row["modeled"]),
                    "" if row["energy_j"] is None else repr(row["energy_j"]),
                    row["n_matches"],
                ]
            )
        return buf.getvalue()


def _environment() -> dict:
    return {
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "numpy": np.__version__,
        "cpu_count": os.cpu_count(),
    }


def measure_seconds(
    fn: Callable[[], object],
    repeats: int = 5,
    warmup: int = 1,
    min_sample_s: float = 1e-3,
) -> float:
    """Median per-call wall-clock seconds over ``repeats`` samples.

    After ``warmup`` calls, the inner batch size doubles until one timed
    sample lasts at least ``min_sample_s``, which keeps scheduler jitter and
    clock granularity out of microsecond-scale measurements.
    """
    for _ in range(warmup):
        fn()
    inner = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        elapsed = time.perf_counter() - t0
        if elapsed >= min_sample_s or inner >= 1 << 20:
            break
        inner *= 2
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        samples.append((time.perf_counter() - t0) / inner)
    return statistics.median(samples)


def _config_dict(cfg: BenchConfig) -> dict:
    g = cfg.geometry
    return {
        "n": cfg.n,
        "grid": cfg.grid,
        "steps": cfg.steps,
        "seed": cfg.seed,
        "p_jitter": cfg.p_jitter,
        "p_flip": cfg.p_flip,
        "queries": cfg.queries,
        "query_p_jitter": cfg.query_p_jitter,
        "query_p_flip": cfg.query_p_flip,
        "geometry": {"blocks": g.blocks, "dsl": g.dsl, "wl": g.wl, "bl": g.bl},
        "delta_t": cfg.delta_t,
        "matchers": list(cfg.matchers),
        "repeats": cfg.repeats,
        "warmup": cfg.warmup,
        "compact_rounds": cfg.compact_rounds,
        "lsh": {"k": cfg.lsh_k, "bands": cfg.lsh_bands, "rows": cfg.lsh_rows},
    }


def run_benchmark(cfg: BenchConfig, out_dir=None) -> BenchReport:
    """Generate the workload, run the selected matchers and collect the report.

    When ``out_dir`` is given, writes results.csv, summary.json and the
    dataset files there.
    """
    refs, queries = generate_dataset(
        cfg.n,
        seed=cfg.seed,
        grid=cfg.grid,
        steps=cfg.steps,
        p_jitter=cfg.p_jitter,
        p_flip=cfg.p_flip,
        n_queries=cfg.queries,
        query_p_jitter=cfg.query_p_jitter,
        query_p_flip=cfg.query_p_flip,
        lif=cfg.lif,
    )

    match_sets: dict[str, list[set[int]]] = {}
    rows: list[dict] = []

    nand_report = None
    if "nand" in cfg.matchers:
        state = program_array(refs, cfg.geometry)
        nand_report = estimate_pattern_query(
            cfg.geometry,
            active_blocks=cfg.grid * cfg.grid,
            stored_count=cfg.n,
            steps=cfg.steps,
            pp=cfg.perf,
            compact_rounds=cfg.compact_rounds,
        )
        results = [
            array_query(state, q, cfg.device, cfg.delta_t, compact_rounds=cfg.compact_rounds)
            for q in queries
        ]
        match_sets["nand"] = [set(r.matches) for r in results]
        for qi, r in enumerate(results):
            rows.append(
                {
                    "matcher": "nand",
                    "query": qi,
                    "latency_s": nand_report.latency_s,
                    "modeled": True,
                    "energy_j": nand_report.energy_j,
                    "n_matches": len(r.matches),
                }
            )

    if "brute" in cfg.matchers:
        stacked = prepare_refs(refs)
        match_sets["brute"] = [
            brute_force_match(q, refs, stacked=stacked) for q in queries
        ]
        for qi, q in enumerate(queries):
            latency = measure_seconds(
                lambda q=q: brute_force_match(q, refs, stacked=stacked),
                repeats=cfg.repeats,
                warmup=cfg.warmup,
            )
            rows.append(
                {
                    "matcher": "brute",
                    "query": qi,
                    "latency_s": latency,
                    "modeled": False,
                    "energy_j": None,
                    "n_matches": len(match_sets["brute"][qi]),
                }
            )

    if "lsh" in cfg.matchers:
        index = build_lsh_index(
            refs, k=cfg.lsh_k, bands=cfg.lsh_bands, rows=cfg.lsh_rows
        )
        match_sets["lsh"] = [lsh_query(index, q) for q in queries]
        for qi, q in enumerate(queries):
            latency = measure_seconds(
                lambda q=q: lsh_query(index, q),
                repeats=cfg.repeats,
                warmup=cfg.warmup,
            )
            rows.append(
                {
                    "matcher": "lsh",
                    "query": qi,
                    "latency_s": latency,
                    "modeled": False,
                    "energy_j": None,
                    "n_matches": len(match_sets["lsh"][qi]),
                }
            )

    agreement = _agreement(match_sets, len(queries))
    nand_perf = {}
    if nand_report is not None:
        nand_perf = {
            "latency_s": nand_report.latency_s,
            "energy_j": nand_report.energy_j,
            "breakdown": nand_report.breakdown,
            "rounds": nand_report.rounds,
            "active_blocks": nand_report.active_blocks,
            "active_bls": nand_report.active_bls,
            "formula": nand_report.formula,
        }
    ratios = _ratios(match_sets, rows, nand_report)

    report = BenchReport(
        config=_config_dict(cfg),
        environment=_environment(),
        rows=rows,
        agreement=agreement,
        nand_perf=nand_perf,
        ratios=ratios,
    )
    if out_dir is not None:
        _write_run(out_dir, report, refs, queries)
    return report


def _agreement(match_sets: dict[str, list[set[int]]], n_queries: int) -> dict:
    matchers = sorted(match_sets)
    matrix: dict[str, dict[str, float]] = {}
    for a in matchers:
        matrix[a] = {}
        for b in matchers:
            equal = sum(1 for qa, qb in zip(match_sets[a], match_sets[b]) if qa == qb)
            matrix[a][b] = equal / n_queries if n_queries else 1.0
    nand_vs_brute = {"checked": False, "queries_equal": 0, "total": n_queries, "ok": True}
    if "nand" in match_sets and "brute" in match_sets:
        equal = sum(
            1 for a, b in zip(match_sets["nand"], match_sets["brute"]) if a == b
        )
        nand_vs_brute = {
            "checked": True,
            "queries_equal": equal,
            "total": n_queries,
            "ok": equal == n_queries,
        }
    lsh_subset = {"checked": False, "ok": True, "recall_mean": None}
    if "lsh" in match_sets and "brute" in match_sets:
        subset = all(
            lsh <= brute for lsh, brute in zip(match_sets["lsh"], match_sets["brute"])
        )
        recalls = [
            (len(lsh & brute) / len(brute)) if brute else 1.0
            for lsh, brute in zip(match_sets["lsh"], match_sets["brute"])
        ]
        lsh_subset = {
            "checked": True,
            "ok": subset,
            "recall_mean": statistics.fmean(recalls) if recalls else None,
        }
    return {
        "matrix": matrix,
        "nand_vs_brute": nand_vs_brute,
        "lsh_subset_of_brute": lsh_subset,
    }


def _ratios(match_sets, rows, nand_report) -> dict:
    ratios: dict[str, float | None] = {
        "brute_over_nand_latency": None,
        "lsh_over_nand_latency": None,
    }
    if nand_report is None or nand_report.latency_s == 0:
        return ratios
    for name in ("brute", "lsh"):
        samples = [r["latency_s"] for r in rows if r["matcher"] == name]
        if samples:
            ratios[f"{name}_over_nand_latency"] = statistics.fmean(samples) / nand_report.latency_s
    return ratios


def _write_run(out_dir, report: BenchReport, refs, queries) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(report.csv_text())
    (out / "summary.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    (out / "references.json").write_text(dumps_document(patterns_to_document(refs)))
    if queries:
        (out / "queries.json").write_text(dumps_document(patterns_to_document(queries)))


@dataclass
class SweepReport:
    """Per-count series plus the machine-readable scaling checks."""

    config: dict
    environment: dict
    series: list[dict]
    checks: dict
    ratios: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "environment": self.environment,
            "series": self.series,
            "checks": self.checks,
            "ratios": self.ratios,
        }

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "count",
                "rounds",
                "nand_latency_s",
                "nand_energy_j",
                "brute_wall_s",
                "nand_eq_brute",
            ]
        )
        for row in self.series:
            writer.writerow(
                [
                    row["count"],
                    row["rounds"],
                    repr(row["nand_latency_s"]),
                    repr(row["nand_energy_j"]),
                    "" if row["brute_wall_s"] is None else repr(row["brute_wall_s"]),
                    int(row["nand_eq_brute"]),
                ]
            )
        return buf.getvalue()

    @property
    def agreement_ok(self) -> bool:
        return all(row["nand_eq_brute"] for row in self.series)


def affine_fit_residual(counts: Sequence[int], values: Sequence[float]) -> float:
    """Largest |value - fit| of the exact two-point affine fit through the ends.

    Computed in rational arithmetic so a genuinely affine series reports a
    residual of exactly zero.
    """
    if len(counts) < 3:
        return 0.0
    c0, c1 = Fraction(counts[0]), Fraction(counts[-1])
    v0, v1 = Fraction(values[0]), Fraction(values[-1])
    slope = (v1 - v0) / (c1 - c0)
    worst = Fraction(0)
    for c, v in zip(counts, values):
        resid = abs(Fraction(v) - (v0 + slope * (Fraction(c) - c0)))
        worst = max(worst, resid)
    return float(worst)


def run_sweep(
    cfg: BenchConfig, counts: Sequence[int], out_dir=None, monotone_slack: float = 0.25
) -> SweepReport:
    """Scale the stored-pattern count and check the latency/energy trends.

    The dataset is generated once at the largest count; each sweep point
    reprograms the array with a prefix of it.
    """
    counts = list(counts)
    if not counts or any(c < 1 for c in counts):
        raise ConfigError("counts must be non-empty positive integers")
    if sorted(counts) != counts:
        raise ConfigError("counts must be sorted ascending")
    top = max(counts)
    refs, queries = generate_dataset(
        top,
        seed=cfg.seed,
        grid=cfg.grid,
        steps=cfg.steps,
        p_jitter=cfg.p_jitter,
        p_flip=cfg.p_flip,
        n_queries=max(cfg.queries, 1),
        query_p_jitter=cfg.query_p_jitter,
        query_p_flip=cfg.query_p_flip,
        lif=cfg.lif,
    )

    series: list[dict] = []
    for count in counts:
        subset = refs[:count]
        state = program_array(subset, cfg.geometry)
        perf_report = estimate_pattern_query(
            cfg.geometry,
            active_blocks=cfg.grid * cfg.grid,
            stored_count=count,
            steps=cfg.steps,
            pp=cfg.perf,
            compact_rounds=cfg.compact_rounds,
        )
        stacked = prepare_refs(subset)
        brute_sets = [brute_force_match(q, subset, stacked=stacked) for q in queries]
        nand_sets = [
            set(
                array_query(
                    state, q, cfg.device, cfg.delta_t, compact_rounds=cfg.compact_rounds
                ).matches
            )
            for q in queries
        ]
        brute_wall = None
        if "brute" in cfg.matchers:
            brute_wall = measure_seconds(
                lambda: [brute_force_match(q, subset, stacked=stacked) for q in queries],
                repeats=cfg.repeats,
                warmup=cfg.warmup,
            )
        series.append(
            {
                "count": count,
                "rounds": perf_report.rounds,
                "nand_latency_s": perf_report.latency_s,
                "nand_energy_j": perf_report.energy_j,
                "brute_wall_s": brute_wall,
                "nand_eq_brute": nand_sets == brute_sets,
            }
        )

    checks = _sweep_checks(series, monotone_slack)
    ratios = {
        "brute_over_nand_latency": {
            str(row["count"]): row["brute_wall_s"] / row["nand_latency_s"]
            for row in series
            if row["brute_wall_s"] is not None and row["nand_latency_s"] > 0
        }
    }
    report = SweepReport(
        config={**_config_dict(cfg), "counts": counts},
        environment=_environment(),
        series=series,
        checks=checks,
        ratios=ratios,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.csv").write_text(report.csv_text())
        (out / "sweep_summary.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
        )
    return report


def _sweep_checks(series: list[dict], monotone_slack: float) -> dict:
    by_rounds: dict[int, list[dict]] = {}
    for row in series:
        by_rounds.setdefault(row["rounds"], []).append(row)

    latency_constant = all(
        len({row["nand_latency_s"] for row in rows}) == 1 for rows in by_rounds.values()
    )

    worst_resid = 0.0
    energy_scale = max(abs(row["nand_energy_j"]) for row in series) or 1.0
    for rows in by_rounds.values():
        if len(rows) >= 3:
            resid = affine_fit_residual(
                [r["count"] for r in rows], [r["nand_energy_j"] for r in rows]
            )
            worst_resid = max(worst_resid, resid)
    energy_affine = worst_resid <= energy_scale * 1e-12

    walls = [row["brute_wall_s"] for row in series if row["brute_wall_s"] is not None]
    brute_monotone = True
    if len(walls) >= 2:
        brute_monotone = all(
            b >= a * (1 - monotone_slack) for a, b in zip(walls, walls[1:])
        ) and walls[-1] > walls[0]

    return {
        "nand_latency_constant": latency_constant,
        "nand_energy_affine": energy_affine,
        "energy_fit_max_residual": worst_resid,
        "brute_wall_clock_monotone": brute_monotone,
    }
