"""Acceptance gate: one test per release criterion, each printing PASS.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Criteria cover the cell truth table, string sequence detection, the
array-vs-brute-force oracle, the cost-model trends, workload generation and
the LSH guarantees.
"""

import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from nandstpm import cli
from nandstpm.array import ArrayGeometry, program_array, query
from nandstpm.baselines import (
    brute_force_match,
    build_lsh_index,
    lsh_query,
    prepare_refs,
)
from nandstpm.bench import BenchConfig, run_benchmark, run_sweep
from nandstpm.datagen import LifParams, constant_drive_spike_times, generate_dataset
from nandstpm.device import (
    DeviceParams,
    InputSymbol,
    StoredSymbol,
    cell_conducts,
    symbols_match,
)
from nandstpm.patterns import SpatiotemporalPattern
from nandstpm.perf import PerfParams, sweep_patterns
from nandstpm.strings import (
    build_pulse_schedule,
    program_string,
    simulate_string,
    string_match_oracle,
)

S = StoredSymbol
I = InputSymbol
PARAMS = DeviceParams()
DT = 1e-7
GEOMETRY = ArrayGeometry(blocks=64, dsl=3, wl=32, bl=13824)
COUNTS = [50, 100, 200, 500]

UNIT_PERF = PerfParams(
    wl_pulse_energy=1.0,
    bl_sense_energy=1.0,
    block_overhead_energy=1.0,
    wl_sequence_latency=1.0,
    bl_sense_latency=1.0,
)


@pytest.fixture(scope="module")
def default_workload():
    refs, queries = generate_dataset(
        500, seed=42, n_queries=100, query_p_jitter=0.05, query_p_flip=0.01
    )
    return refs, queries


def _ok(number: int, name: str):
    print(f"ACCEPTANCE {number:02d} {name}: PASS")


def test_criterion_01_cell_truth_table():
    """High current exactly on stored==input or stored wildcard, all 12 cases."""
    for s, x in product(S, I):
        expected = symbols_match(s, x)
        assert cell_conducts(s, x, PARAMS) == expected, (s, x)
    _ok(1, "cell truth table (12 cases)")


def test_criterion_02_string_match_and_mismatch():
    prog = program_string([S.PLUS, S.PLUS], 5)
    match = simulate_string(prog, build_pulse_schedule([I.PLUS, I.PLUS], DT), PARAMS)
    mismatch = simulate_string(prog, build_pulse_schedule([I.PLUS, I.MINUS], DT), PARAMS)
    assert match.conducts and match.bl_current > PARAMS.sense_threshold_current
    assert not mismatch.conducts and mismatch.bl_current < PARAMS.sense_threshold_current
    _ok(2, "string match/mismatch scenarios")


def test_criterion_03_timing_equals_logic():
    for n in (1, 2, 3):
        for ref in product(S, repeat=n):
            prog = program_string(ref, 2 * n + 1)
            for inp in product(I, repeat=n):
                sched = build_pulse_schedule(inp, DT)
                assert simulate_string(prog, sched, PARAMS).conducts == string_match_oracle(
                    ref, inp
                ), (ref, inp)
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        n = int(rng.integers(1, 17))
        ref = [S(int(v)) for v in rng.integers(0, 4, n)]
        inp = [I(int(v)) for v in rng.integers(0, 3, n)]
        prog = program_string(ref, 2 * n + int(rng.integers(0, 3)))
        sched = build_pulse_schedule(inp, DT)
        assert simulate_string(prog, sched, PARAMS).conducts == string_match_oracle(ref, inp)
    _ok(3, "pulse-timing simulation == logical oracle (exhaustive N<=3 + 10^4 random)")


def test_criterion_04_array_equals_brute_force(default_workload):
    refs, queries = default_workload
    state = program_array(refs, GEOMETRY)
    stacked = prepare_refs(refs)
    for q in queries:
        nand = set(query(state, q, PARAMS, DT).matches)
        brute = brute_force_match(q, refs, stacked=stacked)
        assert nand == brute
    _ok(4, "array query == brute force (500 refs, 100 queries)")


def test_criterion_05_constant_latency():
    reports = sweep_patterns(COUNTS, GEOMETRY, 64, 10, PerfParams())
    assert all(r.rounds == 1 for r in reports)
    latencies = [r.latency_s for r in reports]
    assert all(lat == latencies[0] for lat in latencies)  # bitwise equal
    _ok(5, "modeled latency constant across stored counts")


def test_criterion_06_linear_energy():
    reports = sweep_patterns(COUNTS, GEOMETRY, 64, 10, UNIT_PERF)
    values = [Fraction(r.energy_j) for r in reports]
    slope = (values[-1] - values[0]) / (COUNTS[-1] - COUNTS[0])
    for c, v in zip(COUNTS, values):
        assert v - (values[0] + slope * (c - COUNTS[0])) == 0  # zero residual
    # default placeholder params stay affine to machine precision
    default = sweep_patterns(COUNTS, GEOMETRY, 64, 10, PerfParams())
    dv = [r.energy_j for r in default]
    dslope = (dv[-1] - dv[0]) / (COUNTS[-1] - COUNTS[0])
    for c, v in zip(COUNTS, dv):
        assert math.isclose(v, dv[0] + dslope * (c - COUNTS[0]), rel_tol=1e-12)
    _ok(6, "modeled energy affine in stored count (zero residual)")


def test_criterion_07_lif_first_spike():
    p = LifParams(tau_m=0.005, v_threshold=0.85)
    for amplitude in (1.0, 1.2):
        expected = -p.tau_m * math.log(1 - p.v_threshold / amplitude)
        times = constant_drive_spike_times(amplitude, 0.05, p)
        assert times and abs(times[0] - expected) <= p.dt
    _ok(7, "LIF first spike matches closed form within one dt")


def test_criterion_08_lsh_soundness(default_workload):
    rng = np.random.default_rng(1)
    for _ in range(1000):
        n = int(rng.integers(1, 16))
        grids = rng.integers(0, 4, size=(n, 16, 4), dtype=np.int8)
        refs = [
            SpatiotemporalPattern(height=4, width=4, steps=4, symbols=g) for g in grids
        ]
        index = build_lsh_index(refs, k=32, bands=8, rows=4)
        q = SpatiotemporalPattern(
            height=4, width=4, steps=4,
            symbols=rng.integers(0, 3, size=(16, 4), dtype=np.int8),
        )
        assert lsh_query(index, q) <= brute_force_match(q, refs)

    refs, queries = default_workload
    index = build_lsh_index(refs)
    stacked = prepare_refs(refs)
    recalls = []
    for q in queries[:20]:
        brute = brute_force_match(q, refs, stacked=stacked)
        found = lsh_query(index, q)
        assert found <= brute
        recalls.append(len(found & brute) / len(brute) if brute else 1.0)
    report = run_benchmark(
        BenchConfig(n=500, seed=42, queries=20, repeats=5, geometry=GEOMETRY)
    )
    summary = report.agreement["lsh_subset_of_brute"]
    assert summary["checked"] and summary["ok"]
    assert summary["recall_mean"] is not None
    _ok(
        8,
        f"LSH subset of brute force on 10^3 datasets; default-workload "
        f"recall {summary['recall_mean']:.3f} reported in summary",
    )


def test_criterion_09_scaling_contrast():
    cfg = BenchConfig(n=500, seed=42, queries=1, repeats=5, geometry=GEOMETRY)
    report = run_sweep(cfg, COUNTS)
    assert report.agreement_ok
    assert report.checks["nand_latency_constant"]
    assert report.checks["brute_wall_clock_monotone"]
    walls = [row["brute_wall_s"] for row in report.series]
    latencies = {row["nand_latency_s"] for row in report.series}
    assert len(latencies) == 1
    ratio = walls[-1] / latencies.pop()
    assert ratio > 0
    _ok(
        9,
        "modeled latency flat while brute-force wall clock grows "
        f"(brute/modeled ratio at 500 patterns: {ratio:.3g}x, placeholder calibration)",
    )


def test_criterion_10_gen_determinism(tmp_path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = cli.main(
            [
                "gen",
                "-n", "100",
                "--seed", "42",
                "--queries", "10",
                "--out", str(out),
            ]
        )
        assert code == 0
        outputs.append(
            (
                (out / "references.json").read_bytes(),
                (out / "queries.json").read_bytes(),
            )
        )
    assert outputs[0] == outputs[1]
    _ok(10, "dataset generation byte-identical under a fixed seed")
