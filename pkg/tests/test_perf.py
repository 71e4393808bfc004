"""Analytic cost model: trends, closure and exactness."""

import math
from fractions import Fraction

import pytest

from nandstpm.array import ArrayGeometry
from nandstpm.errors import CapacityError, ConfigError
from nandstpm.perf import (
    PerfParams,
    estimate_pattern_query,
    estimate_query,
    sweep_patterns,
)

UNIT = PerfParams(
    wl_pulse_energy=1.0,
    bl_sense_energy=1.0,
    block_overhead_energy=1.0,
    wl_sequence_latency=1.0,
    bl_sense_latency=1.0,
)


def test_unit_energy_example():
    g = ArrayGeometry(blocks=2, dsl=1, wl=2, bl=3)
    report = estimate_query(g, active_blocks=2, active_bls_per_block=3, rounds=1, steps=1, pp=UNIT)
    assert report.energy_j == 12.0
    assert report.latency_s == 2.0
    assert report.breakdown == {"wl": 4.0, "bl_sense": 6.0, "block_overhead": 2.0}


def test_doubling_bls_doubles_only_the_sense_term():
    g = ArrayGeometry(blocks=4, dsl=2, wl=8, bl=100)
    pp = PerfParams()
    a = estimate_query(g, 4, 10, 1, 4, pp)
    b = estimate_query(g, 4, 20, 1, 4, pp)
    assert b.latency_s == a.latency_s
    assert b.breakdown["bl_sense"] == 2 * a.breakdown["bl_sense"]
    assert b.breakdown["wl"] == a.breakdown["wl"]
    assert b.breakdown["block_overhead"] == a.breakdown["block_overhead"]


def test_zero_params_zero_cost():
    zero = PerfParams(0.0, 0.0, 0.0, 0.0, 0.0)
    g = ArrayGeometry(blocks=2, dsl=1, wl=4, bl=4)
    report = estimate_query(g, 2, 4, 1, 2, zero)
    assert report.latency_s == 0.0 and report.energy_j == 0.0


def test_breakdown_closure():
    g = ArrayGeometry(blocks=8, dsl=3, wl=32, bl=512)
    report = estimate_query(g, 8, 300, 2, 10, PerfParams())
    assert report.energy_j == sum(report.breakdown.values())
    pattern_report = estimate_pattern_query(g, 8, 700, 10, PerfParams())
    assert pattern_report.energy_j == sum(pattern_report.breakdown.values())


def test_bounds_checked():
    g = ArrayGeometry(blocks=2, dsl=1, wl=4, bl=4)
    with pytest.raises(CapacityError):
        estimate_query(g, 3, 1, 1, 1, UNIT)
    with pytest.raises(CapacityError):
        estimate_query(g, 1, 5, 1, 1, UNIT)
    with pytest.raises(CapacityError):
        estimate_query(g, 1, 1, 2, 1, UNIT)
    with pytest.raises(CapacityError):
        estimate_query(g, 1, 1, 1, 3, UNIT)
    with pytest.raises(CapacityError):
        estimate_pattern_query(g, 1, 5, 1, UNIT)
    with pytest.raises(ConfigError):
        PerfParams(wl_pulse_energy=-1.0)


def test_latency_constant_within_round_regime():
    g = ArrayGeometry(blocks=64, dsl=3, wl=32, bl=13824)
    reports = sweep_patterns([50, 100, 200, 500], g, 64, 10, PerfParams())
    latencies = {r.latency_s for r in reports}
    assert len(latencies) == 1
    assert all(r.rounds == 1 for r in reports)


def test_energy_affine_in_count_unit_params():
    g = ArrayGeometry(blocks=4, dsl=2, wl=8, bl=1000)
    k = 100
    r_k, r_2k, r_3k = sweep_patterns([k, 2 * k, 3 * k], g, 4, 3, UNIT)
    # difference of adjacent points is exactly the per-pattern sense cost
    per_pattern = 4 * UNIT.bl_sense_energy
    assert r_2k.energy_j - r_k.energy_j == k * per_pattern
    assert r_3k.energy_j - r_2k.energy_j == k * per_pattern


def test_two_point_fit_reproduces_other_points():
    g = ArrayGeometry(blocks=64, dsl=3, wl=32, bl=13824)
    counts = [50, 100, 200, 500]

    exact = sweep_patterns(counts, g, 64, 10, UNIT)
    v = [Fraction(r.energy_j) for r in exact]
    slope = (v[-1] - v[0]) / (counts[-1] - counts[0])
    for c, val in zip(counts, v):
        assert val == v[0] + slope * (c - counts[0])

    default = sweep_patterns(counts, g, 64, 10, PerfParams())
    dv = [r.energy_j for r in default]
    dslope = (dv[-1] - dv[0]) / (counts[-1] - counts[0])
    for c, val in zip(counts, dv):
        fit = dv[0] + dslope * (c - counts[0])
        assert math.isclose(val, fit, rel_tol=1e-12)


def test_round_boundary_steps_latency():
    g = ArrayGeometry(blocks=2, dsl=2, wl=4, bl=2)
    below, above = sweep_patterns([2, 4], g, 2, 2, UNIT)
    assert below.rounds == 1 and above.rounds == 2
    assert above.latency_s == 2 * below.latency_s


def test_compact_round_toggle():
    g = ArrayGeometry(blocks=2, dsl=3, wl=4, bl=10)
    compact = estimate_pattern_query(g, 2, 5, 2, UNIT)
    full = estimate_pattern_query(g, 2, 5, 2, UNIT, compact_rounds=False)
    assert compact.rounds == 1
    assert full.rounds == 3
    assert full.latency_s == 3 * compact.latency_s


def test_active_bls_accounting():
    g = ArrayGeometry(blocks=2, dsl=2, wl=4, bl=4)
    report = estimate_pattern_query(g, 2, 6, 2, UNIT)
    assert report.rounds == 2
    assert report.active_bls == 6
    uniform = estimate_query(g, 2, 3, 2, 2, UNIT)
    assert uniform.active_bls == 6
