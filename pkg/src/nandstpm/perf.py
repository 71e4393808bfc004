"""Analytic latency and energy model of an array query.

Latency is per sensing round and does not depend on how many bit lines are
sensed; energy is charged per word-line pulse, per bit-line sense and per
active block, so it grows affinely with the number of stored patterns.
Absolute joules and seconds come from user calibration; the shipped
defaults are placeholders.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .array import ArrayGeometry
from .errors import CapacityError, ConfigError

ENERGY_FORMULA = (
    "energy = sum over rounds of active_blocks * "
    "((2*steps + pass_wls) * wl_pulse_energy + bls_in_round * bl_sense_energy "
    "+ block_overhead_energy)"
)
LATENCY_FORMULA = "latency = rounds * (wl_sequence_latency + bl_sense_latency)"


@dataclass(frozen=True)
class PerfParams:
    """Per-operation costs. Defaults are placeholder magnitudes, not calibration."""

    wl_pulse_energy: float = 1e-12
    bl_sense_energy: float = 5e-13
    block_overhead_energy: float = 1e-11
    wl_sequence_latency: float = 1e-6
    bl_sense_latency: float = 5e-7

    def __post_init__(self):
        for name in (
            "wl_pulse_energy",
            "bl_sense_energy",
            "block_overhead_energy",
            "wl_sequence_latency",
            "bl_sense_latency",
        ):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")


@dataclass(frozen=True)
class PerfReport:
    """Latency/energy estimate for one query.

    ``active_bls`` counts bit-line senses per block summed over rounds.
    ``breakdown`` splits the energy into wl / bl_sense / block_overhead and
    sums exactly to ``energy_j``.
    """

    latency_s: float
    energy_j: float
    breakdown: dict[str, float]
    active_blocks: int
    active_bls: int
    rounds: int
    formula: str = f"{LATENCY_FORMULA}; {ENERGY_FORMULA}"


def estimate_query(
    g: ArrayGeometry,
    active_blocks: int,
    active_bls_per_block: int,
    rounds: int,
    steps: int,
    pp: PerfParams,
) -> PerfReport:
    """Cost of a query that senses the same bit-line count in every round."""
    if not 1 <= active_blocks <= g.blocks:
        raise CapacityError(
            f"active_blocks {active_blocks} outside 1..{g.blocks}", dimension="blocks"
        )
    if not 0 <= active_bls_per_block <= g.bl:
        raise CapacityError(
            f"active_bls_per_block {active_bls_per_block} outside 0..{g.bl}",
            dimension="patterns",
        )
    if not 1 <= rounds <= g.dsl:
        raise CapacityError(f"rounds {rounds} outside 1..{g.dsl}", dimension="rounds")
    if not 1 <= steps <= g.wl // 2:
        raise CapacityError(
            f"steps {steps} outside 1..{g.wl // 2}", dimension="steps"
        )

    pass_wls = g.wl - 2 * steps
    wl_pulses = 2 * steps + pass_wls
    energy_wl = rounds * active_blocks * wl_pulses * pp.wl_pulse_energy
    energy_bl = rounds * active_blocks * active_bls_per_block * pp.bl_sense_energy
    energy_overhead = rounds * active_blocks * pp.block_overhead_energy
    latency = rounds * (pp.wl_sequence_latency + pp.bl_sense_latency)
    breakdown = {
        "wl": energy_wl,
        "bl_sense": energy_bl,
        "block_overhead": energy_overhead,
    }
    return PerfReport(
        latency_s=latency,
        energy_j=energy_wl + energy_bl + energy_overhead,
        breakdown=breakdown,
        active_blocks=active_blocks,
        active_bls=rounds * active_bls_per_block,
        rounds=rounds,
    )


def estimate_pattern_query(
    g: ArrayGeometry,
    active_blocks: int,
    stored_count: int,
    steps: int,
    pp: PerfParams,
    compact_rounds: bool = True,
) -> PerfReport:
    """Cost of querying ``stored_count`` patterns laid out DSL-by-DSL.

    The last round may sense fewer bit lines; energy therefore stays exactly
    affine in the pattern count inside a fixed round regime.
    """
    if stored_count < 1:
        raise CapacityError("stored_count must be >= 1", dimension="patterns")
    max_patterns = g.dsl * g.bl
    if stored_count > max_patterns:
        raise CapacityError(
            f"{stored_count} patterns exceed capacity {max_patterns}",
            dimension="patterns",
        )
    if not 1 <= steps <= g.wl // 2:
        raise CapacityError(f"steps {steps} outside 1..{g.wl // 2}", dimension="steps")
    if not 1 <= active_blocks <= g.blocks:
        raise CapacityError(
            f"active_blocks {active_blocks} outside 1..{g.blocks}", dimension="blocks"
        )
    occupied = (stored_count + g.bl - 1) // g.bl
    rounds = occupied if compact_rounds else g.dsl
    pass_wls = g.wl - 2 * steps
    wl_pulses = 2 * steps + pass_wls

    # Per-round fixed cost plus one sense per stored pattern.
    energy_wl = rounds * active_blocks * wl_pulses * pp.wl_pulse_energy
    energy_bl = active_blocks * stored_count * pp.bl_sense_energy
    energy_overhead = rounds * active_blocks * pp.block_overhead_energy
    latency = rounds * (pp.wl_sequence_latency + pp.bl_sense_latency)
    breakdown = {
        "wl": energy_wl,
        "bl_sense": energy_bl,
        "block_overhead": energy_overhead,
    }
    return PerfReport(
        latency_s=latency,
        energy_j=energy_wl + energy_bl + energy_overhead,
        breakdown=breakdown,
        active_blocks=active_blocks,
        active_bls=stored_count,
        rounds=rounds,
    )


def sweep_patterns(
    counts: list[int],
    g: ArrayGeometry,
    active_blocks: int,
    steps: int,
    pp: PerfParams,
    compact_rounds: bool = True,
) -> list[PerfReport]:
    """One report per stored-pattern count, same workload otherwise."""
    return [
        estimate_pattern_query(
            g, active_blocks, count, steps, pp, compact_rounds=compact_rounds
        )
        for count in counts
    ]


def reports_to_csv(reports: list[PerfReport]) -> str:
    """Flatten reports into CSV rows (one per report)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "latency_s",
            "energy_j",
            "energy_wl_j",
            "energy_bl_sense_j",
            "energy_block_overhead_j",
            "active_blocks",
            "active_bls",
            "rounds",
        ]
    )
    for r in reports:
        writer.writerow(
            [
                repr(r.latency_s),
                repr(r.energy_j),
                repr(r.breakdown["wl"]),
                repr(r.breakdown["bl_sense"]),
                repr(r.breakdown["block_overhead"]),
                r.active_blocks,
                r.active_bls,
                r.rounds,
            ]
        )
    return buf.getvalue()
