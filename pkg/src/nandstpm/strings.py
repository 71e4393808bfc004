"""Single NAND string simulation with pulse-width sequence detection.

Stored symbols occupy two word lines each; trailing word lines hold pass
transistors.  Incoming symbols drive the gate pairs with staggered pulses
whose widths shrink toward the string top, so a correct temporal order is
the only way to open every transistor at once.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .device import (
    CellPair,
    DeviceParams,
    InputSymbol,
    ReadVoltage,
    StoredSymbol,
    VthLevel,
    encode_input,
    encode_stored,
    fefet_conducts,
    symbols_match,
)
from .errors import CapacityError, ConfigError, DimensionError


@dataclass(frozen=True)
class StringProgram:
    """Programmed contents of one string: cell pairs plus trailing pass cells."""

    cells: tuple[CellPair, ...]
    pass_cells: int

    @property
    def word_lines(self) -> int:
        return 2 * len(self.cells) + self.pass_cells


class GatePulse(NamedTuple):
    """One cell's gate drive: start/width in unit-pulse ticks, plus the voltage pair."""

    start: int
    width: int
    voltage_pair: tuple[ReadVoltage, ReadVoltage]


@dataclass(frozen=True)
class PulseSchedule:
    """Per-cell gate pulses; all pulses end together at ``len(pulses)`` ticks."""

    pulses: tuple[GatePulse, ...]
    delta_t: float

    def __post_init__(self):
        n = len(self.pulses)
        if n == 0:
            raise DimensionError("a pulse schedule needs at least one pulse")
        if self.delta_t <= 0:
            raise ConfigError(f"delta_t must be positive, got {self.delta_t}")
        for i, pulse in enumerate(self.pulses):
            if pulse.start < 0 or pulse.width < 1:
                raise ConfigError(f"pulse {i} has start {pulse.start}, width {pulse.width}")
            if pulse.start + pulse.width != n:
                raise ConfigError(
                    f"pulse {i} ends at tick {pulse.start + pulse.width}, expected {n}"
                )

    @property
    def ticks(self) -> int:
        return len(self.pulses)


@dataclass(frozen=True)
class StringDecision:
    """Outcome of one string evaluation.

    ``conduction_window`` is the half-open tick interval during which every
    transistor conducted, or None when the string stayed off.
    """

    conducts: bool
    conduction_window: tuple[int, int] | None
    bl_current: float


def program_string(ref_seq: Sequence[StoredSymbol], wl_count: int) -> StringProgram:
    """Map a stored symbol sequence onto a string of ``wl_count`` word lines.

    Each symbol takes two word lines; the remainder become always-on pass
    cells programmed to the lowest threshold state.
    """
    needed = 2 * len(ref_seq)
    if needed > wl_count:
        raise CapacityError(
            f"{len(ref_seq)} symbols need {needed} word lines, string has {wl_count}",
            dimension="word_lines",
        )
    cells = tuple(encode_stored(s) for s in ref_seq)
    return StringProgram(cells=cells, pass_cells=wl_count - needed)


def build_pulse_schedule(input_seq: Sequence[InputSymbol], delta_t: float) -> PulseSchedule:
    """Stagger the incoming symbols so every pulse ends at the same instant.

    Symbol i (0-based) starts at tick i with width ``n - i``, giving the
    bottom cell the widest pulse and creating a single unit-width interval
    where a fully matched string conducts.
    """
    n = len(input_seq)
    if n == 0:
        raise DimensionError("input sequence must not be empty")
    pulses = tuple(
        GatePulse(start=i, width=n - i, voltage_pair=encode_input(x))
        for i, x in enumerate(input_seq)
    )
    return PulseSchedule(pulses=pulses, delta_t=delta_t)


def _cell_on(cell: CellPair, pulse: GatePulse, tick: int, params: DeviceParams) -> bool:
    # Undriven word lines sit at 0 V.
    if pulse.start <= tick < pulse.start + pulse.width:
        gate_a = params.read(pulse.voltage_pair[0])
        gate_b = params.read(pulse.voltage_pair[1])
    else:
        gate_a = gate_b = 0.0
    return fefet_conducts(cell.vth_a, gate_a, params) and fefet_conducts(
        cell.vth_b, gate_b, params
    )


def simulate_string(
    prog: StringProgram, sched: PulseSchedule, params: DeviceParams
) -> StringDecision:
    """Discrete-time evaluation of one string over the schedule's tick range.

    The string conducts iff there is a tick at which every cell transistor
    and every pass transistor is on simultaneously.  Pass cells are driven
    at the highest read voltage for the whole evaluation.
    """
    if len(prog.cells) != len(sched.pulses):
        raise DimensionError(
            f"program holds {len(prog.cells)} cells but schedule has {len(sched.pulses)} pulses"
        )
    pass_on = prog.pass_cells == 0 or fefet_conducts(
        VthLevel.VTH0L, params.read(ReadVoltage.VR0H), params
    )
    on_ticks = []
    if pass_on:
        for tick in range(sched.ticks):
            if all(
                _cell_on(cell, pulse, tick, params)
                for cell, pulse in zip(prog.cells, sched.pulses)
            ):
                on_ticks.append(tick)
    conducts = bool(on_ticks)
    window = (on_ticks[0], on_ticks[-1] + 1) if conducts else None
    current = params.on_current if conducts else params.off_current
    return StringDecision(conducts=conducts, conduction_window=window, bl_current=current)


def string_match_oracle(
    ref_seq: Sequence[StoredSymbol], input_seq: Sequence[InputSymbol]
) -> bool:
    """Logical reference model: every position is a wildcard or an exact match."""
    if len(ref_seq) != len(input_seq):
        raise DimensionError(
            f"reference length {len(ref_seq)} != input length {len(input_seq)}"
        )
    return all(symbols_match(r, x) for r, x in zip(ref_seq, input_seq))


def trace_rows(
    prog: StringProgram, sched: PulseSchedule, params: DeviceParams
) -> list[tuple]:
    """Per-tick conduction trace: (tick, cell bits..., pass bit, string current)."""
    if len(prog.cells) != len(sched.pulses):
        raise DimensionError("program/schedule length mismatch")
    pass_on = prog.pass_cells == 0 or fefet_conducts(
        VthLevel.VTH0L, params.read(ReadVoltage.VR0H), params
    )
    rows = []
    for tick in range(sched.ticks):
        bits = [
            int(_cell_on(cell, pulse, tick, params))
            for cell, pulse in zip(prog.cells, sched.pulses)
        ]
        string_on = all(bits) and pass_on
        current = params.on_current if string_on else params.off_current
        rows.append((tick, *bits, int(pass_on), current))
    return rows


def write_trace_csv(
    path, prog: StringProgram, sched: PulseSchedule, params: DeviceParams
) -> None:
    header = ["tick"] + [f"cell{i}" for i in range(len(prog.cells))] + ["pass", "bl_current"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(trace_rows(prog, sched, params))
