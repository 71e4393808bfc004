"""Block/bit-line organization of strings and parallel array queries.

Each pixel owns one block; reference pattern j lands in the same
(drain-select line, bit line) slot of every block, so a pattern matches the
query exactly when its slot senses high in all blocks at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .device import (
    DeviceParams,
    ReadVoltage,
    StoredSymbol,
    VthLevel,
    encode_stored,
    fefet_conducts,
)
from .errors import CapacityError, DimensionError, MissingBlockError
from .patterns import SpatiotemporalPattern, document_to_patterns, patterns_to_document
from .strings import PulseSchedule, StringProgram, build_pulse_schedule, program_string


@dataclass(frozen=True)
class ArrayGeometry:
    """blocks x drain-select lines x word lines x bit lines."""

    blocks: int
    dsl: int
    wl: int
    bl: int

    def __post_init__(self):
        for name in ("blocks", "dsl", "wl", "bl"):
            if getattr(self, name) < 1:
                raise CapacityError(f"{name} must be >= 1", dimension=name)


def capacity(g: ArrayGeometry) -> tuple[int, int]:
    """(time steps per string, patterns per pixel block) the geometry can hold."""
    return g.wl // 2, g.dsl * g.bl


def slot_of_pattern(j: int, g: ArrayGeometry) -> tuple[int, int]:
    """Pattern index -> (dsl, bl) slot; one DSL fills completely before the next."""
    return j // g.bl, j % g.bl


def pattern_of_slot(dsl: int, bl: int, g: ArrayGeometry) -> int:
    return dsl * g.bl + bl


@dataclass
class ArrayState:
    """Immutable-after-programming contents of the array.

    ``programs`` maps (block, dsl, bl) to the string stored there;
    ``block_symbols`` caches the same contents as one int8 matrix per block
    for vectorized evaluation.
    """

    geometry: ArrayGeometry
    height: int
    width: int
    steps: int
    pixel_of_block: dict[int, int]
    programs: dict[tuple[int, int, int], StringProgram]
    stored_count: int
    block_symbols: dict[int, np.ndarray] = field(repr=False, default_factory=dict)

    @property
    def used_blocks(self) -> list[int]:
        return sorted(self.pixel_of_block)

    @property
    def occupied_dsl(self) -> int:
        if self.stored_count == 0:
            return 0
        return (self.stored_count + self.geometry.bl - 1) // self.geometry.bl


@dataclass(frozen=True)
class QueryResult:
    """Sensing outcome of one array query."""

    per_block_hits: dict[int, frozenset[tuple[int, int]]]
    matches: frozenset[int]
    sense_rounds: int


def program_array(
    refs: Sequence[SpatiotemporalPattern], g: ArrayGeometry
) -> ArrayState:
    """Store reference patterns: block = pixel (row-major), slot = pattern index."""
    if not refs:
        raise DimensionError("at least one reference pattern is required")
    height, width, steps = refs[0].height, refs[0].width, refs[0].steps
    for i, r in enumerate(refs):
        if (r.height, r.width, r.steps) != (height, width, steps):
            raise DimensionError(f"reference {i} dimensions differ from reference 0")
    pixels = height * width
    max_steps, max_patterns = capacity(g)
    if pixels > g.blocks:
        raise CapacityError(
            f"{pixels} pixels need {pixels} blocks, geometry has {g.blocks}",
            dimension="blocks",
        )
    if steps > max_steps:
        raise CapacityError(
            f"{steps} time steps exceed the {max_steps} the word lines can hold",
            dimension="steps",
        )
    if len(refs) > max_patterns:
        raise CapacityError(
            f"{len(refs)} patterns exceed the {max_patterns} slots per block",
            dimension="patterns",
        )

    pixel_of_block = {p: p for p in range(pixels)}
    programs: dict[tuple[int, int, int], StringProgram] = {}
    block_symbols: dict[int, np.ndarray] = {}
    for block in range(pixels):
        pixel = pixel_of_block[block]
        mat = np.stack([r.symbols[pixel] for r in refs])
        mat.setflags(write=False)
        block_symbols[block] = mat
        for j, ref in enumerate(refs):
            d, b = slot_of_pattern(j, g)
            programs[(block, d, b)] = program_string(ref.pixel_sequence(pixel), g.wl)
    return ArrayState(
        geometry=g,
        height=height,
        width=width,
        steps=steps,
        pixel_of_block=pixel_of_block,
        programs=programs,
        stored_count=len(refs),
        block_symbols=block_symbols,
    )


def _tick_conduction_lut(sched: PulseSchedule, params: DeviceParams) -> np.ndarray:
    """lut[tick, cell, stored_code] = that cell conducts at that tick.

    During its pulse a cell sees the scheduled read-voltage pair; outside it
    the word line sits at 0 V.  Entries come from the switch-level transistor
    model, evaluated once per (gate drive, stored state) combination and
    shared by every string of the block.
    """
    n = sched.ticks
    ticks = np.arange(n)
    lut = np.zeros((n, n, len(StoredSymbol)), dtype=bool)
    for i, pulse in enumerate(sched.pulses):
        gate_a = params.read(pulse.voltage_pair[0])
        gate_b = params.read(pulse.voltage_pair[1])
        in_pulse = (ticks >= pulse.start) & (ticks < pulse.start + pulse.width)
        for code in range(len(StoredSymbol)):
            pair = encode_stored(StoredSymbol(code))
            active = fefet_conducts(pair.vth_a, gate_a, params) and fefet_conducts(
                pair.vth_b, gate_b, params
            )
            idle = fefet_conducts(pair.vth_a, 0.0, params) and fefet_conducts(
                pair.vth_b, 0.0, params
            )
            lut[in_pulse, i, code] = active
            lut[~in_pulse, i, code] = idle
    return lut


def query(
    state: ArrayState,
    q: SpatiotemporalPattern,
    params: DeviceParams,
    delta_t: float,
    compact_rounds: bool = True,
) -> QueryResult:
    """Broadcast the query's per-pixel pulse schedules and sense every block.

    All strings of a block share the schedule built from that pixel's input
    sequence; a slot registers a hit when its string conducts at some tick.
    With ``compact_rounds`` only drain-select lines that hold patterns are
    sensed; otherwise every DSL costs a round.
    """
    if (q.height, q.width, q.steps) != (state.height, state.width, state.steps):
        raise DimensionError(
            f"query is {q.height}x{q.width}x{q.steps}, array stores "
            f"{state.height}x{state.width}x{state.steps}"
        )
    g = state.geometry
    pass_cells = g.wl - 2 * state.steps
    pass_on = pass_cells == 0 or fefet_conducts(
        VthLevel.VTH0L, params.read(ReadVoltage.VR0H), params
    )
    cell_cols = np.arange(state.steps)

    per_block_hits: dict[int, frozenset[tuple[int, int]]] = {}
    for block in state.used_blocks:
        input_seq = q.as_query_sequence(state.pixel_of_block[block])
        sched = build_pulse_schedule(input_seq, delta_t)
        lut = _tick_conduction_lut(sched, params)
        kinds = state.block_symbols[block]
        conducts = np.zeros(state.stored_count, dtype=bool)
        if pass_on:
            for tick in range(state.steps):
                on = lut[tick][cell_cols, kinds]
                conducts |= on.all(axis=1)
        hits = frozenset(
            slot_of_pattern(int(j), g) for j in np.nonzero(conducts)[0]
        )
        per_block_hits[block] = hits

    matches = aggregate(state, per_block_hits)
    rounds = state.occupied_dsl if compact_rounds else g.dsl
    return QueryResult(
        per_block_hits=per_block_hits,
        matches=frozenset(matches),
        sense_rounds=rounds,
    )


def aggregate(
    state: ArrayState, per_block_hits: Mapping[int, frozenset[tuple[int, int]]]
) -> set[int]:
    """Cross-block AND: a pattern matches when its slot is high in every block."""
    if not per_block_hits:
        raise MissingBlockError("no block hits were provided")
    missing = [b for b in state.used_blocks if b not in per_block_hits]
    if missing:
        raise MissingBlockError(f"hits missing for blocks {missing}")
    common = None
    for block in state.used_blocks:
        hits = set(per_block_hits[block])
        common = hits if common is None else common & hits
    g = state.geometry
    return {
        pattern_of_slot(d, b, g)
        for d, b in common
        if pattern_of_slot(d, b, g) < state.stored_count
    }


def state_to_document(state: ArrayState) -> dict:
    """Dump geometry plus the stored patterns for reproducible reloads."""
    g = state.geometry
    refs = []
    n = state.stored_count
    grids = np.empty((n, state.height * state.width, state.steps), dtype=np.int8)
    for block in state.used_blocks:
        grids[:, state.pixel_of_block[block], :] = state.block_symbols[block]
    for j in range(n):
        refs.append(
            SpatiotemporalPattern(
                height=state.height, width=state.width, steps=state.steps, symbols=grids[j]
            )
        )
    doc = patterns_to_document(refs)
    doc["geometry"] = {"blocks": g.blocks, "dsl": g.dsl, "wl": g.wl, "bl": g.bl}
    return doc


def document_to_state(doc: dict) -> ArrayState:
    try:
        gdoc = doc["geometry"]
        g = ArrayGeometry(
            blocks=int(gdoc["blocks"]), dsl=int(gdoc["dsl"]),
            wl=int(gdoc["wl"]), bl=int(gdoc["bl"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError(f"malformed array document: {exc}") from exc
    refs = document_to_patterns(doc)
    return program_array(refs, g)
