"""Two-transistor multi-level-cell model and its symbol match truth table.

One stored symbol occupies a pair of serially connected FeFETs.  The pair
conducts only when the gate voltages selected by the incoming symbol lie
above both programmed thresholds, which realizes exact match against the
stored symbol plus a wildcard state that always conducts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

from .errors import ConfigError


class VthLevel(IntEnum):
    """Programmable threshold states, ordered from lowest to highest."""

    VTH0L = 0
    LVT = 1
    HVT = 2
    VTH0H = 3


class ReadVoltage(IntEnum):
    """Gate read levels; each sits between two adjacent threshold states."""

    VR0L = 0
    VRL = 1
    VRH = 2
    VR0H = 3


class StoredSymbol(IntEnum):
    """Per time-step symbol held in the array."""

    PLUS = 0
    MINUS = 1
    ZERO = 2
    DONT_CARE = 3


class InputSymbol(IntEnum):
    """Per time-step symbol carried by an incoming event sequence."""

    PLUS = 0
    MINUS = 1
    ZERO = 2


class CellPair(NamedTuple):
    """Threshold states of the two transistors holding one stored symbol.

    Transistor ``a`` is the one nearer the string input side.
    """

    vth_a: VthLevel
    vth_b: VthLevel


@dataclass(frozen=True)
class DeviceParams:
    """Voltage and current operating point of the cell model.

    Match decisions depend only on the ordering of the levels; the defaults
    are one ordering-compliant choice with a 4 V window.  The idle (undriven)
    gate sits at 0 V, so HVT and VTH0H must stay above 0 V for undriven
    cells to block.
    """

    vth0l: float = -1.0
    lvt: float = 0.5
    hvt: float = 2.0
    vth0h: float = 3.0
    vr0l: float = -0.25
    vrl: float = 1.25
    vrh: float = 2.5
    vr0h: float = 3.5
    on_current: float = 1e-5
    off_current: float = 1e-12
    sense_threshold_current: float = 1e-7
    memory_window: float = 4.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        ladder = [
            ("vth0l", self.vth0l),
            ("vr0l", self.vr0l),
            ("lvt", self.lvt),
            ("vrl", self.vrl),
            ("hvt", self.hvt),
            ("vrh", self.vrh),
            ("vth0h", self.vth0h),
            ("vr0h", self.vr0h),
        ]
        for (lo_name, lo), (hi_name, hi) in zip(ladder, ladder[1:]):
            if not lo < hi:
                raise ConfigError(
                    f"voltage ladder violated: {lo_name}={lo} must be below {hi_name}={hi}"
                )
        if self.vth0h - self.vth0l > self.memory_window:
            raise ConfigError(
                f"threshold span {self.vth0h - self.vth0l} V exceeds the "
                f"{self.memory_window} V memory window"
            )
        if not self.off_current < self.sense_threshold_current < self.on_current:
            raise ConfigError(
                "currents must satisfy off < sense_threshold < on, got "
                f"off={self.off_current}, sense={self.sense_threshold_current}, "
                f"on={self.on_current}"
            )

    def vth(self, level: VthLevel) -> float:
        return (self.vth0l, self.lvt, self.hvt, self.vth0h)[level]

    def read(self, rv: ReadVoltage) -> float:
        return (self.vr0l, self.vrl, self.vrh, self.vr0h)[rv]


# Stored-side encoding.  '+1' and '-1' mirror each other on the two inner
# levels; the wildcard uses the lowest level twice so any read level opens
# both transistors.  '0' rides the two outer levels; of the two mirror
# placements that preserve the truth table, the a-side-high one is used,
# matching the '+1' orientation (see test_device for the exhaustive search).
_STORED_ENCODING: dict[StoredSymbol, CellPair] = {
    StoredSymbol.PLUS: CellPair(VthLevel.HVT, VthLevel.LVT),
    StoredSymbol.MINUS: CellPair(VthLevel.LVT, VthLevel.HVT),
    StoredSymbol.ZERO: CellPair(VthLevel.VTH0H, VthLevel.VTH0L),
    StoredSymbol.DONT_CARE: CellPair(VthLevel.VTH0L, VthLevel.VTH0L),
}

_INPUT_ENCODING: dict[InputSymbol, tuple[ReadVoltage, ReadVoltage]] = {
    InputSymbol.PLUS: (ReadVoltage.VRH, ReadVoltage.VRL),
    InputSymbol.MINUS: (ReadVoltage.VRL, ReadVoltage.VRH),
    InputSymbol.ZERO: (ReadVoltage.VR0H, ReadVoltage.VR0L),
}


def encode_stored(symbol: StoredSymbol) -> CellPair:
    """Threshold-state pair programmed for a stored symbol."""
    return _STORED_ENCODING[StoredSymbol(symbol)]


def encode_input(symbol: InputSymbol) -> tuple[ReadVoltage, ReadVoltage]:
    """Gate read-voltage pair applied for an incoming symbol."""
    return _INPUT_ENCODING[InputSymbol(symbol)]


def fefet_conducts(vth: VthLevel, gate_v: float, params: DeviceParams) -> bool:
    """Switch-level transistor model: conducts iff the gate is above threshold."""
    return gate_v > params.vth(vth)


def cell_conducts(stored: StoredSymbol, incoming: InputSymbol, params: DeviceParams) -> bool:
    """Evaluate one two-transistor cell under the incoming symbol's read voltages."""
    pair = encode_stored(stored)
    rv_a, rv_b = encode_input(incoming)
    return fefet_conducts(pair.vth_a, params.read(rv_a), params) and fefet_conducts(
        pair.vth_b, params.read(rv_b), params
    )


def symbols_match(stored: StoredSymbol, incoming: InputSymbol) -> bool:
    """Symbolic reference predicate: wildcard or same symbol."""
    return stored == StoredSymbol.DONT_CARE or int(stored) == int(incoming)
