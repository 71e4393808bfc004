"""Pixel-grid pattern type and its JSON file format.

A pattern is a dense (pixels x time steps) grid of symbols.  References use
the full "+-0X" alphabet; queries use "+-0".  Pixels are indexed row-major.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .device import InputSymbol, StoredSymbol
from .errors import ConfigError, DimensionError

SYMBOL_CHARS = "+-0X"
_CHAR_TO_CODE = {c: i for i, c in enumerate(SYMBOL_CHARS)}
_X = int(StoredSymbol.DONT_CARE)


@dataclass(frozen=True, eq=False)
class SpatiotemporalPattern:
    """One pixels-by-steps symbol grid.

    ``symbols`` has shape (height * width, steps) with StoredSymbol codes;
    a query pattern simply never contains the wildcard code.
    """

    height: int
    width: int
    steps: int
    symbols: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.symbols, dtype=np.int8)
        if arr.shape != (self.height * self.width, self.steps):
            raise DimensionError(
                f"symbols shape {arr.shape} does not match "
                f"({self.height * self.width}, {self.steps})"
            )
        if arr.size and (arr.min() < 0 or arr.max() > _X):
            raise ConfigError("symbol codes out of range")
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)

    @property
    def pixels(self) -> int:
        return self.height * self.width

    def pixel_sequence(self, pixel: int) -> list[StoredSymbol]:
        return [StoredSymbol(int(v)) for v in self.symbols[pixel]]

    def contains_dont_care(self) -> bool:
        return bool((self.symbols == _X).any())

    def as_query_sequence(self, pixel: int) -> list[InputSymbol]:
        row = self.symbols[pixel]
        if (row == _X).any():
            raise ConfigError("query patterns must not contain 'X'")
        return [InputSymbol(int(v)) for v in row]

    def to_strings(self) -> list[str]:
        return ["".join(SYMBOL_CHARS[v] for v in row) for row in self.symbols]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpatiotemporalPattern):
            return NotImplemented
        return (
            (self.height, self.width, self.steps) == (other.height, other.width, other.steps)
            and bool(np.array_equal(self.symbols, other.symbols))
        )

    def __hash__(self):
        return hash((self.height, self.width, self.steps, self.symbols.tobytes()))


def pattern_from_strings(
    height: int, width: int, steps: int, rows: Sequence[str], query: bool = False
) -> SpatiotemporalPattern:
    """Build a pattern from one symbol string per pixel."""
    if len(rows) != height * width:
        raise DimensionError(f"expected {height * width} pixel strings, got {len(rows)}")
    grid = np.empty((height * width, steps), dtype=np.int8)
    for p, row in enumerate(rows):
        if len(row) != steps:
            raise DimensionError(f"pixel {p} has {len(row)} symbols, expected {steps}")
        for t, ch in enumerate(row):
            code = _CHAR_TO_CODE.get(ch)
            if code is None:
                raise ConfigError(f"unknown symbol {ch!r} at pixel {p}, step {t}")
            if query and code == _X:
                raise ConfigError(f"query pattern contains 'X' at pixel {p}, step {t}")
            grid[p, t] = code
    return SpatiotemporalPattern(height=height, width=width, steps=steps, symbols=grid)


def event_triples(pattern: SpatiotemporalPattern) -> tuple[tuple[int, int, int], ...]:
    """(pixel, step, polarity) triples for the non-zero, non-wildcard entries."""
    plus = int(StoredSymbol.PLUS)
    minus = int(StoredSymbol.MINUS)
    out = []
    for pixel, step in zip(*np.nonzero((pattern.symbols == plus) | (pattern.symbols == minus))):
        pol = 1 if pattern.symbols[pixel, step] == plus else -1
        out.append((int(pixel), int(step), pol))
    return tuple(out)


def patterns_to_document(
    patterns: Sequence[SpatiotemporalPattern],
    height: int | None = None,
    width: int | None = None,
    steps: int | None = None,
) -> dict:
    """Serialize patterns into the interchange document."""
    if patterns:
        height, width, steps = patterns[0].height, patterns[0].width, patterns[0].steps
    if height is None or width is None or steps is None:
        raise DimensionError("dimensions are required for an empty pattern list")
    for i, p in enumerate(patterns):
        if (p.height, p.width, p.steps) != (height, width, steps):
            raise DimensionError(f"pattern {i} dimensions differ from the document's")
    return {
        "height": height,
        "width": width,
        "steps": steps,
        "patterns": [
            {"id": i, "symbols": p.to_strings()} for i, p in enumerate(patterns)
        ],
    }


def document_to_patterns(doc: dict, query: bool = False) -> list[SpatiotemporalPattern]:
    """Parse the interchange document back into patterns (ordered by id)."""
    try:
        height, width, steps = int(doc["height"]), int(doc["width"]), int(doc["steps"])
        entries = doc["patterns"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed pattern document: {exc}") from exc
    out = []
    for entry in sorted(entries, key=lambda e: e["id"]):
        out.append(pattern_from_strings(height, width, steps, entry["symbols"], query=query))
    return out


def write_pattern_file(path, patterns, height=None, width=None, steps=None) -> None:
    doc = patterns_to_document(patterns, height=height, width=width, steps=steps)
    with open(path, "w") as fh:
        fh.write(dumps_document(doc))


def read_pattern_file(path, query: bool = False) -> list[SpatiotemporalPattern]:
    with open(path) as fh:
        doc = json.load(fh)
    return document_to_patterns(doc, query=query)


def dumps_document(doc: dict) -> str:
    """Canonical serialization used everywhere a document hits disk."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
