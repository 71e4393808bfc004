"""Event-camera style workload generator.

Cross and plus shapes flash on a pixel grid; a leaky integrate-and-fire
neuron per pixel turns the flash into ON events, and the flash's falling
edge emits OFF events.  Events are binned into the pattern's time steps,
active pixels store the observed symbol sequence and everything off the
shape is masked with the wildcard.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .device import StoredSymbol
from .errors import ConfigError, DimensionError
from .patterns import SpatiotemporalPattern, event_triples

_PLUS = int(StoredSymbol.PLUS)
_MINUS = int(StoredSymbol.MINUS)
_ZERO = int(StoredSymbol.ZERO)
_X = int(StoredSymbol.DONT_CARE)

# Seed-stream tag separating query substreams from reference substreams.
_QUERY_STREAM = 0x51


@dataclass(frozen=True)
class LifParams:
    """Leaky integrate-and-fire neuron constants (SI units)."""

    tau_m: float = 0.005
    v_threshold: float = 0.85
    v_rest: float = 0.0
    v_reset: float = 0.0
    dt: float = 1e-4

    def __post_init__(self):
        if self.tau_m <= 0:
            raise ConfigError("tau_m must be positive")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.v_threshold <= self.v_rest:
            raise ConfigError("v_threshold must exceed v_rest")


@dataclass(frozen=True)
class Stimulus:
    """Square-wave drive applied to the pixels of one shape.

    ``amplitude`` is the steady-state membrane voltage a driven pixel would
    settle at; masked pixels receive zero drive.  ``on_intervals`` are
    half-open [t0, t1) spans in seconds.
    """

    shape: str
    height: int
    width: int
    amplitude: float
    duration: float
    steps: int
    on_intervals: tuple[tuple[float, float], ...]
    active: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.active, dtype=bool)
        if arr.shape != (self.height * self.width,):
            raise DimensionError("active mask must have one entry per pixel")
        arr.setflags(write=False)
        object.__setattr__(self, "active", arr)

    def envelope(self, t: float) -> bool:
        return any(t0 <= t < t1 for t0, t1 in self.on_intervals)

    def step_of(self, t: float) -> int:
        width = self.duration / self.steps
        return min(int(t / width), self.steps - 1)


@dataclass(frozen=True)
class SpikeTrain:
    """Binned events: (pixel, step, polarity) with at most one per bin."""

    events: tuple[tuple[int, int, int], ...]
    steps: int

    def __post_init__(self):
        seen = set()
        for pixel, step, pol in self.events:
            if (pixel, step) in seen:
                raise DimensionError(f"duplicate event in bin (pixel={pixel}, step={step})")
            seen.add((pixel, step))


def shape_mask(shape: str, height: int, width: int) -> np.ndarray:
    """Active-pixel mask: 'cross' drives both diagonals, 'plus' the center band."""
    mask = np.zeros((height, width), dtype=bool)
    if shape == "cross":
        if height != width:
            raise ConfigError("cross stimulus needs a square grid")
        idx = np.arange(height)
        mask[idx, idx] = True
        mask[idx, width - 1 - idx] = True
    elif shape == "plus":
        if height != width:
            raise ConfigError("plus stimulus needs a square grid")
        rows = [height // 2] if height % 2 else [height // 2 - 1, height // 2]
        cols = [width // 2] if width % 2 else [width // 2 - 1, width // 2]
        mask[rows, :] = True
        mask[:, cols] = True
    else:
        raise ConfigError(f"unsupported shape {shape!r}")
    return mask.reshape(-1)


def make_shape_stimulus(
    shape: str,
    grid: int = 8,
    amplitude: float = 1.2,
    duration: float = 0.06,
    steps: int = 10,
    on_intervals: tuple[tuple[float, float], ...] | None = None,
) -> Stimulus:
    """Default stimulus: one flash covering the first half of the horizon."""
    if grid < 1:
        raise ConfigError("grid must be >= 1")
    if on_intervals is None:
        on_intervals = ((0.0, duration / 2),)
    return Stimulus(
        shape=shape,
        height=grid,
        width=grid,
        amplitude=amplitude,
        duration=duration,
        steps=steps,
        on_intervals=on_intervals,
        active=shape_mask(shape, grid, grid),
    )


def constant_drive_spike_times(
    amplitude: float, duration: float, p: LifParams
) -> list[float]:
    """Spike times of one neuron under constant drive (for calibration checks)."""
    v = p.v_rest
    times = []
    n_ticks = int(round(duration / p.dt))
    for k in range(n_ticks):
        v += p.dt * ((p.v_rest - v) + amplitude) / p.tau_m
        if v >= p.v_threshold:
            times.append((k + 1) * p.dt)
            v = p.v_reset
    return times


def lif_simulate(stim: Stimulus, p: LifParams) -> SpikeTrain:
    """Integrate every pixel and bin threshold crossings into time steps.

    ON events (+1) fire at threshold crossings; OFF events (-1) fire at each
    falling edge of the stimulus envelope.  Within one (pixel, step) bin the
    first event wins.
    """
    if p.dt > stim.duration:
        raise ConfigError("dt exceeds the stimulus duration")
    if p.dt > p.tau_m / 10:
        raise ConfigError(
            f"dt={p.dt} too coarse for tau_m={p.tau_m}; need dt <= tau_m/10"
        )
    n_pixels = stim.height * stim.width
    amp = np.where(stim.active, stim.amplitude, 0.0)
    v = np.full(n_pixels, p.v_rest, dtype=float)
    n_ticks = int(round(stim.duration / p.dt))
    raw: list[tuple[float, int, int]] = []
    prev_on = stim.envelope(0.0)
    for k in range(n_ticks):
        t = k * p.dt
        on = stim.envelope(t)
        if prev_on and not on:
            for pixel in np.nonzero(stim.active)[0]:
                raw.append((t, int(pixel), -1))
        prev_on = on
        drive = amp if on else 0.0
        v += p.dt * ((p.v_rest - v) + drive) / p.tau_m
        crossed = v >= p.v_threshold
        if crossed.any():
            t_evt = (k + 1) * p.dt
            for pixel in np.nonzero(crossed)[0]:
                raw.append((t_evt, int(pixel), 1))
            v[crossed] = p.v_reset
    events: dict[tuple[int, int], int] = {}
    for t, pixel, pol in sorted(raw, key=lambda e: (e[1], e[0])):
        step = stim.step_of(t)
        if (pixel, step) not in events:
            events[(pixel, step)] = pol
    ordered = tuple(
        (pixel, step, pol) for (pixel, step), pol in sorted(events.items())
    )
    return SpikeTrain(events=ordered, steps=stim.steps)


def _perturb_events(
    events: Sequence[tuple[int, int, int]],
    steps: int,
    rng: np.random.Generator,
    p_jitter: float,
    p_flip: float,
) -> list[tuple[int, int, int]]:
    """Shift each event by one step / flip its polarity with the given odds.

    A shifted event that would land in an occupied bin falls back to its
    original bin, or is dropped when that is taken too.
    """
    ordered = sorted(events)
    n = len(ordered)
    if n == 0:
        return []
    jitter = rng.random(n) < p_jitter
    direction = rng.integers(0, 2, size=n) * 2 - 1
    flips = rng.random(n) < p_flip
    taken: set[tuple[int, int]] = set()
    out = []
    for i, (pixel, step, pol) in enumerate(ordered):
        new_step = step
        if jitter[i]:
            new_step = int(np.clip(step + direction[i], 0, steps - 1))
        if (pixel, new_step) in taken:
            new_step = step
            if (pixel, new_step) in taken:
                continue
        new_pol = -pol if flips[i] else pol
        taken.add((pixel, new_step))
        out.append((pixel, new_step, new_pol))
    return sorted(out)


def _reference_from_events(
    events: Sequence[tuple[int, int, int]],
    active: np.ndarray,
    grid: int,
    steps: int,
) -> SpatiotemporalPattern:
    symbols = np.full((grid * grid, steps), _X, dtype=np.int8)
    symbols[active] = _ZERO
    for pixel, step, pol in events:
        symbols[pixel, step] = _PLUS if pol > 0 else _MINUS
    return SpatiotemporalPattern(height=grid, width=grid, steps=steps, symbols=symbols)


def _query_from_events(
    events: Sequence[tuple[int, int, int]], grid: int, steps: int
) -> SpatiotemporalPattern:
    symbols = np.full((grid * grid, steps), _ZERO, dtype=np.int8)
    for pixel, step, pol in events:
        symbols[pixel, step] = _PLUS if pol > 0 else _MINUS
    return SpatiotemporalPattern(height=grid, width=grid, steps=steps, symbols=symbols)


def generate_dataset(
    n: int,
    shapes: Sequence[str] = ("cross", "plus"),
    seed: int = 0,
    grid: int = 8,
    steps: int = 10,
    p_jitter: float = 0.1,
    p_flip: float = 0.02,
    n_queries: int = 0,
    query_p_jitter: float = 0.0,
    query_p_flip: float = 0.0,
    lif: LifParams = LifParams(),
    amplitude: float = 1.2,
    duration: float = 0.06,
) -> tuple[list[SpatiotemporalPattern], list[SpatiotemporalPattern]]:
    """Reference patterns plus queries derived from them.

    Pattern j uses shape ``shapes[j % len(shapes)]`` and an independent
    seeded substream, so regeneration is bit-stable and order-independent.
    Queries copy a seeded-chosen reference's events (wildcard pixels become
    quiet) and then get their own perturbation.
    """
    if n < 1:
        raise ConfigError("n must be >= 1")
    if not shapes:
        raise ConfigError("at least one shape is required")
    stimuli = {
        s: make_shape_stimulus(s, grid=grid, amplitude=amplitude, duration=duration, steps=steps)
        for s in dict.fromkeys(shapes)
    }
    base = {s: lif_simulate(stim, lif) for s, stim in stimuli.items()}

    references = []
    for j in range(n):
        shape = shapes[j % len(shapes)]
        rng = np.random.default_rng([seed, j])
        events = _perturb_events(base[shape].events, steps, rng, p_jitter, p_flip)
        references.append(
            _reference_from_events(events, stimuli[shape].active, grid, steps)
        )

    queries = []
    for k in range(n_queries):
        rng = np.random.default_rng([seed, _QUERY_STREAM, k])
        source = int(rng.integers(n))
        events = _perturb_events(
            event_triples(references[source]), steps, rng, query_p_jitter, query_p_flip
        )
        queries.append(_query_from_events(events, grid, steps))
    return references, queries
