"""key=value parameter files for the device and cost models.

Lines look like ``vth.lvt = 0.5``; '#' starts a comment.  Missing keys keep
their defaults, unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import replace

from .device import DeviceParams
from .errors import ConfigError
from .perf import PerfParams

DEVICE_KEYS = {
    "vth.vth0l": "vth0l",
    "vth.lvt": "lvt",
    "vth.hvt": "hvt",
    "vth.vth0h": "vth0h",
    "read.vr0l": "vr0l",
    "read.vrl": "vrl",
    "read.vrh": "vrh",
    "read.vr0h": "vr0h",
    "current.on": "on_current",
    "current.off": "off_current",
    "current.sense_threshold": "sense_threshold_current",
    "memory_window": "memory_window",
}

PERF_KEYS = {
    "energy.wl_pulse": "wl_pulse_energy",
    "energy.bl_sense": "bl_sense_energy",
    "energy.block_overhead": "block_overhead_energy",
    "latency.wl_sequence": "wl_sequence_latency",
    "latency.bl_sense": "bl_sense_latency",
}


def parse_params_text(text: str) -> dict[str, float]:
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        try:
            values[key] = float(value.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad number for {key!r}: {exc}") from exc
    return values


def _build(values: dict[str, float], key_map: dict[str, str], defaults):
    unknown = sorted(set(values) - set(key_map))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    overrides = {key_map[k]: v for k, v in values.items()}
    return replace(defaults, **overrides)


def device_params_from_text(text: str) -> DeviceParams:
    return _build(parse_params_text(text), DEVICE_KEYS, DeviceParams())


def perf_params_from_text(text: str) -> PerfParams:
    return _build(parse_params_text(text), PERF_KEYS, PerfParams())


def load_device_params(path) -> DeviceParams:
    with open(path) as fh:
        return device_params_from_text(fh.read())


def load_perf_params(path) -> PerfParams:
    with open(path) as fh:
        return perf_params_from_text(fh.read())
