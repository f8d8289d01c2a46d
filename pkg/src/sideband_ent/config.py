"""
Flat ``key = value`` configuration files.

One assignment per line, ``#`` starts a comment, SI units. Physical-parameter
files use the field names of :class:`~sideband_ent.model.PhysicalParams`::

    power = 10                    # W
    laser_frequency = 2e15        # rad/s
    mechanical_frequency = 5e8    # rad/s
    detection_bandwidth = 1e7     # Hz
    mode_bandwidth = 1e3          # Hz
    effective_mass = 1e-10        # kg
    temperature = 300             # K, optional (default 300)
    incidence_angle = 0           # rad, optional (default 0)

Sweep files use the fields of :class:`~sideband_ent.sweep.SweepSpec`, with
comma-separated ``nbar_list`` and ``outputs``.
"""

from __future__ import annotations

import io
import math
import sys
from pathlib import Path

from .errors import ConfigError
from .model import PhysicalParams
from .sweep import SweepSpec

REQUIRED_PHYSICAL = (
    "power",
    "laser_frequency",
    "mechanical_frequency",
    "detection_bandwidth",
    "mode_bandwidth",
    "effective_mass",
)
OPTIONAL_PHYSICAL = {"temperature": 300.0, "incidence_angle": 0.0}
SWEEP_KEYS = ("tau_min", "tau_max", "points", "r", "nbar_list", "outputs")


def _read(source) -> str:
    if source is None or source == "-":
        return sys.stdin.read()
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return source.read()
    return Path(source).read_text()


def _assignments(text: str, allowed) -> tuple[dict, dict, list[str]]:
    values, where, problems = {}, {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in allowed:
            problems.append(f"line {lineno}: unknown key '{key}'")
        elif key in values:
            problems.append(f"line {lineno}: duplicate key '{key}' (first set on line {where[key]})")
        else:
            values[key], where[key] = value, lineno
    return values, where, problems


def _number(key, text, where, problems, kind=float):
    try:
        value = kind(text)
    except ValueError:
        problems.append(f"line {where[key]}: '{key}' is not a valid {kind.__name__}: {text!r}")
        return None
    if kind is float and not math.isfinite(value):
        problems.append(f"line {where[key]}: '{key}' must be finite")
        return None
    return value


def parse_physical(text: str) -> PhysicalParams:
    values, where, problems = _assignments(text, REQUIRED_PHYSICAL + tuple(OPTIONAL_PHYSICAL))
    missing = [k for k in REQUIRED_PHYSICAL if k not in values]
    if missing:
        problems.append("missing required keys: " + ", ".join(missing))
    parsed = dict(OPTIONAL_PHYSICAL)
    for key, text_value in values.items():
        value = _number(key, text_value, where, problems)
        if value is None:
            continue
        if key in REQUIRED_PHYSICAL and value <= 0:
            problems.append(f"line {where[key]}: '{key}' must be > 0, got {value}")
        elif key in OPTIONAL_PHYSICAL and value < 0:
            problems.append(f"line {where[key]}: '{key}' must be >= 0, got {value}")
        parsed[key] = value
    if problems:
        raise ConfigError(problems)
    return PhysicalParams(**parsed)


def parse_sweep(text: str, base: SweepSpec | None = None) -> SweepSpec:
    values, where, problems = _assignments(text, SWEEP_KEYS)
    fields = dict(vars(base or SweepSpec()))
    for key, text_value in values.items():
        if key in ("nbar_list", "outputs"):
            items = tuple(s.strip() for s in text_value.split(",") if s.strip())
            if key == "nbar_list":
                nums = [_number(key, s, where, problems) for s in items]
                if None in nums:
                    continue
                items = tuple(nums)
            fields[key] = items
        else:
            value = _number(key, text_value, where, problems, int if key == "points" else float)
            if value is not None:
                fields[key] = value
    if problems:
        raise ConfigError(problems)
    spec = SweepSpec(**fields)
    spec.validate()
    return spec


def parse_config(source, kind: str = "physical"):
    """Read and validate a configuration document.

    Parameters
    ----------
    source : str, Path, file-like or None
        Path to read, an open file, or ``None``/``"-"`` for stdin.
    kind : {"physical", "sweep"}

    Returns
    -------
    PhysicalParams or SweepSpec

    Raises
    ------
    ConfigError
        Listing every problem found: unknown, duplicate or missing keys and
        non-numeric or out-of-range values.
    """
    text = _read(source)
    if kind == "physical":
        return parse_physical(text)
    if kind == "sweep":
        return parse_sweep(text)
    raise ValueError(f"unknown config kind {kind!r}")
