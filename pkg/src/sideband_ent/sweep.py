"""Time-sweep datasets: entanglement marker, EPR variances and raw coefficients."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import ConfigError, DomainError
from .model import (
    COEFFICIENT_NAMES,
    coefficients,
    epr_variances,
    simon_marker,
    simon_marker_half_period,
)

OUTPUTS = ("T_raw", "T_norm", "delta_minus", "delta_plus", "coefficients")
COLUMNS = ("tau", "nbar", "T_raw", "T_norm", "delta_minus", "delta_plus") + COEFFICIENT_NAMES

#: r of the reference dataset, 1 + 2.5e-7.
REFERENCE_R = 1 + 2.5e-7


@dataclass(frozen=True)
class SweepSpec:
    tau_min: float = 0.0
    tau_max: float = 2 * math.pi
    points: int = 500
    r: float = REFERENCE_R
    nbar_list: tuple = (0.0,)
    outputs: tuple = OUTPUTS

    def validate(self):
        problems = []
        if not self.tau_min < self.tau_max:
            problems.append(f"tau_min ({self.tau_min}) must be below tau_max ({self.tau_max})")
        if self.points < 2:
            problems.append(f"points must be >= 2, got {self.points}")
        if not self.nbar_list:
            problems.append("nbar_list must name at least one value")
        problems += [f"nbar must be >= 0, got {n}" for n in self.nbar_list if not n >= 0]
        problems += [f"unknown output '{o}'" for o in self.outputs if o not in OUTPUTS]
        if not self.outputs:
            problems.append("outputs must name at least one column group")
        if problems:
            raise ConfigError(problems)
        if not self.r > 1:
            raise DomainError(f"r must exceed 1, got {self.r}")

    def columns(self) -> list[str]:
        wanted = set(self.outputs)
        if "coefficients" in wanted:
            wanted.update(COEFFICIENT_NAMES)
        return ["tau", "nbar"] + [c for c in COLUMNS[2:] if c in wanted]


def run_sweep(spec: SweepSpec) -> tuple[list[str], list[list[float]]]:
    """Evaluate the model on the spec's grid.

    Rows are ordered tau-major, nbar-minor. ``T_norm`` is normalised by the
    analytic half-period marker, so it does not depend on whether pi is a
    grid point.
    """
    spec.validate()
    columns = spec.columns()
    t_half = abs(simon_marker_half_period(spec.r))
    rows = []
    for tau in np.linspace(spec.tau_min, spec.tau_max, spec.points):
        for nbar in spec.nbar_list:
            c = coefficients(float(tau), spec.r, nbar)
            values = {"tau": float(tau), "nbar": float(nbar)}
            if "T_raw" in columns or "T_norm" in columns:
                t_raw = simon_marker(c)
                values["T_raw"] = float(t_raw)
                with mp.workdps(c.dps):
                    values["T_norm"] = float(t_raw / t_half)
            if "delta_minus" in columns or "delta_plus" in columns:
                dm, dp = epr_variances(c)
                values["delta_minus"], values["delta_plus"] = float(dm), float(dp)
            values.update(c.as_floats())
            rows.append([values[name] for name in columns])
    return columns, rows


def format_value(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(columns, rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
