"""
Radiation-pressure coupling of two optical sidebands through a mirror mode.

The Stokes mode a1 and the mirror mode b interact through a two-mode
squeezing term (rate chi); the anti-Stokes mode a2 and b through a
beam-splitter term (rate theta). Starting from vacuum sidebands and a thermal
mirror, the three-mode state stays Gaussian and depends only on the scaled
time tau = Theta t, the ratio r = theta / chi and the mirror occupation nbar.

Closed forms are evaluated with mpmath. Near r = 1 the coefficients carry
(r^2 - 1)^-2 prefactors of order 1e13 while the quantities of interest
(the entanglement marker, EPR variances, symplectic eigenvalues) come out of
cancellations between them, so double precision is not enough. The working
precision is picked by :func:`working_dps`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import mpmath as mp
import numpy as np
from scipy import constants

from .errors import DomainError, ValidationError
from .gaussian import CovarianceMatrix, check_physical

HBAR = constants.hbar
K_B = constants.k
C_LIGHT = constants.c

COEFFICIENT_NAMES = ("A", "B", "C", "D", "E", "F")


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory inputs.

    Angular frequencies in rad/s (``laser_frequency``, ``mechanical_frequency``),
    bandwidths in Hz, mass in kg, temperature in K, incidence angle in rad.
    """

    power: float
    laser_frequency: float
    mechanical_frequency: float
    detection_bandwidth: float
    mode_bandwidth: float
    effective_mass: float
    temperature: float = 300.0
    incidence_angle: float = 0.0

    def validate(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise DomainError(f"{f.name} must be finite, got {value}")
        for name in ("power", "laser_frequency", "mechanical_frequency",
                     "detection_bandwidth", "mode_bandwidth", "effective_mass"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.temperature < 0:
            raise DomainError(f"temperature must be >= 0, got {self.temperature}")
        if not 0 <= self.incidence_angle < math.pi / 2:
            raise DomainError(
                f"incidence_angle must lie in [0, pi/2), got {self.incidence_angle}"
            )
        if self.mechanical_frequency >= self.laser_frequency:
            raise DomainError(
                "mechanical_frequency must be below laser_frequency "
                f"({self.mechanical_frequency} >= {self.laser_frequency})"
            )


@dataclass(frozen=True)
class Couplings:
    """Model constants: rates in Hz, ``r`` and ``nbar`` dimensionless."""

    chi: float
    theta: float
    r: float
    big_theta: float
    nbar: float


@dataclass(frozen=True)
class CoefficientSet:
    """Gaussian coefficients of the normally ordered characteristic function.

    ``A``, ``B``, ``E`` are the mean occupations of a1, b, a2; ``C`` and ``F``
    the anomalous correlations <a1 b> and <a1 a2>; ``D = -<b^dag a2>``.
    Values are mpmath numbers at ``dps`` digits.
    """

    tau: float
    A: mp.mpf
    B: mp.mpf
    C: mp.mpf
    D: mp.mpf
    E: mp.mpf
    F: mp.mpf
    dps: int

    def values(self) -> tuple:
        return tuple(getattr(self, name) for name in COEFFICIENT_NAMES)

    def as_floats(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in COEFFICIENT_NAMES}


def working_dps(r: float, nbar: float) -> int:
    """Digits needed to evaluate the model at (r, nbar) without cancellation loss.

    Coefficients scale like ``(nbar + 1)/(r^2 - 1) + 4 r^2/(r^2 - 1)^2``. The
    symplectic spectrum and the marker lose roughly twice that many digits.
    """
    k2 = (r - 1) * (r + 1)
    scale = 1 + (nbar + 1) / k2 + 4 * r * r / (k2 * k2)
    return max(30, 25 + math.ceil(2 * math.log10(scale)))


def _require_ratio(r):
    if not r > 1:
        raise DomainError(f"r must exceed 1, got {r}")


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation of a mode at angular frequency ``omega``."""
    if temperature == 0:
        return 0.0
    x = HBAR * omega / (K_B * temperature)
    try:
        return 1.0 / math.expm1(x)
    except OverflowError:
        return 0.0


def couplings_from_physical(p: PhysicalParams) -> Couplings:
    """Optomechanical rates for the given laboratory parameters.

    Raises
    ------
    DomainError
        If any parameter violates :meth:`PhysicalParams.validate`.
    """
    p.validate()
    w0, om = p.laser_frequency, p.mechanical_frequency
    chi = math.cos(p.incidence_angle) * math.sqrt(
        p.power * p.detection_bandwidth**2 * (w0 - om)
        / (2 * p.effective_mass * om * C_LIGHT**2 * p.mode_bandwidth)
    )
    # r^2 - 1 = 2 Omega / (w0 - Omega) exactly; avoids forming r - 1 by subtraction
    k2 = 2 * om / (w0 - om)
    r = math.sqrt(1 + k2)
    return Couplings(
        chi=chi,
        theta=chi * r,
        r=r,
        big_theta=chi * math.sqrt(k2),
        nbar=thermal_occupation(om, p.temperature),
    )


def coefficients(tau, r, nbar, dps: int | None = None) -> CoefficientSet:
    """Closed-form coefficients A..F at scaled time ``tau``.

    ``1 - cos x`` is evaluated as ``2 sin^2(x/2)`` so the coefficients stay
    accurate near tau = 0 and 2 pi.
    """
    _require_ratio(r)
    if nbar < 0:
        raise DomainError(f"nbar must be >= 0, got {nbar}")
    if dps is None:
        dps = working_dps(float(r), float(nbar))
    with mp.workdps(dps):
        t, r, n = mp.mpf(tau), mp.mpf(r), mp.mpf(nbar)
        k2 = (r - 1) * (r + 1)
        k = mp.sqrt(k2)
        q = n * k2 - 1
        vers1 = 2 * mp.sin(t / 2) ** 2
        vers2 = 2 * mp.sin(t) ** 2
        s1, s2 = mp.sin(t), mp.sin(2 * t)

        A = (vers2 * q + 4 * r**2 * vers1) / (2 * k2**2)
        B = ((2 - vers2) * n * k2 + vers2) / (2 * k2)
        C = (2 * r**2 * s1 + q * s2) / (2 * k2 * k)
        D = -r * (2 * s1 + q * s2) / (2 * k2 * k)
        E = r**2 * (vers2 * q + 4 * vers1) / (2 * k2**2)
        F = r * (vers2 * q + 2 * (1 + r**2) * vers1) / (2 * k2**2)
    return CoefficientSet(float(tau), A, B, C, D, E, F, dps)


def full_cm(c: CoefficientSet, check: bool = True) -> CovarianceMatrix:
    """Three-mode covariance matrix in mode order (a1, b, a2).

    Raises
    ------
    ValidationError
        If ``check`` is set and the result violates the uncertainty principle,
        which would mean the coefficients are mutually inconsistent.
    """
    with mp.workdps(c.dps):
        half = mp.mpf(1) / 2
        a, b, e = c.A + half, c.B + half, c.E + half
        # rows/cols: X1 P1 Xb Pb X2 P2
        xx = [[a, c.C, c.F], [c.C, b, -c.D], [c.F, -c.D, e]]
        pp = [[a, -c.C, -c.F], [-c.C, b, -c.D], [-c.F, -c.D, e]]
        data = np.full((6, 6), mp.mpf(0), dtype=object)
        for i in range(3):
            for j in range(3):
                data[2 * i, 2 * j] = xx[i][j]
                data[2 * i + 1, 2 * j + 1] = pp[i][j]
    cm = CovarianceMatrix(data, c.dps)
    if check:
        verdict = check_physical(cm)
        if not verdict:
            raise ValidationError(
                f"coefficients at tau={c.tau} give an unphysical state "
                f"(min symplectic eigenvalue {verdict.min_symplectic:.6g})"
            )
    return cm


def reduced_cm(c: CoefficientSet) -> CovarianceMatrix:
    """Two-sideband covariance matrix, mode order (a1, a2)."""
    with mp.workdps(c.dps):
        half = mp.mpf(1) / 2
        a, e, f = c.A + half, c.E + half, c.F
        z = mp.mpf(0)
        data = [
            [a, z, f, z],
            [z, a, z, -f],
            [f, z, e, z],
            [z, -f, z, e],
        ]
    return CovarianceMatrix(np.array(data, dtype=object), c.dps)


def simon_marker(c: CoefficientSet):
    """Simon's separability marker for the sideband pair; negative means entangled."""
    with mp.workdps(c.dps):
        A, E, F = c.A, c.E, c.F
        quarter = mp.mpf(1) / 4
        return (
            (A * E + quarter + (A + E) / 2 - F**2) ** 2
            + quarter**2
            - F**2 / 2
            - (A / 2 + quarter) ** 2
            - (E / 2 + quarter) ** 2
        )


def simon_marker_half_period(r, dps: int | None = None):
    """Marker at tau = pi, where it no longer depends on nbar."""
    _require_ratio(r)
    with mp.workdps(dps or working_dps(float(r), 0.0)):
        r = mp.mpf(r)
        k2 = (r - 1) * (r + 1)
        return -4 * (r + r**3) ** 2 / k2**4


def epr_variances(c: CoefficientSet) -> tuple:
    """(Delta_minus, Delta_plus): variances of X1 - X2 and X1 + X2."""
    g = reduced_cm(c).data
    with mp.workdps(c.dps):
        common = g[0, 0] + g[2, 2]
        return common - 2 * g[0, 2], common + 2 * g[0, 2]


def effective_squeezing(r) -> float:
    """Squeezing parameter xi with sinh(xi) equal to the tau = pi correlation F.

    Equivalent two-mode squeezed vacuum: squeezing s with sinh(2s) = 2 sinh(xi).
    """
    _require_ratio(r)
    with mp.workdps(working_dps(float(r), 0.0)):
        r = mp.mpf(r)
        k2 = (r - 1) * (r + 1)
        return float(mp.asinh(2 * r * (1 + r**2) / k2**2))
