"""
Independent check of the closed-form coefficients.

The effective Hamiltonian gives linear Heisenberg equations

    da1/dt = chi b^dag,   db/dt = chi a1^dag - theta a2,   da2/dt = theta b,

so quadrature means obey dv/dt = K v and the covariance matrix evolves as
Sigma(t) = S Sigma(0) S^T with S = expm(K t). This module builds K, propagates
the initial state by matrix exponential (and, as a lower-precision second
opinion, by fixed-step RK4) and compares the result against
:func:`sideband_ent.model.coefficients`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy.linalg import expm

from .errors import DomainError, OracleError
from .gaussian import CovarianceMatrix, thermal
from .model import COEFFICIENT_NAMES, CoefficientSet, coefficients, working_dps

X_IDX = [0, 2, 4]
P_IDX = [1, 3, 5]

#: Symmetry breach (relative to the largest entry) that marks a propagation as unstable.
ASYMMETRY_LIMIT = 1e-9
#: Closest approach to r = 1 the oracle accepts.
MIN_R_GAP = 1e-12
#: Below this coefficient scale double precision is sufficient for the oracle.
FLOAT_SCALE_LIMIT = 1e3


def drift_matrix(chi: float, theta: float, dps: int | None = None) -> np.ndarray:
    """Drift matrix K in (X1, P1, Xb, Pb, X2, P2) ordering.

    Raises
    ------
    DomainError
        Unless ``theta > chi > 0`` (the oscillatory regime).
    """
    if not theta > chi > 0:
        raise DomainError(f"need theta > chi > 0, got chi={chi}, theta={theta}")
    with mp.workdps(dps or 15):
        if dps is None:
            chi, theta, dtype = float(chi), float(theta), float
        else:
            chi, theta, dtype = mp.mpf(chi), mp.mpf(theta), object
        zero = 0 * chi
        kx = [[zero, chi, zero], [chi, zero, -theta], [zero, theta, zero]]
        kp = [[zero, -chi, zero], [-chi, zero, -theta], [zero, theta, zero]]
    K = np.full((6, 6), zero, dtype=dtype)
    for i in range(3):
        for j in range(3):
            K[X_IDX[i], X_IDX[j]] = kx[i][j]
            K[P_IDX[i], P_IDX[j]] = kp[i][j]
    return K


def _expm(block: np.ndarray, t, dps):
    if dps is None:
        return expm(block.astype(float) * t)
    with mp.workdps(dps):
        out = mp.expm(mp.matrix(block.tolist()) * mp.mpf(t))
        return np.array(out.tolist(), dtype=object)


def _inv_transpose(block: np.ndarray, dps):
    if dps is None:
        return np.linalg.inv(block).T
    with mp.workdps(dps):
        return np.array((mp.matrix(block.tolist()) ** -1).T.tolist(), dtype=object)


def propagator(K: np.ndarray, t, dps: int | None = None) -> np.ndarray:
    """S = expm(K t), by scaling and squaring.

    When K does not mix X and P quadratures the two 3x3 sectors are
    exponentiated separately. If in addition the P sector is the negative
    transpose of the X sector (a quadratic Hamiltonian without XP terms),
    S_P = S_X^-T exactly and only one exponential is formed.
    """
    n = K.shape[0]
    xs, ps = list(range(0, n, 2)), list(range(1, n, 2))
    cross = np.concatenate([K[np.ix_(xs, ps)].ravel(), K[np.ix_(ps, xs)].ravel()])
    if any(cross != 0):
        return _expm(K, t, dps)
    kx, kp = K[np.ix_(xs, xs)], K[np.ix_(ps, ps)]
    sx = _expm(kx, t, dps)
    with mp.workdps(dps or 15):
        hamiltonian_pair = bool(np.all(kp == -kx.T))
    sp = _inv_transpose(sx, dps) if hamiltonian_pair else _expm(kp, t, dps)
    S = np.zeros_like(K)
    S[np.ix_(xs, xs)] = sx
    S[np.ix_(ps, ps)] = sp
    return S


def _is_diagonal(a: np.ndarray) -> bool:
    return not np.any(a[~np.eye(a.shape[0], dtype=bool)] != 0)


def _sector_split(S: np.ndarray):
    """(S_X, S_P) if ``S`` does not mix X and P quadratures, else None."""
    n = S.shape[0]
    xs, ps = list(range(0, n, 2)), list(range(1, n, 2))
    if np.any(S[np.ix_(xs, ps)] != 0) or np.any(S[np.ix_(ps, xs)] != 0):
        return None
    return S[np.ix_(xs, xs)], S[np.ix_(ps, ps)]


def _product(S: np.ndarray, cm0: CovarianceMatrix) -> np.ndarray:
    g = cm0.data if cm0.extended else cm0.data.astype(float)
    if not cm0.extended:
        S = S.astype(float)
    sectors = _sector_split(S) if _is_diagonal(g) else None
    if sectors is None:
        return S @ g @ S.T
    # diagonal start and no X-P mixing: two 3x3 products instead of a 6x6 congruence
    d = np.diagonal(g)
    out = np.zeros_like(g)
    for sector, offset in zip(sectors, (0, 1)):
        idx = np.arange(offset, g.shape[0], 2)
        out[np.ix_(idx, idx)] = (sector * d[idx]) @ sector.T
    return out


def _congruence(S: np.ndarray, cm0: CovarianceMatrix) -> np.ndarray:
    with mp.workdps(cm0.dps or 15):
        out = _product(S, cm0)
    scale = max(1.0, float(np.max(np.abs(out.astype(float)))))
    with mp.workdps(cm0.dps or 15):
        asym = float(np.max(np.abs((out - out.T).astype(float))))
        if asym > ASYMMETRY_LIMIT * scale:
            raise OracleError(f"propagated covariance lost symmetry (|G - G^T| = {asym:.3g})")
        return (out + out.T) / 2


def propagate(cm0: CovarianceMatrix, K: np.ndarray, t) -> CovarianceMatrix:
    """Evolve ``cm0`` for a time ``t`` under the linear flow with drift ``K``."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    S = propagator(K, t, cm0.dps)
    return CovarianceMatrix(_congruence(S, cm0), cm0.dps)


def propagate_rk4(cm0: CovarianceMatrix, K: np.ndarray, t: float, steps: int = 2000) -> CovarianceMatrix:
    """Integrate dSigma/dt = K Sigma + Sigma K^T with classical RK4 (float64)."""
    K = K.astype(float)
    sig = cm0.to_float()
    h = t / steps

    def rhs(s):
        return K @ s + s @ K.T

    for _ in range(steps):
        k1 = rhs(sig)
        k2 = rhs(sig + h / 2 * k1)
        k3 = rhs(sig + h / 2 * k2)
        k4 = rhs(sig + h * k3)
        sig = sig + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return CovarianceMatrix((sig + sig.T) / 2)


def initial_cm(nbar, dps: int | None = None) -> CovarianceMatrix:
    """Vacuum sidebands and a thermal mirror, mode order (a1, b, a2)."""
    return thermal([0, nbar, 0], dps)


def extract_coefficients(cm: CovarianceMatrix, tau: float = float("nan")) -> CoefficientSet:
    """Read A..F back off a three-mode covariance matrix.

    X and P entries carrying the same coefficient are averaged.
    """
    if cm.n_modes != 3:
        raise ValueError(f"expected a three-mode covariance matrix, got {cm.n_modes}")
    g = cm.data
    with mp.workdps(cm.dps or 15):
        half = 0.5 if cm.dps is None else mp.mpf(1) / 2
        A = (g[0, 0] + g[1, 1]) / 2 - half
        B = (g[2, 2] + g[3, 3]) / 2 - half
        E = (g[4, 4] + g[5, 5]) / 2 - half
        C = (g[0, 2] - g[1, 3]) / 2
        F = (g[0, 4] - g[1, 5]) / 2
        D = -(g[2, 4] + g[3, 5]) / 2
    return CoefficientSet(tau, A, B, C, D, E, F, cm.dps or 15)


def oracle_dps(r: float, nbar: float) -> int | None:
    """Precision for the oracle path; ``None`` means double precision suffices.

    The extended precision is sized for nbar up to 1e7 so that propagators can
    be shared between runs that differ only in nbar.
    """
    k2 = (r - 1) * (r + 1)
    scale = 1 + (nbar + 1) / k2 + 4 * r * r / (k2 * k2)
    if scale <= FLOAT_SCALE_LIMIT:
        return None
    return working_dps(r, max(nbar, 1e7))


@lru_cache(maxsize=4096)
def _model_propagator(r: float, big_theta: float, tau: float, dps: int | None):
    # chi and theta rebuilt from r and Theta, so the Couplings algebra is exercised too
    if dps is None:
        chi = big_theta / math.sqrt((r - 1) * (r + 1))
        K = drift_matrix(chi, r * chi)
        return propagator(K, tau / big_theta)
    with mp.workdps(dps):
        r_, th = mp.mpf(r), mp.mpf(big_theta)
        chi = th / mp.sqrt((r_ - 1) * (r_ + 1))
        K = drift_matrix(chi, r_ * chi, dps)
        return propagator(K, mp.mpf(tau) / th, dps)


@dataclass
class CrosscheckReport:
    """Worst-case disagreement between oracle and closed forms."""

    r: float
    nbar: float
    points: int
    dps: int | None
    max_rel_dev: float = 0.0
    worst_tau: float | None = None
    worst_coefficient: str | None = None
    per_coefficient: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "nbar": self.nbar,
            "points": self.points,
            "dps": self.dps,
            "max_rel_dev": self.max_rel_dev,
            "worst_tau": self.worst_tau,
            "worst_coefficient": self.worst_coefficient,
            "per_coefficient": dict(self.per_coefficient),
        }


def crosscheck(r: float, nbar: float, grid, big_theta: float = 1.0) -> CrosscheckReport:
    """Compare propagated moments with the closed forms on every ``tau`` in ``grid``.

    Deviations are ``|oracle - closed| / max(|closed|, 1)``.

    Raises
    ------
    DomainError
        If ``r - 1 < 1e-12`` (beyond what the oracle can condition) or a grid
        point lies outside [0, 4 pi].
    OracleError
        If a propagated matrix loses symmetry.
    """
    r, nbar = float(r), float(nbar)
    if not r - 1 >= MIN_R_GAP:
        raise DomainError(f"r - 1 = {r - 1:.3g} is below {MIN_R_GAP:g}; refusing to cross-check")
    if nbar < 0:
        raise DomainError(f"nbar must be >= 0, got {nbar}")
    grid = [float(t) for t in grid]
    bad = [t for t in grid if not 0 <= t <= 4 * math.pi]
    if bad:
        raise DomainError(f"grid points outside [0, 4pi]: {bad[:3]}")

    dps = oracle_dps(r, nbar)
    report = CrosscheckReport(r, nbar, len(grid), dps)
    if not grid:
        return report
    cm0 = initial_cm(nbar, dps)
    worst = {name: 0.0 for name in COEFFICIENT_NAMES}
    for tau in grid:
        S = _model_propagator(r, float(big_theta), tau, dps)
        got = extract_coefficients(CovarianceMatrix(_congruence(S, cm0), dps), tau)
        want = coefficients(tau, r, nbar)
        with mp.workdps(want.dps):
            for name in COEFFICIENT_NAMES:
                ref = getattr(want, name)
                dev = float(abs(mp.mpf(getattr(got, name)) - ref) / max(abs(ref), 1))
                if dev > worst[name]:
                    worst[name] = dev
                if dev > report.max_rel_dev or report.worst_tau is None:
                    report.max_rel_dev = dev
                    report.worst_tau = tau
                    report.worst_coefficient = name
    report.per_coefficient = worst
    return report
