"""
Covariance-matrix algebra for continuous-variable Gaussian states.

Conventions
-----------
hbar = 1 and [X, P] = i, so the vacuum has variance 1/2 in every quadrature.
Quadratures are interleaved, (X1, P1, X2, P2, ...), and the covariance matrix
holds the symmetrised second moments <v_i v_j + v_j v_i>/2 - <v_i><v_j>.

A :class:`CovarianceMatrix` stores either float64 entries or, when ``dps`` is
set, mpmath numbers in a numpy object array. The extended-precision form is
needed for strongly squeezed states: with entries around 1e13 a double cannot
resolve vacuum-scale symplectic eigenvalues. Every function here accepts both
forms and returns plain floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import mpmath as mp
import numpy as np

from .errors import ValidationError

#: Default tolerance on symplectic eigenvalues for physicality checks.
PHYSICAL_TOL = 1e-9
#: Relative mismatch allowed between the two members of a +/- eigenvalue pair.
PAIRING_TOL = 1e-9
#: Symmetry tolerance, scaled by max(1, largest entry).
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Quadrature covariance matrix of an ``n_modes`` Gaussian state.

    Parameters
    ----------
    data : array_like
        Real ``2n x 2n`` matrix in (X1, P1, X2, P2, ...) ordering.
    dps : int, optional
        Decimal digits of working precision. When given, entries are held as
        ``mpmath.mpf`` and all derived quantities are computed at this
        precision before rounding to float.
    """

    data: np.ndarray
    dps: int | None = None

    def __post_init__(self):
        if self.dps is None:
            arr = np.array(self.data, dtype=float)
        else:
            with mp.workdps(self.dps):
                arr = np.array(
                    [[mp.mpf(x) for x in row] for row in np.asarray(self.data)],
                    dtype=object,
                )
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise ValidationError(
                f"covariance matrix must be square with even size, got shape {arr.shape}"
            )
        if arr.shape[0] == 0:
            raise ValidationError("covariance matrix must describe at least one mode")
        object.__setattr__(self, "data", arr)

    @property
    def n_modes(self) -> int:
        return self.data.shape[0] // 2

    @property
    def extended(self) -> bool:
        return self.dps is not None

    def to_float(self) -> np.ndarray:
        return self.data.astype(float)

    def _new(self, data) -> "CovarianceMatrix":
        return CovarianceMatrix(data, self.dps)

    def __repr__(self):
        prec = f", dps={self.dps}" if self.dps else ""
        return f"CovarianceMatrix(n_modes={self.n_modes}{prec})"


@dataclass(frozen=True)
class Physicality:
    """Outcome of :func:`check_physical`; truthy when the state is physical."""

    physical: bool
    min_symplectic: float
    violation: float

    def __bool__(self):
        return self.physical


@dataclass(frozen=True)
class Separability:
    """Outcome of :func:`ppt_separable`.

    ``margin`` is ``1/2 - nu_min`` for the partially transposed matrix, so it
    is positive for entangled states.
    """

    entangled: bool
    margin: float
    nu_min: float

    @property
    def separable(self) -> bool:
        return not self.entangled


def vacuum(n_modes: int, dps: int | None = None) -> CovarianceMatrix:
    return CovarianceMatrix(0.5 * np.eye(2 * n_modes), dps)


def thermal(nbars: Iterable[float], dps: int | None = None) -> CovarianceMatrix:
    """Product of thermal states with the given mean occupations."""
    nbars = list(nbars)
    if dps is None:
        diag = np.repeat([n + 0.5 for n in nbars], 2)
        return CovarianceMatrix(np.diag(diag))
    with mp.workdps(dps):
        data = np.full((2 * len(nbars), 2 * len(nbars)), mp.mpf(0), dtype=object)
        for m, n in enumerate(nbars):
            data[2 * m, 2 * m] = data[2 * m + 1, 2 * m + 1] = mp.mpf(n) + mp.mpf(1) / 2
    return CovarianceMatrix(data, dps)


def two_mode_squeezed(s: float, dps: int | None = None) -> CovarianceMatrix:
    """Two-mode squeezed vacuum with squeezing ``s``.

    The EPR variances <(X1 - X2)^2> and <(X1 + X2)^2> equal exp(-2s) and
    exp(2s).
    """
    ctx = mp if dps is not None else np
    with mp.workdps(dps or 15):
        if dps is not None:
            s = mp.mpf(s)
        ch, sh = ctx.cosh(2 * s) / 2, ctx.sinh(2 * s) / 2
        z = 0 * ch
        data = [
            [ch, z, sh, z],
            [z, ch, z, -sh],
            [sh, z, ch, z],
            [z, -sh, z, ch],
        ]
    return CovarianceMatrix(np.array(data, dtype=object if dps else float), dps)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal ``J`` with ``[[0, 1], [-1, 0]]`` blocks."""
    if n_modes < 1:
        raise ValueError(f"n_modes must be >= 1, got {n_modes}")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _require_symmetric(cm: CovarianceMatrix):
    g = cm.data
    scale = max(1.0, float(np.max(np.abs(g.astype(float)))))
    asym = float(np.max(np.abs((g - g.T).astype(float))))
    if asym > SYMMETRY_TOL * scale:
        raise ValidationError(f"covariance matrix is not symmetric (max |G - G^T| = {asym:.3g})")


def _pair(moduli: list[float]) -> np.ndarray:
    # moduli arrive sorted; each symplectic eigenvalue appears twice
    nu = np.asarray(moduli, dtype=float)
    lo, hi = nu[0::2], nu[1::2]
    scale = max(1.0, float(nu[-1]))
    mismatch = float(np.max(np.abs(hi - lo)))
    if mismatch > PAIRING_TOL * scale:
        raise ValidationError(f"spectrum of iJG does not pair up (mismatch {mismatch:.3g})")
    return (lo + hi) / 2


def _spectrum_float(g: np.ndarray) -> list[float]:
    n = g.shape[0] // 2
    J = symplectic_form(n)
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        w = np.linalg.eigvals(1j * J @ g)
    else:
        # iJG = iJ L L^T is similar to the Hermitian i L^T J L
        w = np.linalg.eigvalsh(1j * (L.T @ J @ L))
    return sorted(np.abs(w))


def _spectrum_mp(g: np.ndarray, dps: int) -> list[float]:
    n = g.shape[0] // 2
    with mp.workdps(dps):
        G = mp.matrix(g.tolist())
        J = mp.matrix(symplectic_form(n).tolist())
        try:
            L = mp.cholesky(G)
        except ValueError:
            w = mp.eig(J * G, left=False, right=False)
        else:
            w = mp.eighe(mp.mpc(0, 1) * (L.T * J * L), eigvals_only=True)
        return sorted(float(abs(x)) for x in w)


def symplectic_eigenvalues(cm: CovarianceMatrix) -> np.ndarray:
    """Symplectic eigenvalues of ``cm``, sorted ascending.

    These are the moduli of the eigenvalues of ``iJG``; each appears twice in
    that spectrum and is reported once.

    Raises
    ------
    ValidationError
        If ``cm`` is not symmetric or the spectrum does not pair up.
    """
    _require_symmetric(cm)
    if cm.extended:
        moduli = _spectrum_mp(cm.data, cm.dps)
    else:
        moduli = _spectrum_float(cm.data)
    return _pair(moduli)


def _min_eigenvalue(cm: CovarianceMatrix) -> float:
    if cm.extended:
        with mp.workdps(cm.dps):
            return float(min(mp.eigsy(mp.matrix(cm.data.tolist()), eigvals_only=True)))
    return float(np.linalg.eigvalsh(cm.data)[0])


def check_physical(cm: CovarianceMatrix, tol: float = PHYSICAL_TOL) -> Physicality:
    """Uncertainty-principle admissibility, ``G + iJ/2 >= 0``.

    Equivalent to ``G > 0`` together with every symplectic eigenvalue being
    at least 1/2. A matrix that is not positive definite is reported with
    ``violation = 1/2 - lambda_min(G)``.
    """
    nu_min = float(symplectic_eigenvalues(cm)[0])
    lam_min = _min_eigenvalue(cm)
    if lam_min <= 0:
        return Physicality(False, nu_min, 0.5 - lam_min)
    violation = max(0.0, 0.5 - nu_min)
    return Physicality(nu_min >= 0.5 - tol, nu_min, violation)


def _mode_indices(n_modes: int, modes) -> list[int]:
    idx = []
    for m in modes:
        if not 0 <= m < n_modes:
            raise ValidationError(f"mode index {m} out of range for {n_modes} modes")
        idx += [2 * m, 2 * m + 1]
    return idx


def partial_trace(cm: CovarianceMatrix, keep: Iterable[int]) -> CovarianceMatrix:
    """Reduced state on the modes in ``keep`` (0-based, returned in ascending order)."""
    keep = sorted(set(keep))
    if not keep:
        raise ValidationError("partial_trace needs at least one mode to keep")
    idx = _mode_indices(cm.n_modes, keep)
    return cm._new(cm.data[np.ix_(idx, idx)])


def partial_transpose(cm: CovarianceMatrix, mode: int) -> CovarianceMatrix:
    """Flip the sign of ``mode``'s momentum quadrature: ``L G L``."""
    _mode_indices(cm.n_modes, [mode])
    p = 2 * mode + 1
    data = cm.data.copy()
    # mpmath rounds every operation, negation included, to the ambient precision
    with mp.workdps(cm.dps or 15):
        data[p, :] = -data[p, :]
        data[:, p] = -data[:, p]
    return cm._new(data)


def ppt_separable(cm: CovarianceMatrix, tol: float = PHYSICAL_TOL) -> Separability:
    """Peres-Horodecki-Simon test for a two-mode Gaussian state.

    Necessary and sufficient for two modes: the state is entangled iff the
    partially transposed matrix has a symplectic eigenvalue below 1/2.

    Raises
    ------
    ValidationError
        If ``cm`` is not a physical two-mode state.
    """
    if cm.n_modes != 2:
        raise ValidationError(f"PPT test implemented for two modes, got {cm.n_modes}")
    verdict = check_physical(cm, tol)
    if not verdict:
        raise ValidationError(
            f"state is unphysical (min symplectic eigenvalue {verdict.min_symplectic:.6g})"
        )
    nu_min = float(symplectic_eigenvalues(partial_transpose(cm, 1))[0])
    return Separability(nu_min < 0.5 - tol, 0.5 - nu_min, nu_min)


def purity(cm: CovarianceMatrix) -> float:
    """Tr(rho^2) = (1/2)^n / sqrt(det G)."""
    if cm.extended:
        with mp.workdps(cm.dps):
            det = mp.det(mp.matrix(cm.data.tolist()))
            if det <= 0:
                raise ValidationError(f"non-positive determinant {mp.nstr(det, 6)}")
            return float(mp.mpf(2) ** -cm.n_modes / mp.sqrt(det))
    det = float(np.linalg.det(cm.data))
    if det <= 0:
        raise ValidationError(f"non-positive determinant {det:.6g}")
    return 0.5**cm.n_modes / np.sqrt(det)
