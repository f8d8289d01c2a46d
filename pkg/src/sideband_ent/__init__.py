"""Gaussian dynamics of optical sidebands entangled by radiation pressure."""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, OracleError, ValidationError
from .gaussian import (
    CovarianceMatrix,
    check_physical,
    partial_trace,
    partial_transpose,
    ppt_separable,
    purity,
    symplectic_eigenvalues,
    symplectic_form,
)
from .model import (
    CoefficientSet,
    Couplings,
    PhysicalParams,
    coefficients,
    couplings_from_physical,
    effective_squeezing,
    epr_variances,
    full_cm,
    reduced_cm,
    simon_marker,
    simon_marker_half_period,
    thermal_occupation,
)
from .oracle import crosscheck, drift_matrix, propagate
