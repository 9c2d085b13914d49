"""Numerical laboratory for zeta moment integrals, ladder iterations,
Dirichlet-series mean values and divisor sums."""

from .analytic import (
    ZeroList,
    find_zeros,
    hardy_z,
    rs_theta,
    s1_of_t,
    s_of_t,
    zero_count,
    zeta_em,
)
from .constants import CONSTANTS, Constants
from .errors import DomainError, NumericalError, ZetaLabError
from .quadrature import (
    MomentIntegralResult,
    crit_integral,
    hl_sigma_integral,
    integrate_adaptive,
    s1_moment_integral,
)

__all__ = [
    "CONSTANTS",
    "Constants",
    "DomainError",
    "MomentIntegralResult",
    "NumericalError",
    "ZeroList",
    "ZetaLabError",
    "crit_integral",
    "find_zeros",
    "hardy_z",
    "hl_sigma_integral",
    "integrate_adaptive",
    "rs_theta",
    "s1_moment_integral",
    "s1_of_t",
    "s_of_t",
    "zero_count",
    "zeta_em",
]
