"""Divisor counts, the Dirichlet sum D(x) and its segments along the ladder."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import ONE_MINUS_C
from .errors import DomainError
from .ladder import DEFAULT_CONFIG, LadderConfig, phi1_inv
from .records import FunctionalEstimate


def divisor_d(n: int) -> int:
    """Number of divisors of n by trial division up to sqrt(n)."""
    if int(n) != n or n < 1:
        raise DomainError(f"divisor_d needs a positive integer, got {n!r}")
    n = int(n)
    count = 0
    r = math.isqrt(n)
    for k in range(1, r + 1):
        if n % k == 0:
            count += 2
    if r * r == n:
        count -= 1
    return count


def _floor(x) -> int:
    if isinstance(x, int):
        return x
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x!r}")
    return math.floor(x)


def dirichlet_sum_D(x) -> int:
    """D(x) = sum_{n <= x} d(n) by the hyperbola method, in exact integers."""
    if x < 0:
        raise DomainError(f"D(x) needs x >= 0, got {x!r}")
    m = _floor(x)
    r = math.isqrt(m)
    return 2 * sum(m // k for k in range(1, r + 1)) - r * r


@dataclass(frozen=True)
class SegmentSum:
    """sum_{lower < n <= upper} d(n)."""

    lower: float
    upper: float
    value: int

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("segment sums are nonnegative")

    @classmethod
    def of(cls, lower: float, upper: float) -> "SegmentSum":
        if upper < lower:
            raise DomainError(f"need lower <= upper, got ({lower}, {upper})")
        if lower < 0:
            raise DomainError("segments start at a nonnegative point")
        return cls(lower, upper, dirichlet_sum_D(upper) - dirichlet_sum_D(lower))


def divisor_functional(
    x: float, tau: float, cfg: LadderConfig = DEFAULT_CONFIG, *, backend: str = "real"
) -> FunctionalEstimate:
    """(1/tau) sum of d(n) over the ladder segment (X, phi1_inv(X)], X = x tau / (1 - c)."""
    if not x > 0 or not tau > 0:
        raise DomainError("x and tau must be positive")
    X = x * tau / ONE_MINUS_C
    params = {"mode": cfg.mode, "backend": backend}
    if backend == "synthetic":
        # leading term of the segment sum is (1 - c) X
        return FunctionalEstimate("divisor", x, tau, ONE_MINUS_C * X / tau, params)
    if backend != "real":
        raise DomainError(f"unknown backend {backend!r}")
    seg = SegmentSum.of(X, phi1_inv(X, cfg))
    if math.floor(seg.upper) == math.floor(seg.lower):
        warnings.warn(f"segment ({seg.lower}, {seg.upper}] holds no integer", RuntimeWarning, stacklevel=2)
        return FunctionalEstimate("divisor", x, tau, 0.0, params)
    return FunctionalEstimate("divisor", x, tau, seg.value / tau, params)
