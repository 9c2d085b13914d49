"""An operational Jacob's ladder and its reverse iterations.

phi_1 is modelled as the solution y of V(y) = J(T), where J is the
Hardy-Littlewood integral of |zeta(1/2 + it)|^2 and

    V(y) = y ln y + (c - ln 2 pi) y.

With this choice J(phi_1^{-1}(T)) - J(T) = V(T) - J(T), which equals
(1 - c) T up to the error term of J.  The ladder is therefore a model of the
true one; the spacing and segment-integral diagnostics below are checks of
that model, not of the original construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .analytic import hardy_z
from .constants import EULER_C, LN_TWO_PI, ONE_MINUS_C
from .errors import BracketError, DomainError
from .quadrature import crit_integral
from .roots import expand_bracket, safeguarded_newton

Y_MIN = 10.0
MODES = ("quadrature", "asymptotic")


@dataclass(frozen=True)
class LadderConfig:
    mode: str = "asymptotic"
    j_tol: float = 1e-10
    root_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.j_tol > 0 or not self.root_tol > 0:
            raise DomainError("j_tol and root_tol must be positive")


DEFAULT_CONFIG = LadderConfig()


def j_asymptotic(T: float) -> float:
    if T == 0:
        return 0.0
    return T * math.log(T) + (2 * EULER_C - 1 - LN_TWO_PI) * T


@lru_cache(maxsize=256)
def _j_quadrature(T: float, tol: float) -> float:
    return crit_integral(0.0, T, tol).value


def j_integral(T: float, cfg: LadderConfig = DEFAULT_CONFIG) -> float:
    """J(T) = int_0^T |zeta(1/2 + it)|^2 dt, by quadrature or its two-term asymptotic."""
    T = float(T)
    if T < 0:
        raise DomainError("J(T) needs T >= 0")
    if cfg.mode == "asymptotic":
        return j_asymptotic(T)
    return _j_quadrature(T, cfg.j_tol)


def _j_prime(T: float, cfg: LadderConfig) -> float:
    if cfg.mode == "asymptotic":
        return math.log(T) + 2 * EULER_C - LN_TWO_PI
    return hardy_z(T) ** 2


def transfer_v(y: float) -> float:
    y = float(y)
    if y <= Y_MIN:
        raise DomainError(f"V(y) is defined here for y > {Y_MIN}, got {y}")
    return y * math.log(y) + (EULER_C - LN_TWO_PI) * y


def transfer_v_prime(y: float) -> float:
    return math.log(y) + 1 + EULER_C - LN_TWO_PI


def phi1(T: float, cfg: LadderConfig = DEFAULT_CONFIG) -> float:
    """The y > Y_MIN with V(y) = J(T)."""
    T = float(T)
    target = j_integral(T, cfg)
    v_min = Y_MIN * math.log(Y_MIN) + (EULER_C - LN_TWO_PI) * Y_MIN
    if not target > v_min:
        raise DomainError(f"J({T}) = {target} does not exceed V({Y_MIN}) = {v_min}")

    def g(y):
        return y * math.log(y) + (EULER_C - LN_TWO_PI) * y - target

    lo, hi, g_lo, g_hi = expand_bracket(g, Y_MIN, max(T, 2 * Y_MIN))
    guess = T - ONE_MINUS_C * T / math.log(T) if T > Y_MIN else None
    return safeguarded_newton(g, transfer_v_prime, lo, hi, cfg.root_tol, x0=guess, f_lo=g_lo, f_hi=g_hi)


def phi1_inv(T: float, cfg: LadderConfig = DEFAULT_CONFIG) -> float:
    """The U > T with J(U) = V(T), i.e. phi1(U) = T."""
    T = float(T)
    target = transfer_v(T)
    spacing = ONE_MINUS_C * T / math.log(T)
    if cfg.mode == "asymptotic":
        def g(u):
            return j_asymptotic(u) - target

        lo, hi, g_lo, g_hi = expand_bracket(g, T, 2 * T)
    else:
        base = j_integral(T, cfg)

        def g(u):
            return base + crit_integral(T, u, cfg.j_tol).value - target

        # J is only available by quadrature: grow a tight bracket rather than
        # integrating all the way to 2T
        lo, hi, g_lo, g_hi = expand_bracket(g, T, T + 2 * spacing)
    if g_lo > 0:
        raise BracketError(f"J({T}) already exceeds V({T}); phi1_inv undefined here")
    return safeguarded_newton(
        g, lambda u: _j_prime(u, cfg), lo, hi, cfg.root_tol,
        x0=T + spacing, f_lo=g_lo, f_hi=g_hi,
    )


@dataclass(frozen=True)
class LadderSequence:
    base: float
    iterates: tuple[float, ...]
    increments: tuple[float, ...]
    segment_integrals: Optional[tuple[float, ...]] = None
    segment_errors: Optional[tuple[float, ...]] = None
    cfg: LadderConfig = field(default=DEFAULT_CONFIG)

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.iterates, self.iterates[1:])):
            raise ValueError("iterates must be strictly increasing")

    @property
    def k(self) -> int:
        return len(self.iterates) - 1


def reverse_iterates(
    T: float, k: int, cfg: LadderConfig = DEFAULT_CONFIG, *, segments: bool = False, seg_tol: float = 1e-10
) -> LadderSequence:
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k}")
    pts = [float(T)]
    for _ in range(int(k)):
        pts.append(phi1_inv(pts[-1], cfg))
    inc = tuple(b - a for a, b in zip(pts, pts[1:]))
    seg = err = None
    if segments:
        res = [crit_integral(a, b, seg_tol) for a, b in zip(pts, pts[1:])]
        seg = tuple(r.value for r in res)
        err = tuple(r.abs_error_estimate for r in res)
    return LadderSequence(float(T), tuple(pts), inc, seg, err, cfg)


@dataclass(frozen=True)
class PartitionReport:
    increment_ratios: tuple[float, ...]
    segment_ratios: Optional[tuple[float, ...]]
    segment_over_leading: Optional[tuple[float, ...]]
    telescoping_sum: Optional[float]
    whole_integral: Optional[float]
    error_budget: Optional[float]

    @property
    def telescoping_ok(self) -> Optional[bool]:
        if self.telescoping_sum is None:
            return None
        return abs(self.telescoping_sum - self.whole_integral) <= self.error_budget


def partition_report(seq: LadderSequence, *, tol: float = 1e-10) -> PartitionReport:
    """Spacing ratios, segment-integral ratios and the telescoping identity of a chain."""
    inc = seq.increments
    inc_ratios = tuple(b / a for a, b in zip(inc, inc[1:]))
    if seq.segment_integrals is None:
        return PartitionReport(inc_ratios, None, None, None, None, None)
    seg = seq.segment_integrals
    seg_ratios = tuple(b / a for a, b in zip(seg, seg[1:]))
    over = tuple(s / (ONE_MINUS_C * lo) for s, lo in zip(seg, seq.iterates))
    whole = crit_integral(seq.iterates[0], seq.iterates[-1], tol)
    budget = math.fsum(seq.segment_errors) + whole.abs_error_estimate
    return PartitionReport(inc_ratios, seg_ratios, over, math.fsum(seg), whole.value, budget)
