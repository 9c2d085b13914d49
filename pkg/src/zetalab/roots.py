"""Bracketed Newton iteration with bisection fallback."""

from __future__ import annotations

import math
from typing import Callable, Optional

from .errors import BracketError, ConvergenceError


def expand_bracket(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    grow: float = 2.0,
    max_steps: int = 60,
) -> tuple[float, float, float, float]:
    """Move ``hi`` away from ``lo`` until f changes sign; returns (lo, hi, f(lo), f(hi))."""
    f_lo = f(lo)
    f_hi = f(hi)
    width = hi - lo
    for _ in range(max_steps):
        if f_lo == 0 or f_hi == 0 or (f_lo < 0) != (f_hi < 0):
            return lo, hi, f_lo, f_hi
        width *= grow
        hi = lo + width
        f_hi = f(hi)
    raise BracketError(f"no sign change found on [{lo}, {hi}]")


def safeguarded_newton(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    *,
    x0: Optional[float] = None,
    f_lo: Optional[float] = None,
    f_hi: Optional[float] = None,
    max_iter: int = 200,
) -> float:
    """Root of f in [lo, hi].

    Newton steps are taken from the current iterate; a step that leaves the
    bracket, or a vanishing derivative, falls back to bisection.  The bracket
    shrinks on every evaluation, so convergence is guaranteed.
    """
    if f_lo is None:
        f_lo = f(lo)
    if f_hi is None:
        f_hi = f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo < 0) == (f_hi < 0):
        raise BracketError(f"f has the same sign at both ends of [{lo}, {hi}]")
    if f_lo > 0:
        # orient so that f(lo) < 0 < f(hi)
        g = f
        f = lambda x: -g(x)  # noqa: E731
        gp = fprime
        fprime = lambda x: -gp(x)  # noqa: E731
    x = 0.5 * (lo + hi) if x0 is None or not lo < x0 < hi else float(x0)
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        d = fprime(x)
        step_ok = d != 0 and math.isfinite(d)
        x_new = x - fx / d if step_ok else None
        if x_new is None or not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < tol or hi - lo < tol:
            return x_new
        x = x_new
    raise ConvergenceError(f"no convergence after {max_iter} iterations; bracket [{lo}, {hi}]")
