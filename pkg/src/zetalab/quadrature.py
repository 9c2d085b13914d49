"""Adaptive Gauss-Kronrod integration over long ranges.

Panels are evaluated in vectorized batches, refined by bisection where the
local error estimate is too large, and summed in left-to-right order so that
results do not depend on how the work was scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from .analytic import hardy_z, s1_values, zeros_up_to, zeta_em
from .constants import ONE_MINUS_C, PRECISION_TARGET
from .errors import DomainError, NonFiniteIntegrand, ToleranceNotMet
from .store import cached

# QUADPACK qk15 abscissae and weights
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-point rule on [-1, 1]
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_g = np.zeros(15)
_g[[1, 3, 5]] = _WG[:3]
_g[7] = _WG[3]
_g[[9, 11, 13]] = _WG[2::-1]
GAUSS_WEIGHTS = _g

_EPS = np.finfo(float).eps

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MomentIntegralResult:
    value: float
    lower: float
    upper: float
    abs_error_estimate: float
    panels_used: int
    backend: str = "real"
    panel_edges: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("lower must not exceed upper")
        if not math.isfinite(self.value):
            raise ValueError("value must be finite")
        if self.abs_error_estimate < 0:
            raise ValueError("error estimate must be nonnegative")
        if self.backend not in ("real", "synthetic"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "synthetic" and self.abs_error_estimate != 0.0:
            raise ValueError("synthetic results carry no quadrature error")


def panel_nodes(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Kronrod nodes for each panel, shape (len(left), 15)."""
    center = 0.5 * (left + right)
    half = 0.5 * (right - left)
    return center[:, None] + half[:, None] * NODES[None, :]


def _evaluate(f: Integrand, left: np.ndarray, right: np.ndarray):
    x = panel_nodes(left, right)
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise NonFiniteIntegrand(f"integrand not finite at t={bad!r}")
    half = 0.5 * (right - left)
    resk = fx @ KRONROD_WEIGHTS
    resg = fx @ GAUSS_WEIGHTS
    resabs = np.abs(fx) @ KRONROD_WEIGHTS
    resasc = np.abs(fx - 0.5 * resk[:, None]) @ KRONROD_WEIGHTS
    err = np.abs(resk - resg)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.maximum(err, 50 * _EPS * resabs)
    return resk * half, err * half


def initial_panels(
    a: float, b: float, breakpoints: Iterable[float] = (), max_width: Optional[float] = None
) -> tuple[np.ndarray, np.ndarray]:
    """Split [a, b] at interior breakpoints, then into panels of width <= max_width."""
    bp = np.asarray(sorted(x for x in breakpoints if a < x < b), dtype=float)
    cuts = np.concatenate([[a], bp, [b]])
    if max_width is None:
        return cuts[:-1].copy(), cuts[1:].copy()
    lefts, rights = [], []
    lengths = np.diff(cuts)
    counts = np.maximum(1, np.ceil(lengths / max_width).astype(int))
    for lo, hi, n in zip(cuts[:-1], cuts[1:], counts):
        edges = np.linspace(lo, hi, n + 1)
        edges[-1] = hi
        lefts.append(edges[:-1])
        rights.append(edges[1:])
    return np.concatenate(lefts), np.concatenate(rights)


def integrate_adaptive(
    f: Integrand,
    a: float,
    b: float,
    tol: float,
    breakpoints: Iterable[float] = (),
    *,
    max_width: Optional[float] = None,
    max_panels: int = 2_000_000,
    keep_edges: bool = False,
) -> MomentIntegralResult:
    """Integrate a vectorized integrand over [a, b] to absolute tolerance ``tol``.

    ``f`` receives a 1-D array of abscissae and must return values of the
    same shape.  Panels never straddle a breakpoint.  Raises
    ``ToleranceNotMet`` when the panel budget runs out first.
    """
    a = float(a)
    b = float(b)
    if b < a:
        raise DomainError(f"need a <= b, got a={a}, b={b}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if a == b:
        return MomentIntegralResult(0.0, a, b, 0.0, 0)

    length = b - a
    left, right = initial_panels(a, b, breakpoints, max_width)
    val, err = _evaluate(f, left, right)

    done_l, done_r, done_v, done_e = [], [], [], []
    while True:
        total_err = err.sum() + sum(e.sum() for e in done_e)
        if total_err <= tol:
            break
        share = tol * (right - left) / length
        bad = err > share
        if not bad.any():
            break
        done_l.append(left[~bad])
        done_r.append(right[~bad])
        done_v.append(val[~bad])
        done_e.append(err[~bad])
        bl, br = left[bad], right[bad]
        mid = 0.5 * (bl + br)
        if np.any((mid <= bl) | (mid >= br)):
            raise ToleranceNotMet(
                f"panel width reached machine resolution; error {total_err:.3e} > tol {tol:.3e}"
            )
        n_total = sum(len(x) for x in done_l) + 2 * len(bl)
        if n_total > max_panels:
            raise ToleranceNotMet(
                f"panel budget {max_panels} exhausted; error {total_err:.3e} > tol {tol:.3e}"
            )
        left = np.concatenate([bl, mid])
        right = np.concatenate([mid, br])
        val, err = _evaluate(f, left, right)

    all_l = np.concatenate(done_l + [left])
    all_r = np.concatenate(done_r + [right])
    all_v = np.concatenate(done_v + [val])
    all_e = np.concatenate(done_e + [err])
    order = np.argsort(all_l, kind="stable")
    total = math.fsum(all_v[order])
    total_err = math.fsum(all_e[order])
    if total_err > tol:
        raise ToleranceNotMet(f"error {total_err:.3e} > tol {tol:.3e}")
    edges = None
    if keep_edges:
        edges = np.concatenate([all_l[order], all_r[order][-1:]])
    return MomentIntegralResult(
        value=total,
        lower=a,
        upper=b,
        abs_error_estimate=total_err,
        panels_used=len(all_l),
        panel_edges=edges,
    )


def fixed_panel_rule(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flat nodes and weights of the Kronrod rule on the given panel edges."""
    left, right = edges[:-1], edges[1:]
    x = panel_nodes(left, right)
    w = 0.5 * (right - left)[:, None] * KRONROD_WEIGHTS[None, :]
    return x.ravel(), w.ravel()


# ----------------------------------------------------------------------------
# moment integrals

BACKENDS = ("real", "synthetic")
DEFAULT_EPSILON = 0.05
CRIT_MAX_WIDTH = 0.25


def _check_backend(backend: str) -> None:
    if backend not in BACKENDS:
        raise DomainError(f"backend must be one of {BACKENDS}, got {backend!r}")


@lru_cache(maxsize=256)
def zeta_two_sigma(sigma: float) -> float:
    return zeta_em(2.0 * sigma, 0.0).real


def _from_store(kind, params, lower, upper, tol, compute) -> MomentIntegralResult:
    box = {}

    def run():
        res = compute()
        box["res"] = res
        return res.value, res.abs_error_estimate

    value, error, hit = cached(kind, params, upper, tol, run)
    if not hit:
        return box["res"]
    return MomentIntegralResult(value, lower, upper, error, 0)


def hl_sigma_integral(
    sigma: float,
    T: float,
    tol: float = 1e-8,
    *,
    backend: str = "real",
    epsilon: float = DEFAULT_EPSILON,
) -> MomentIntegralResult:
    """int_1^T |zeta(sigma + i t)|^2 dt; ``tol`` is relative to zeta(2 sigma) T."""
    _check_backend(backend)
    sigma = float(sigma)
    T = float(T)
    if sigma < 0.5 + epsilon:
        raise DomainError(f"sigma={sigma} must be at least 1/2 + {epsilon}")
    z2s = zeta_two_sigma(sigma)
    if backend == "synthetic":
        if not T > 0:
            raise DomainError(f"T={T} must be positive")
        return MomentIntegralResult(z2s * T, min(1.0, T), T, 0.0, 0, "synthetic")
    if T < 1:
        raise DomainError(f"T={T} must be at least 1")
    abs_tol = tol * z2s * max(T, 1.0)

    def integrand(t):
        return np.abs(zeta_em(sigma, t)) ** 2

    return _from_store(
        "hl", {"sigma": sigma, "lower": 1.0}, 1.0, T, tol,
        lambda: integrate_adaptive(integrand, 1.0, T, abs_tol, max_width=1.0),
    )


def crit_integral(T1: float, T2: float, tol: float = 1e-10, *, backend: str = "real") -> MomentIntegralResult:
    """int_{T1}^{T2} |zeta(1/2 + i t)|^2 dt.

    The synthetic backend is the leading term (1 - c) T1 of a ladder segment
    [T1, phi1_inv(T1)]; it is meaningful only for that pairing.
    ``tol`` is relative to (T2 - T1) log(T2).
    """
    _check_backend(backend)
    T1 = float(T1)
    T2 = float(T2)
    if not 0 <= T1 <= T2:
        raise DomainError(f"need 0 <= T1 <= T2, got ({T1}, {T2})")
    if backend == "synthetic":
        return MomentIntegralResult(ONE_MINUS_C * T1, T1, T2, 0.0, 0, "synthetic")
    if T1 == T2:
        return MomentIntegralResult(0.0, T1, T2, 0.0, 0)
    abs_tol = tol * max(1.0, T2 - T1) * max(1.0, math.log(T2))

    def integrand(t):
        return hardy_z(t) ** 2

    def compute():
        res = integrate_adaptive(integrand, T1, T2, abs_tol, max_width=CRIT_MAX_WIDTH)
        # Z itself carries an absolute error up to PRECISION_TARGET, which the
        # rule's own estimate cannot see; bound its effect by Cauchy-Schwarz:
        # int 2|Z| delta <= 2 delta sqrt((T2 - T1) int Z^2)
        noise = 2.0 * PRECISION_TARGET * math.sqrt((T2 - T1) * res.value)
        return replace(res, abs_error_estimate=res.abs_error_estimate + noise)

    return _from_store("crit", {"lower": T1}, T1, T2, tol, compute)


def s1_moment_integral(
    l: int,
    T: float,
    tol: float = 1e-8,
    *,
    backend: str = "real",
    cbar: Optional[float] = None,
) -> MomentIntegralResult:
    """int_1^T |S_1(t)|^{2l} dt, split at every zero ordinate.

    The synthetic backend needs the Selberg constant ``cbar`` and returns
    cbar * T.  ``tol`` is relative to T.
    """
    _check_backend(backend)
    if int(l) != l or l < 1:
        raise DomainError(f"l must be a positive integer, got {l}")
    l = int(l)
    T = float(T)
    if backend == "synthetic":
        if cbar is None or cbar <= 0:
            raise DomainError("synthetic S_1 moment needs a positive cbar")
        if not T > 0:
            raise DomainError(f"T={T} must be positive")
        return MomentIntegralResult(cbar * T, min(1.0, T), T, 0.0, 0, "synthetic")
    if T < 1:
        raise DomainError(f"T={T} must be at least 1")

    def compute():
        zeros = zeros_up_to(T)

        def integrand(t):
            return np.abs(s1_values(t, zeros)) ** (2 * l)

        return integrate_adaptive(integrand, 1.0, T, tol * max(T, 1.0), breakpoints=zeros, max_width=1.0)

    return _from_store("s1", {"l": l, "lower": 1.0}, 1.0, T, tol, compute)
