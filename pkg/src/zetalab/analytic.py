"""zeta on sigma >= 1/2, the Riemann-Siegel functions theta and Z, S(t) and S_1(t).

Every routine accepts scalars; zeta_em, rs_theta and hardy_z also accept
1-D arrays of heights and are vectorized over them.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import loggamma

from . import _rs
from .constants import PRECISION_TARGET
from .errors import (
    ContinuationError,
    DomainError,
    MissedZeroError,
    NumericalError,
    OnZeroError,
    PoleError,
    PrecisionUnreachable,
)

T_SWITCH = 400.0
ZERO_TOL = 1e-9
THETA_ASYMPTOTIC_FROM = 10.0

_MAX_TERMS = 2_000_000
_MAX_CORRECTIONS = 60
_CHUNK = 1 << 20


@lru_cache(maxsize=1)
def _em_coefficients() -> tuple[float, ...]:
    """B_{2k}/(2k)! for k = 1.._MAX_CORRECTIONS, exact before rounding."""
    n_max = 2 * _MAX_CORRECTIONS
    # Akiyama-Tanigawa
    a = [Fraction(0)] * (n_max + 1)
    bern = []
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        bern.append(a[0])
    return tuple(float(bern[2 * k] / math.factorial(2 * k)) for k in range(1, _MAX_CORRECTIONS + 1))


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def _dirichlet_head(s: np.ndarray, n_terms: int) -> np.ndarray:
    """sum_{n=1}^{n_terms} n^{-s} for each entry of s."""
    out = np.zeros(s.shape, dtype=complex)
    if n_terms <= 0:
        return out
    logn = np.log(np.arange(1, n_terms + 1, dtype=float))
    rows = max(1, _CHUNK // n_terms)
    for i in range(0, s.size, rows):
        block = s[i:i + rows]
        out[i:i + rows] = np.exp(-np.outer(block, logn)).sum(axis=1)
    return out


def zeta_em(sigma: float, t, tol: float = PRECISION_TARGET):
    """zeta(sigma + i t) by Euler-Maclaurin summation.

    The head length N is at least |t|/pi so the correction series converges
    geometrically; correction terms are added until they fall below tol/10.
    """
    sigma = float(sigma)
    if sigma < 0.5:
        raise DomainError(f"sigma={sigma} < 1/2 is not supported")
    t_arr, scalar = _as_array(t)
    t_flat = t_arr.ravel()
    if sigma == 1.0 and np.any(t_flat == 0.0):
        raise PoleError("zeta has a pole at s = 1")
    if t_flat.size == 0:
        return t_arr.astype(complex)
    t_max = float(np.max(np.abs(t_flat)))
    n = max(16, int(math.ceil(t_max / math.pi)) + 1)
    if n > _MAX_TERMS:
        raise PrecisionUnreachable(f"|t|={t_max} needs {n} terms, limit is {_MAX_TERMS}")
    s = sigma + 1j * t_flat
    result = _dirichlet_head(s, n - 1)
    n_pow = np.exp(-s * math.log(n))  # N^{-s}
    with np.errstate(divide="ignore", invalid="ignore"):
        result += n * n_pow / (s - 1.0) + 0.5 * n_pow
    poch = s.copy()
    coeffs = _em_coefficients()
    for k in range(1, _MAX_CORRECTIONS + 1):
        term = coeffs[k - 1] * poch * n_pow / float(n) ** (2 * k - 1)
        result += term
        if np.max(np.abs(term)) < 0.1 * tol:
            break
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
    else:
        raise PrecisionUnreachable(f"Euler-Maclaurin did not reach tol={tol} at sigma={sigma}")
    result = result.reshape(t_arr.shape)
    return complex(result) if scalar else result


_THETA_COEFFS = (
    (1, 1.0 / 48.0),
    (3, 7.0 / 5760.0),
    (5, 31.0 / 80640.0),
    (7, 127.0 / 430080.0),
    (9, 511.0 / 1216512.0),
)


def _theta_any(t: np.ndarray) -> np.ndarray:
    """theta(t) for t >= 0 without the domain check."""
    out = np.empty_like(t)
    big = t >= THETA_ASYMPTOTIC_FROM
    tb = t[big]
    val = 0.5 * tb * np.log(tb / (2 * np.pi)) - 0.5 * tb - np.pi / 8
    for power, coef in _THETA_COEFFS:
        val += coef / tb**power
    out[big] = val
    ts = t[~big]
    out[~big] = loggamma(0.25 + 0.5j * ts).imag - 0.5 * ts * math.log(math.pi)
    return out


def rs_theta(t):
    """Riemann-Siegel theta; asymptotic series from t = 10, log-Gamma below."""
    t_arr, scalar = _as_array(t)
    if np.any(t_arr <= 0):
        raise DomainError("rs_theta needs t > 0")
    out = _theta_any(t_arr.ravel()).reshape(t_arr.shape)
    return float(out) if scalar else out


def _rs_z(t: np.ndarray) -> np.ndarray:
    """Riemann-Siegel main sum plus correction terms C_0..C_4."""
    a = np.sqrt(t / (2 * np.pi))
    n_main = np.floor(a).astype(np.int64)
    p = a - n_main
    theta = _theta_any(t)
    out = np.empty_like(t)
    n_max = int(n_main.max())
    n = np.arange(1, n_max + 1, dtype=float)
    inv_sqrt = 1.0 / np.sqrt(n)
    logn = np.log(n)
    rows = max(1, _CHUNK // n_max)
    for i in range(0, t.size, rows):
        sl = slice(i, i + rows)
        phase = theta[sl, None] - t[sl, None] * logn[None, :]
        terms = np.cos(phase) * inv_sqrt[None, :]
        terms[n[None, :] > n_main[sl, None]] = 0.0
        out[sl] = 2.0 * terms.sum(axis=1)
    z = 1.0 - 2.0 * p
    inv_a = 1.0 / a
    corr = np.zeros_like(t)
    scale = np.ones_like(t)
    for poly in _rs.correction_polynomials():
        corr += P.polyval(z, poly) * scale
        scale = scale * inv_a
    sign = np.where(n_main % 2 == 1, 1.0, -1.0)  # (-1)^(N-1)
    return out + sign * corr / np.sqrt(a)


def hardy_z(t):
    """Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + i t), real and even in t."""
    t_arr, scalar = _as_array(t)
    tf = np.abs(t_arr.ravel())
    out = np.empty_like(tf)
    low = tf < T_SWITCH
    if low.any():
        tl = tf[low]
        out[low] = (np.exp(1j * _theta_any(tl)) * zeta_em(0.5, tl)).real
    if (~low).any():
        out[~low] = _rs_z(tf[~low])
    out = out.reshape(t_arr.shape)
    return float(out) if scalar else out


# ----------------------------------------------------------------------------
# argument of zeta on the critical line


def s_of_t(t: float, *, max_halvings: int = 40) -> float:
    """S(t) = arg zeta(1/2 + i t) / pi, continued from sigma = 2 along sigma.

    On sigma = 2 the real part of zeta exceeds 2 - zeta(2) > 0, so the
    principal argument is the continuous one there.  The march down to
    sigma = 1/2 halves the step whenever one increment exceeds pi/4.
    """
    t = float(t)
    if t <= 0:
        raise DomainError("s_of_t needs t > 0")
    z_half = zeta_em(0.5, t)
    if abs(z_half) < ZERO_TOL:
        raise OnZeroError(f"t={t} is within tolerance of a zero ordinate")
    sigma = 2.0
    prev = zeta_em(sigma, t)
    arg = math.atan2(prev.imag, prev.real)
    step = 0.125
    min_step = 0.125 / 2**max_halvings
    while sigma > 0.5:
        new_sigma = max(0.5, sigma - step)
        cur = z_half if new_sigma == 0.5 else zeta_em(new_sigma, t)
        ratio = cur / prev
        delta = math.atan2(ratio.imag, ratio.real)
        if abs(delta) > math.pi / 4:
            step *= 0.5
            if step < min_step:
                raise ContinuationError(f"argument continuation stalled at sigma={sigma}, t={t}")
            continue
        arg += delta
        prev = cur
        sigma = new_sigma
        step = min(0.125, 2 * step)
    return arg / math.pi


def zero_count(t: float) -> int:
    """N(t) from the counting identity theta/pi + 1 + S(t)."""
    if t <= 0:
        return 0
    value = rs_theta(t) / math.pi + 1.0 + s_of_t(t)
    k = round(value)
    if abs(value - k) > 1e-6:
        raise NumericalError(f"counting identity off-integer at t={t}: {value!r}")
    return int(k)


# ----------------------------------------------------------------------------
# zeros


@dataclass(frozen=True)
class ZeroList:
    ordinates: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self) -> None:
        if self.ordinates.size > 1 and np.any(np.diff(self.ordinates) <= 0):
            raise ValueError("ordinates must be strictly increasing")

    def __len__(self) -> int:
        return int(self.ordinates.size)


_BLOCK = 50.0
_block_cache: dict[int, np.ndarray] = {}
_block_lock = threading.Lock()


def _mean_spacing(t: float) -> float:
    if t <= 2 * math.pi * math.e:
        return 1.0
    return 2 * math.pi / math.log(t / (2 * math.pi))


def _bisect_sign_changes(lo: np.ndarray, hi: np.ndarray, z_lo: np.ndarray) -> np.ndarray:
    lo = lo.copy()
    hi = hi.copy()
    s_lo = np.sign(z_lo)
    while np.max(hi - lo) > ZERO_TOL:
        mid = 0.5 * (lo + hi)
        z_mid = hardy_z(mid)
        same = np.sign(z_mid) == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        exact = z_mid == 0.0
        lo[exact] = hi[exact] = mid[exact]
    # one secant step inside the final bracket removes the midpoint bias
    z_lo, z_hi = hardy_z(lo), hardy_z(hi)
    denom = z_hi - z_lo
    with np.errstate(divide="ignore", invalid="ignore"):
        root = lo - z_lo * (hi - lo) / denom
    ok = (denom != 0) & (root >= lo) & (root <= hi)
    return np.where(ok, root, 0.5 * (lo + hi))


def _scan(lo: float, hi: float, step: float) -> np.ndarray:
    n = max(2, int(math.ceil((hi - lo) / step)) + 1)
    grid = np.linspace(lo, hi, n)
    z = hardy_z(grid)
    exact = grid[z == 0.0]
    change = np.nonzero(z[:-1] * z[1:] < 0)[0]
    found = _bisect_sign_changes(grid[change], grid[change + 1], z[change])
    return np.unique(np.concatenate([found, exact]))


def _block_zeros(k: int) -> np.ndarray:
    lo = max(k * _BLOCK, 1.0)
    hi = (k + 1) * _BLOCK
    expected = zero_count(hi) - zero_count(lo)
    step = min(0.25, _mean_spacing(hi) / 6)
    for _ in range(8):
        zeros = _scan(lo, hi, step)
        zeros = zeros[(zeros > lo) & (zeros <= hi)]
        if zeros.size == expected:
            return zeros
        step *= 0.5
    raise MissedZeroError(
        f"found {zeros.size} sign changes on [{lo}, {hi}] but the counting identity gives {expected}"
    )


def _zeros_in_block(k: int, use_cache: bool) -> np.ndarray:
    if not use_cache:
        return _block_zeros(k)
    with _block_lock:
        cached = _block_cache.get(k)
    if cached is None:
        cached = _block_zeros(k)
        with _block_lock:
            _block_cache.setdefault(k, cached)
    return cached


def find_zeros(t_lo: float, t_hi: float, *, use_cache: bool = True) -> ZeroList:
    """All zeros of Z in (t_lo, t_hi], refined to ZERO_TOL.

    The range is covered by fixed blocks of length 50 whose zero sets are
    each checked against the counting identity, so cached and uncached calls
    return identical ordinates.
    """
    t_lo = float(t_lo)
    t_hi = float(t_hi)
    if not 0 <= t_lo < t_hi:
        raise DomainError(f"need 0 <= t_lo < t_hi, got ({t_lo}, {t_hi})")
    k_lo = int(t_lo // _BLOCK)
    k_hi = int(math.ceil(t_hi / _BLOCK)) - 1
    parts = [_zeros_in_block(k, use_cache) for k in range(k_lo, k_hi + 1)]
    zeros = np.concatenate(parts) if parts else np.empty(0)
    zeros = zeros[(zeros > t_lo) & (zeros <= t_hi)]
    expected = zero_count(t_hi) - zero_count(t_lo)
    if zeros.size != expected:
        raise MissedZeroError(f"{zeros.size} zeros found on ({t_lo}, {t_hi}], expected {expected}")
    return ZeroList(zeros, (t_lo, t_hi))


def zeros_up_to(t: float) -> np.ndarray:
    """Cached ordinates of all zeros in (0, t]."""
    if t <= 0:
        return np.empty(0)
    k_hi = int(math.ceil(t / _BLOCK)) - 1
    parts = [_zeros_in_block(k, True) for k in range(0, k_hi + 1)]
    zeros = np.concatenate(parts)
    return zeros[zeros <= t]


# ----------------------------------------------------------------------------
# S_1


_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _theta_antiderivative(t: np.ndarray) -> np.ndarray:
    """Antiderivative of the asymptotic theta series (valid for t >= 10)."""
    out = 0.25 * t**2 * np.log(t / (2 * np.pi)) - 0.375 * t**2 - np.pi * t / 8
    out += np.log(t) / 48.0
    for power, coef in _THETA_COEFFS[1:]:
        out += -coef / ((power - 1) * t ** (power - 1))
    return out


def _theta_integral_small(t: float) -> float:
    """int_0^t theta for 0 <= t <= 10, composite Gauss-Legendre on unit panels."""
    if t <= 0:
        return 0.0
    n = int(math.ceil(t))
    edges = np.linspace(0.0, t, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return math.fsum(w * _theta_any(x))


_THETA_INT_10 = None


def theta_integral(t):
    """int_0^t theta(u) du, vectorized."""
    global _THETA_INT_10
    if _THETA_INT_10 is None:
        _THETA_INT_10 = _theta_integral_small(THETA_ASYMPTOTIC_FROM)
    t_arr, scalar = _as_array(t)
    tf = t_arr.ravel()
    out = np.empty_like(tf)
    big = tf >= THETA_ASYMPTOTIC_FROM
    ten = np.array([THETA_ASYMPTOTIC_FROM])
    out[big] = _THETA_INT_10 + (_theta_antiderivative(tf[big]) - _theta_antiderivative(ten)[0])
    out[~big] = [_theta_integral_small(float(x)) for x in tf[~big]]
    out = out.reshape(t_arr.shape)
    return float(out) if scalar else out


def s1_values(t, zeros: np.ndarray | None = None):
    """S_1(t) in closed form: sum_{gamma <= t} (t - gamma) - t - Theta(t)/pi.

    ``zeros`` must contain every ordinate up to max(t); by default the cached
    zero table is used.
    """
    t_arr, scalar = _as_array(t)
    tf = t_arr.ravel()
    if np.any(tf < 0):
        raise DomainError("S_1 needs t >= 0")
    if zeros is None:
        zeros = zeros_up_to(float(tf.max()) if tf.size else 0.0)
    prefix = np.concatenate([[0.0], np.cumsum(zeros)])
    k = np.searchsorted(zeros, tf, side="right")
    out = (k * tf - prefix[k]) - tf - theta_integral(tf) / math.pi
    out = out.reshape(t_arr.shape)
    return float(out) if scalar else out


def s1_of_t(t: float, tol: float | None = None) -> float:
    """S_1(t) = int_0^t S(u) du by adaptive quadrature split at every zero.

    Between consecutive zeros S(u) = k - 1 - theta(u)/pi with k fixed, so
    each panel integrates a smooth function.
    """
    from .quadrature import integrate_adaptive

    t = float(t)
    if t < 0:
        raise DomainError("S_1 needs t >= 0")
    if t == 0:
        return 0.0
    zeros = find_zeros(0.0, t).ordinates if t > 1.0 else np.empty(0)

    def s_piecewise(u: np.ndarray) -> np.ndarray:
        k = np.searchsorted(zeros, u, side="right")
        return k - 1.0 - _theta_any(u) / math.pi

    if tol is None:
        tol = 1e-8 * (1.0 + t)
    return integrate_adaptive(s_piecewise, 0.0, t, tol, breakpoints=zeros, max_width=1.0).value
