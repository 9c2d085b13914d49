"""Dirichlet series f(s) = sum a_n n^{-s}, their mean values and families.

Every series is evaluated on a vertical line sigma0 + it.  Truncation is
chosen from a growth bound |a_n| <= C n^kappa, so that the neglected tail
sum_{n>N} |a_n| n^{-sigma0} is provably below the requested tolerance.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, TailBoundError
from .quadrature import fixed_panel_rule, integrate_adaptive

Coefficients = Callable[[np.ndarray], np.ndarray]

_CHUNK = 1 << 22  # complex entries per evaluation block
_MAX_TERMS = 50_000_000


# ----------------------------------------------------------------------------
# arithmetic functions by sieve


class _Sieve:
    """mu, liouville and divisor counts for 1..n, grown on demand."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.size = 0
        self.mu = self.lam = self.d = np.zeros(1, dtype=np.int64)

    def ensure(self, n: int) -> None:
        if n <= self.size:
            return
        with self._lock:
            if n <= self.size:
                return
            size = max(n, 2 * self.size, 1 << 12)
            self.mu, self.lam, self.d = _sieve(size)
            self.size = size


def _sieve(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.arange(n + 1, dtype=np.int64)
    spf[spf == 0] = idx[spf == 0]

    m = idx.copy()
    m[0] = 1
    d = np.ones(n + 1, dtype=np.int64)
    omega_big = np.zeros(n + 1, dtype=np.int64)
    squarefree = np.ones(n + 1, dtype=bool)
    prev = np.zeros(n + 1, dtype=np.int64)
    exp = np.zeros(n + 1, dtype=np.int64)
    active = m > 1
    while active.any():
        p = np.where(active, spf[m], 0)
        same = active & (p == prev)
        new = active & ~same
        # close out the previous prime's exponent before starting a new one
        d[new] *= exp[new] + 1
        exp = np.where(same, exp + 1, np.where(new, 1, exp))
        squarefree &= ~same
        omega_big += active
        prev = np.where(active, p, prev)
        m = np.where(active, m // np.maximum(p, 1), m)
        active = m > 1
    d *= exp + 1
    lam = np.where(omega_big % 2 == 0, 1, -1).astype(np.int64)
    omega = np.zeros(n + 1, dtype=np.int64)
    # mu(n) = (-1)^{number of primes} on squarefree n, where Omega = omega
    omega[squarefree] = omega_big[squarefree]
    mu = np.where(squarefree, np.where(omega % 2 == 0, 1, -1), 0).astype(np.int64)
    for arr in (mu, lam, d):
        arr[0] = 0
    return mu, lam, d


_SIEVE = _Sieve()


def _sieved(attr: str) -> Coefficients:
    def coeff(n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        _SIEVE.ensure(int(n.max(initial=1)))
        return getattr(_SIEVE, attr)[n].astype(float)

    return coeff


def mobius(n: np.ndarray) -> np.ndarray:
    return _sieved("mu")(n)


def liouville(n: np.ndarray) -> np.ndarray:
    return _sieved("lam")(n)


def divisor_count(n: np.ndarray) -> np.ndarray:
    return _sieved("d")(n)


def unit(n: np.ndarray) -> np.ndarray:
    return np.ones(np.shape(n), dtype=float)


def divisor_growth_constant(kappa: float) -> float:
    """sup_n d(n) / n^kappa, as an Euler product of per-prime maxima."""
    if not 0 < kappa:
        raise DomainError("kappa must be positive")
    const = 1.0
    p = 2
    # for p^kappa >= 2 every factor (e+1)/p^{kappa e} is at most 1
    while p ** kappa < 2:
        if all(p % q for q in range(2, math.isqrt(p) + 1)):
            e_max = int(math.ceil(1 / (kappa * math.log(p)))) + 2
            const *= max((e + 1) / p ** (kappa * e) for e in range(e_max + 1))
        p += 1
    return const


# ----------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class DirichletSeriesSpec:
    """A Dirichlet series with its growth metadata.

    ``kappa`` and ``coeff_const`` encode |a_n| <= coeff_const * n^kappa; a
    finite ``length`` means a_n = 0 beyond it.
    """

    name: str
    coeff: Coefficients = field(compare=False)
    sigma0: float
    kappa: Optional[float] = 0.0
    coeff_const: float = 1.0
    closed_form_F: Optional[float] = None
    length: Optional[int] = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.sigma0):
            raise DomainError("sigma0 must be finite")
        if self.length is not None and self.length < 1:
            raise DomainError("a finite coefficient list needs at least one entry")
        if self.length is None and self.kappa is not None and not self.sigma0 > self.kappa + 1:
            raise DomainError(
                f"{self.name}: sigma0={self.sigma0} is not beyond the absolute "
                f"convergence bound kappa + 1 = {self.kappa + 1}"
            )
        if self.coeff_const <= 0:
            raise DomainError("coeff_const must be positive")

    def truncation(self, tol: float) -> int:
        """Smallest N whose tail bound sum_{n>N} |a_n| n^{-sigma0} is below tol."""
        if self.length is not None:
            return self.length
        if self.kappa is None:
            raise TailBoundError(f"{self.name}: no coefficient growth bound, tail cannot be bounded")
        if tol <= 0:
            raise DomainError("tol must be positive")
        gap = self.sigma0 - self.kappa - 1
        # C int_N^inf x^{kappa - sigma0} dx = C N^{-gap} / gap
        n = math.ceil((self.coeff_const / (tol * gap)) ** (1 / gap))
        if n > _MAX_TERMS:
            raise TailBoundError(f"{self.name}: {n} terms needed for tol={tol}")
        return max(n, 1)

    def tail_bound(self, n: int, power: float = 1.0) -> float:
        """Bound on sum_{m>n} |a_m|^power m^{-power sigma0}."""
        if self.length is not None and n >= self.length:
            return 0.0
        if self.kappa is None:
            raise TailBoundError(f"{self.name}: no coefficient growth bound")
        gap = power * (self.sigma0 - self.kappa) - 1
        if gap <= 0:
            raise TailBoundError(f"{self.name}: tail of power {power} diverges")
        return self.coeff_const ** power * n ** (-gap) / gap


def _zeta(s: float) -> float:
    from .analytic import zeta_em

    return zeta_em(s, 0.0).real


DIVISOR_KAPPA = 0.3
CATALOG = ("unit", "mobius", "liouville", "divisor")


def catalog_spec(name: str, sigma0: float = 2.0) -> DirichletSeriesSpec:
    """One of the built-in series on the line sigma0."""
    s = float(sigma0)
    if name == "unit":
        return DirichletSeriesSpec("unit", unit, s, 0.0, 1.0, _zeta(2 * s) if s > 1 else None)
    if name == "mobius":
        return DirichletSeriesSpec("mobius", mobius, s, 0.0, 1.0,
                                   _zeta(2 * s) / _zeta(4 * s) if s > 1 else None)
    if name == "liouville":
        return DirichletSeriesSpec("liouville", liouville, s, 0.0, 1.0, _zeta(2 * s) if s > 1 else None)
    if name == "divisor":
        closed = _zeta(2 * s) ** 4 / _zeta(4 * s) if s > 1 else None
        return DirichletSeriesSpec("divisor", divisor_count, s, DIVISOR_KAPPA,
                                   divisor_growth_constant(DIVISOR_KAPPA), closed)
    raise DomainError(f"unknown series {name!r}; built-ins are {CATALOG}")


def finite_spec(name: str, coefficients: Sequence[float], sigma0: float,
                kappa: Optional[float] = None) -> DirichletSeriesSpec:
    a = np.array(coefficients, dtype=float)
    if a.ndim != 1 or len(a) == 0 or not np.all(np.isfinite(a)):
        raise DomainError("coefficients must be a nonempty list of finite numbers")
    frozen = np.concatenate([[0.0], a])
    frozen.setflags(write=False)

    def coeff(n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape)
        inside = n < len(frozen)
        out[inside] = frozen[n[inside]]
        return out

    closed = float(math.fsum(a ** 2 / np.arange(1, len(a) + 1) ** (2 * sigma0)))
    const = 1.0
    if kappa is not None:
        const = max(1e-300, float(np.max(np.abs(a) / np.arange(1, len(a) + 1) ** kappa)))
    return DirichletSeriesSpec(name, coeff, float(sigma0), kappa, const, closed, len(a))


def read_coefficient_file(path: str | Path) -> DirichletSeriesSpec:
    """Parse a coefficient list whose first line is ``sigma0=<v> kappa=<v>``."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise DomainError(f"{path}: empty coefficient file")
    header = {}
    for item in lines[0].split():
        key, sep, value = item.partition("=")
        if not sep or key not in ("sigma0", "kappa"):
            raise DomainError(f"{path}: bad header item {item!r}")
        try:
            header[key] = float(value)
        except ValueError as exc:
            raise DomainError(f"{path}: bad header value {item!r}") from exc
    if "sigma0" not in header:
        raise DomainError(f"{path}: header must set sigma0")
    coeffs = []
    for lineno, line in enumerate(lines[1:], start=2):
        text = line.strip()
        if not text:
            continue
        try:
            coeffs.append(float(text))
        except ValueError as exc:
            raise DomainError(f"{path}:{lineno}: not a number: {text!r}") from exc
    return finite_spec(path.stem, coeffs, header["sigma0"], header.get("kappa"))


def check_convergence(spec: DirichletSeriesSpec, tol: float = 1e-3, blocks: int = 16) -> bool:
    """Dyadic block sums of |a_n| n^{-sigma0} must end below tol."""
    incs = []
    for k in range(blocks):
        n = np.arange(2 ** k, 2 ** (k + 1), dtype=np.int64)
        if spec.length is not None:
            n = n[n <= spec.length]
        incs.append(float(np.sum(np.abs(spec.coeff(n)) / n.astype(float) ** spec.sigma0)) if len(n) else 0.0)
    return incs[-1] < tol and incs[-1] <= max(incs[:4])


# ----------------------------------------------------------------------------
# evaluation


def eval_series(spec: DirichletSeriesSpec, t, tol: float = 1e-6):
    """f(sigma0 + it), scalar or array t, with tail below ``tol``."""
    n_terms = spec.truncation(tol)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros(tt.shape, dtype=complex)
    step = max(1, _CHUNK // max(1, tt.size))
    for start in range(1, n_terms + 1, step):
        n = np.arange(start, min(n_terms, start + step - 1) + 1, dtype=np.int64)
        a = spec.coeff(n)
        keep = a != 0
        if not keep.any():
            continue
        n, a = n[keep], a[keep]
        log_n = np.log(n.astype(float))
        amp = a * np.exp(-spec.sigma0 * log_n)
        out += np.exp(-1j * np.outer(tt, log_n)) @ amp
    if np.ndim(t) == 0:
        return complex(out[0])
    return out


def big_f(spec: DirichletSeriesSpec, tol: float = 1e-12) -> float:
    """F = sum |a_n|^2 n^{-2 sigma0}, with a rigorous tail bound."""
    if spec.length is not None:
        n_terms = spec.length
    else:
        if spec.kappa is None:
            raise TailBoundError(f"{spec.name}: no coefficient growth bound")
        gap = 2 * (spec.sigma0 - spec.kappa) - 1
        n_terms = math.ceil((spec.coeff_const ** 2 / (tol * gap)) ** (1 / gap))
        if n_terms > _MAX_TERMS:
            raise ConvergenceError(f"{spec.name}: {n_terms} terms needed for tol={tol}")
    parts = []
    for start in range(1, n_terms + 1, _CHUNK):
        n = np.arange(start, min(n_terms, start + _CHUNK - 1) + 1, dtype=np.int64)
        a = spec.coeff(n)
        parts.append(math.fsum(a * a * np.exp(-2 * spec.sigma0 * np.log(n.astype(float)))))
    value = math.fsum(parts)
    tail = spec.tail_bound(n_terms, 2.0)
    if not value > 0:
        raise ConvergenceError(f"{spec.name}: F must be positive, got {value}")
    if spec.closed_form_F is not None:
        slack = tol + tail + 64 * np.finfo(float).eps * value
        if not -slack <= spec.closed_form_F - value <= slack:
            raise ConvergenceError(
                f"{spec.name}: partial sum {value!r} disagrees with closed form {spec.closed_form_F!r}"
            )
    return value


def _square_modulus(spec: DirichletSeriesSpec, tol: float):
    def g(t):
        v = eval_series(spec, t, tol)
        return v.real ** 2 + v.imag ** 2

    return g


def mean_square_integral(
    spec: DirichletSeriesSpec, T: float, tol: float = 1e-4, *, quad_tol: float = 1e-8, keep_edges: bool = False
):
    """int_0^T |f(sigma0 + it)|^2 dt.

    ``tol`` bounds the series tail; ``quad_tol`` times T bounds the quadrature.
    Truncating the series moves the mean value itself only by about
    tol / N, so a loose ``tol`` is cheap and harmless here.
    """
    if T < 0:
        raise DomainError("T must be nonnegative")
    return integrate_adaptive(_square_modulus(spec, tol), 0.0, T, quad_tol * max(1.0, T),
                              max_width=1.0, keep_edges=keep_edges)


def mean_value_estimate(spec: DirichletSeriesSpec, T: float, tol: float = 1e-4, *, quad_tol: float = 1e-8) -> float:
    """(1/T) int_0^T |f(sigma0 + it)|^2 dt."""
    if not T > 0:
        raise DomainError("T must be positive")
    return mean_square_integral(spec, T, tol, quad_tol=quad_tol).value / T


# ----------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class SeriesFamily:
    members: tuple[DirichletSeriesSpec, ...]
    big_f_values: tuple[float, ...] = field(init=False)
    big_f_product: float = field(init=False)

    def __post_init__(self) -> None:
        members = tuple(self.members)
        if not members:
            raise DomainError("a family needs at least one member")
        object.__setattr__(self, "members", members)
        values = tuple(_cached_big_f(m) for m in members)
        object.__setattr__(self, "big_f_values", values)
        object.__setattr__(self, "big_f_product", math.prod(values))

    @property
    def M(self) -> int:
        return len(self.members)

    @property
    def label(self) -> str:
        return ",".join(f"{m.name}:{m.sigma0!r}" for m in self.members)


@lru_cache(maxsize=64)
def _big_f_by_key(name: str, sigma0: float) -> float:
    return big_f(catalog_spec(name, sigma0))


def _cached_big_f(spec: DirichletSeriesSpec) -> float:
    if spec.name in CATALOG and spec.length is None:
        return _big_f_by_key(spec.name, spec.sigma0)
    return big_f(spec)


def parse_family(text: str) -> SeriesFamily:
    """``name[:sigma0],...`` with built-in names, or ``@path`` for a coefficient file."""
    members = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise DomainError(f"empty member in family {text!r}")
        if item.startswith("@"):
            members.append(read_coefficient_file(item[1:]))
            continue
        name, sep, sigma = item.partition(":")
        try:
            s = float(sigma) if sep else 2.0
        except ValueError as exc:
            raise DomainError(f"bad sigma0 in family member {item!r}") from exc
        members.append(catalog_spec(name, s))
    return SeriesFamily(tuple(members))


def family_product_integral(
    fam: SeriesFamily, T: float, tol: float = 1e-3, *, backend: str = "real", quad_tol: float = 1e-8
) -> float:
    """prod_m (int_0^T |f_m|^2)^{1/M}."""
    if not T > 0:
        raise DomainError("T must be positive")
    if backend == "synthetic":
        return fam.big_f_product ** (1 / fam.M) * T
    if backend != "real":
        raise DomainError(f"unknown backend {backend!r}")
    logs = [math.log(mean_square_integral(m, T, tol, quad_tol=quad_tol).value) for m in fam.members]
    return math.exp(math.fsum(logs) / fam.M)


def box_product_check(fam: SeriesFamily, T: float, tol: float = 1e-3, max_nodes: int = 1 << 24) -> tuple[float, float]:
    """Integral of prod_m |f_m(t_m)|^2 over [0, T]^M next to the product of 1-D integrals.

    Both sides use the same panels per coordinate: the box side sums the full
    tensor-product rule, the other multiplies M one-dimensional sums.
    """
    rules = []
    for m in fam.members:
        edges = mean_square_integral(m, T, tol, keep_edges=True).panel_edges
        x, w = fixed_panel_rule(edges)
        rules.append(w * _square_modulus(m, tol)(x))
    if math.prod(len(r) for r in rules) > max_nodes:
        raise DomainError("tensor-product rule too large; lower T or M")
    tensor = rules[0]
    for r in rules[1:]:
        tensor = np.multiply.outer(tensor, r)
    box = math.fsum(tensor.ravel())
    product = math.prod(math.fsum(r) for r in rules)
    return box, product
