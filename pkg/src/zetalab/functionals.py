"""Finite-tau limit functionals built from the moment integrals.

Each functional substitutes an upper limit X proportional to x * tau so
that the product (or sum) of leading terms equals x * tau exactly; the
synthetic backend therefore returns x to rounding, while the real backend
approaches x as tau grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .constants import ONE_MINUS_C
from .dirichlet import SeriesFamily, family_product_integral
from .divisors import SegmentSum, divisor_functional
from .errors import DomainError
from .ladder import DEFAULT_CONFIG, LadderConfig, phi1_inv
from .quadrature import (
    DEFAULT_EPSILON,
    crit_integral,
    hl_sigma_integral,
    s1_moment_integral,
    zeta_two_sigma,
)
from .records import FunctionalEstimate

BACKENDS = ("real", "synthetic")


def _check(x: float, tau: float, backend: str) -> None:
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"x must be positive and finite, got {x!r}")
    if not tau > 0 or not math.isfinite(tau):
        raise DomainError(f"tau must be positive and finite, got {tau!r}")
    if backend not in BACKENDS:
        raise DomainError(f"backend must be one of {BACKENDS}, got {backend!r}")


def _check_sigma(sigma: float, epsilon: float) -> None:
    if sigma < 0.5 + epsilon:
        raise DomainError(f"sigma must be at least {0.5 + epsilon}, got {sigma}")


def _check_cbar(cbar: float) -> None:
    if cbar is None or not cbar > 0:
        raise DomainError("a positive Selberg constant estimate cbar is required")


# ----------------------------------------------------------------------------
# Fermat rationals


@dataclass(frozen=True)
class FermatRational:
    """(x^n + y^n) / z^n, held exactly."""

    x: int
    y: int
    z: int
    n: int
    numerator: int = field(init=False, repr=False)
    denominator: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("x", "y", "z", "n"):
            v = getattr(self, name)
            if type(v) is not int:
                raise DomainError(f"{name} must be an int, got {v!r}")
        if min(self.x, self.y, self.z) < 1:
            raise DomainError("x, y, z must be positive")
        if self.n < 3:
            raise DomainError("n must be at least 3")
        num = self.x ** self.n + self.y ** self.n
        den = self.z ** self.n
        if num == den:
            # would contradict Fermat's last theorem; kept as a hard check
            raise ArithmeticError(f"x^n + y^n = z^n for {(self.x, self.y, self.z, self.n)}")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @property
    def exact_value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def float_value(self) -> float:
        return self.numerator / self.denominator


# ----------------------------------------------------------------------------
# Selberg constant


@dataclass(frozen=True)
class SelbergConstantEstimate:
    l: int
    estimates: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.estimates:
            raise ValueError("need at least one (T, value/T) pair")
        if not self.adopted > 0:
            raise ValueError("adopted constant must be positive")

    @property
    def adopted(self) -> float:
        return self.estimates[-1][1]

    @property
    def spread(self) -> float:
        """Largest pairwise relative difference among the estimates."""
        vals = [v for _, v in self.estimates]
        return (max(vals) - min(vals)) / min(vals)


DEFAULT_CBAR_GRID = (500.0, 1000.0)


def estimate_cbar(
    l: int, T_grid: Sequence[float] = DEFAULT_CBAR_GRID, tol: float = 1e-8, *, backend: str = "real",
    cbar: Optional[float] = None,
) -> SelbergConstantEstimate:
    """value/T of the S_1 moment along an increasing grid; the last is adopted."""
    if int(l) != l or l < 1:
        raise DomainError(f"l must be a positive integer, got {l!r}")
    grid = [float(T) for T in T_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("T_grid must be nonempty and strictly increasing")
    rows = tuple((T, s1_moment_integral(int(l), T, tol, backend=backend, cbar=cbar).value / T) for T in grid)
    return SelbergConstantEstimate(int(l), rows)


# ----------------------------------------------------------------------------
# functionals


def _prod3_terms(x, l, sigma, tau, cfg, backend, cbar, tol):
    zs = zeta_two_sigma(sigma)
    X = x * tau / (ONE_MINUS_C * cbar * zs) ** (1 / 3)
    if backend == "synthetic":
        a = crit_integral(X, X, backend="synthetic").value
    else:
        a = crit_integral(X, phi1_inv(X, cfg), tol).value
    b = hl_sigma_integral(sigma, X, tol, backend=backend).value
    c = s1_moment_integral(l, X, tol, backend=backend, cbar=cbar).value
    return X, a, b, c


def prod3_inner(x, l, sigma, tau, cfg=DEFAULT_CONFIG, backend="real", *, cbar, tol=1e-8):
    """{crit * hl * s1}^{1/3} at the prod3 upper limit; tends to x tau."""
    _, a, b, c = _prod3_terms(x, l, sigma, tau, cfg, backend, cbar, tol)
    return (a * b * c) ** (1 / 3)


def functional_prod3(
    x: float,
    l: int = 1,
    sigma: float = 1.0,
    tau: float = 1e3,
    cfg: LadderConfig = DEFAULT_CONFIG,
    backend: str = "real",
    *,
    cbar: float,
    tol: float = 1e-8,
    epsilon: float = DEFAULT_EPSILON,
) -> FunctionalEstimate:
    """(1/tau) {crit(X, phi1_inv X) hl(sigma, X) s1(l, X)}^{1/3},
    X = x tau / ((1 - c) cbar zeta(2 sigma))^{1/3}."""
    _check(x, tau, backend)
    _check_sigma(sigma, epsilon)
    _check_cbar(cbar)
    inner = prod3_inner(x, l, sigma, tau, cfg, backend, cbar=cbar, tol=tol)
    params = {"l": l, "sigma": sigma, "cbar": cbar, "mode": cfg.mode, "backend": backend}
    return FunctionalEstimate("prod3", x, tau, inner / tau, params)


def functional_lin3(
    x: float,
    l: int = 1,
    sigma: float = 1.0,
    tau: float = 1e3,
    cfg: LadderConfig = DEFAULT_CONFIG,
    backend: str = "real",
    *,
    cbar: float,
    tol: float = 1e-8,
    epsilon: float = DEFAULT_EPSILON,
) -> FunctionalEstimate:
    """(1/tau) {crit/(1 - c) + hl/zeta(2 sigma) + s1/cbar} at X = x tau / 3."""
    _check(x, tau, backend)
    _check_sigma(sigma, epsilon)
    _check_cbar(cbar)
    X = x * tau / 3
    if backend == "synthetic":
        a = crit_integral(X, X, backend="synthetic").value
    else:
        a = crit_integral(X, phi1_inv(X, cfg), tol).value
    b = hl_sigma_integral(sigma, X, tol, backend=backend).value
    c = s1_moment_integral(l, X, tol, backend=backend, cbar=cbar).value
    total = math.fsum([a / ONE_MINUS_C, b / zeta_two_sigma(sigma), c / cbar])
    params = {"l": l, "sigma": sigma, "cbar": cbar, "mode": cfg.mode, "backend": backend}
    return FunctionalEstimate("lin3", x, tau, total / tau, params)


def dprod_inner(x: float, fam: SeriesFamily, tau: float, backend: str = "real", tol: float = 1e-3) -> float:
    X = x * tau / fam.big_f_product ** (1 / fam.M)
    return family_product_integral(fam, X, tol, backend=backend)


def functional_dprod(
    x: float, fam: SeriesFamily, tau: float, backend: str = "real", *, tol: float = 1e-3
) -> FunctionalEstimate:
    """(1/tau) prod_m (int_0^X |f_m|^2)^{1/M}, X = x tau / (prod F_m)^{1/M}."""
    _check(x, tau, backend)
    inner = dprod_inner(x, fam, tau, backend, tol)
    return FunctionalEstimate("dprod", x, tau, inner / tau, {"family": fam.label, "backend": backend})


def divisor_inner(x: float, tau: float, cfg: LadderConfig = DEFAULT_CONFIG, backend: str = "real") -> float:
    """Segment sum of d(n) over (X, phi1_inv X], X = x tau / (1 - c); tends to x tau."""
    if backend == "synthetic":
        return divisor_functional(x, tau, cfg, backend="synthetic").estimate * tau
    X = x * tau / ONE_MINUS_C
    return float(SegmentSum.of(X, phi1_inv(X, cfg)).value)


# ----------------------------------------------------------------------------
# Fermat scan


@dataclass(frozen=True)
class ScanBounds:
    x_max: int = 50
    y_max: int = 50
    z_max: int = 50
    n_min: int = 3
    n_max: int = 12

    def __post_init__(self) -> None:
        if min(self.x_max, self.y_max, self.z_max) < 1:
            raise DomainError("scan bounds must be positive")
        if not 3 <= self.n_min <= self.n_max:
            raise DomainError("need 3 <= n_min <= n_max")

    @property
    def size(self) -> int:
        return self.x_max * self.y_max * self.z_max * (self.n_max - self.n_min + 1)


@dataclass(frozen=True)
class ScanSettings:
    """Which functional a scan evaluates, and how."""

    kind: str = "prod3"
    tau: float = 1e3
    backend: str = "synthetic"
    l: int = 1
    sigma: float = 1.0
    cbar: Optional[float] = None
    family: Optional[SeriesFamily] = None
    cfg: LadderConfig = DEFAULT_CONFIG

    def __post_init__(self) -> None:
        if self.kind not in ("prod3", "lin3", "dprod", "divisor"):
            raise DomainError(f"unknown functional kind {self.kind!r}")
        if self.kind in ("prod3", "lin3"):
            _check_cbar(self.cbar)
        if self.kind == "dprod" and self.family is None:
            raise DomainError("dprod needs a series family")

    def evaluate(self, x: float) -> FunctionalEstimate:
        if self.kind == "prod3":
            return functional_prod3(x, self.l, self.sigma, self.tau, self.cfg, self.backend, cbar=self.cbar)
        if self.kind == "lin3":
            return functional_lin3(x, self.l, self.sigma, self.tau, self.cfg, self.backend, cbar=self.cbar)
        if self.kind == "dprod":
            return functional_dprod(x, self.family, self.tau, self.backend)
        return divisor_functional(x, self.tau, self.cfg, backend=self.backend)


@dataclass(frozen=True)
class ScanRow:
    x: int
    y: int
    z: int
    n: int
    exact: Fraction
    estimate: float

    @property
    def estimate_gap(self) -> float:
        return abs(self.estimate - 1.0)

    @property
    def exact_gap(self) -> Fraction:
        return abs(self.exact - 1)


@dataclass
class ScanSummary:
    tuples: int = 0
    equalities: int = 0
    max_estimate_error: float = 0.0  # relative to the exact value

    @property
    def ok(self) -> bool:
        return self.equalities == 0


def _scan_x(x: int, bounds: ScanBounds, settings: ScanSettings) -> list[ScanRow]:
    """All rows with first coordinate x, in (y, z, n) order."""
    ns = range(bounds.n_min, bounds.n_max + 1)
    rows = []
    for y in range(1, bounds.y_max + 1):
        for z in range(1, bounds.z_max + 1):
            for n in ns:
                fr = FermatRational(x, y, z, n)
                rows.append(ScanRow(x, y, z, n, fr.exact_value, settings.evaluate(fr.float_value).estimate))
    return rows


def fermat_scan(bounds: ScanBounds, settings: ScanSettings, *, workers: int = 1) -> Iterator[ScanRow]:
    """Every Fermat rational in the bounds with the functional evaluated at it.

    Rows come out in (x, y, z, n) order whatever the worker count.  A tuple
    with x^n + y^n = z^n raises ArithmeticError.
    """
    xs = range(1, bounds.x_max + 1)
    if workers <= 1:
        for x in xs:
            yield from _scan_x(x, bounds, settings)
        return
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        for rows in pool.map(_scan_x, xs, [bounds] * len(xs), [settings] * len(xs)):
            yield from rows


def summarize_scan(rows) -> tuple[list[ScanRow], ScanSummary]:
    out = []
    summary = ScanSummary()
    for row in rows:
        out.append(row)
        summary.tuples += 1
        summary.equalities += row.exact == 1
        exact = float(row.exact)
        summary.max_estimate_error = max(summary.max_estimate_error, abs(row.estimate - exact) / exact)
    return out, summary


# ----------------------------------------------------------------------------
# chain comparison


@dataclass(frozen=True)
class ChainComparison:
    x: float
    tau: float
    prod3: float
    dprod: float
    divisor: float

    @property
    def ratios(self) -> dict[str, float]:
        return {
            "prod3/dprod": self.prod3 / self.dprod,
            "prod3/divisor": self.prod3 / self.divisor,
            "dprod/divisor": self.dprod / self.divisor,
        }

    @property
    def worst(self) -> float:
        return max(abs(r - 1) for r in self.ratios.values())


def chain_compare(
    x: float,
    l: int,
    sigma: float,
    fam: SeriesFamily,
    tau: float,
    cfg: LadderConfig = DEFAULT_CONFIG,
    backend: str = "real",
    *,
    cbar: float,
    tol: float = 1e-8,
) -> ChainComparison:
    """The three inner quantities that all tend to x tau, and their ratios."""
    _check(x, tau, backend)
    _check_cbar(cbar)
    a = prod3_inner(x, l, sigma, tau, cfg, backend, cbar=cbar, tol=tol)
    b = dprod_inner(x, fam, tau, backend)
    c = divisor_inner(x, tau, cfg, backend)
    return ChainComparison(x, tau, a, b, c)
