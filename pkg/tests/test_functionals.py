import math
from fractions import Fraction

import numpy as np
import pytest

from zetalab.dirichlet import catalog_spec, parse_family, SeriesFamily
from zetalab.divisors import divisor_functional
from zetalab.errors import DomainError
from zetalab.functionals import (
    FermatRational,
    ScanBounds,
    ScanSettings,
    SelbergConstantEstimate,
    chain_compare,
    divisor_inner,
    dprod_inner,
    estimate_cbar,
    fermat_scan,
    functional_dprod,
    functional_lin3,
    functional_prod3,
    prod3_inner,
    summarize_scan,
)
from zetalab.quadrature import s1_moment_integral
from zetalab.records import FunctionalEstimate

FAMILY = parse_family("unit:2,mobius:2")
CBAR = 0.75


# --- Fermat rationals --------------------------------------------------------


def test_fermat_examples(oracles):
    fr = FermatRational(3, 4, 5, 3)
    assert fr.exact_value == Fraction(91, 125) == Fraction(*oracles["fermat"]["3,4,5,3"])
    assert fr.float_value == 0.728
    for n in (3, 7, 12):
        assert FermatRational(1, 1, 1, n).exact_value == 2


def test_fermat_validation():
    for args in ((1, 1, 1, 2), (0, 1, 1, 3), (1, 1, 1.0, 3), (True, 1, 1, 3)):
        with pytest.raises(DomainError):
            FermatRational(*args)


def test_fermat_big_ints_are_exact():
    fr = FermatRational(49, 50, 50, 12)
    assert fr.exact_value == Fraction(49**12 + 50**12, 50**12)
    assert fr.exact_value != 1


# --- records -----------------------------------------------------------------


def test_estimate_record():
    est = FunctionalEstimate("prod3", 1.0, 10.0, 1.25, {"b": 1, "a": 2})
    assert est.deviation == 0.25
    assert list(est.as_row()) == ["kind", "x", "tau", "estimate", "deviation", "a", "b"]
    with pytest.raises(ValueError):
        FunctionalEstimate("other", 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        FunctionalEstimate("lin3", 1.0, 1.0, math.nan)


# --- synthetic algebra -------------------------------------------------------


def _synthetic_all(x, tau):
    return [
        functional_prod3(x, 1, 1.0, tau, backend="synthetic", cbar=CBAR),
        functional_lin3(x, 1, 1.0, tau, backend="synthetic", cbar=CBAR),
        functional_dprod(x, FAMILY, tau, "synthetic"),
        divisor_functional(x, tau, backend="synthetic"),
    ]


def test_synthetic_exact_for_random_x():
    rng = np.random.default_rng(11)
    for x in rng.uniform(1e-6, 10.0, 50):
        for est in _synthetic_all(float(x), 1e3):
            assert abs(est.estimate - x) <= 1e-12 * max(1.0, x), est.kind


def test_synthetic_any_tau():
    for tau in (1.0, 37.5, 1e6):
        for est in _synthetic_all(0.728, tau):
            assert abs(est.deviation) < 1e-12


def test_scaling_contract():
    # tau -> lam tau with x -> x / lam leaves each inner quantity unchanged
    for lam in (2.0, 10.0):
        a = prod3_inner(1.3, 1, 1.5, 400.0, backend="synthetic", cbar=CBAR)
        b = prod3_inner(1.3 / lam, 1, 1.5, 400.0 * lam, backend="synthetic", cbar=CBAR)
        assert b == pytest.approx(a, rel=1e-12)
        a = dprod_inner(1.3, FAMILY, 400.0, "synthetic")
        b = dprod_inner(1.3 / lam, FAMILY, 400.0 * lam, "synthetic")
        assert b == pytest.approx(a, rel=1e-12)
        assert divisor_inner(1.3 / lam, 400.0 * lam, backend="synthetic") == pytest.approx(
            divisor_inner(1.3, 400.0, backend="synthetic"), rel=1e-12
        )


def test_lin3_linearity():
    one = functional_lin3(0.4, tau=1e3, backend="synthetic", cbar=CBAR).estimate
    two = functional_lin3(0.8, tau=1e3, backend="synthetic", cbar=CBAR).estimate
    assert two == pytest.approx(2 * one, rel=1e-12)


def test_chain_synthetic():
    for x in (0.05, 1.0, 7.5):
        ch = chain_compare(x, 1, 1.0, FAMILY, 1e3, backend="synthetic", cbar=CBAR)
        assert ch.worst < 1e-12


def test_cbar_synthetic_round_trip(cbar1):
    est = estimate_cbar(1, (200.0, 400.0), backend="synthetic", cbar=cbar1)
    assert est.adopted == cbar1 and est.spread == 0.0
    assert s1_moment_integral(1, 900.0, backend="synthetic", cbar=est.adopted).value / 900.0 == cbar1


def test_validation():
    with pytest.raises(DomainError):
        functional_prod3(0.0, cbar=CBAR)
    with pytest.raises(DomainError):
        functional_prod3(1.0, sigma=0.52, cbar=CBAR)
    with pytest.raises(DomainError):
        functional_prod3(1.0, cbar=None)
    with pytest.raises(DomainError):
        functional_lin3(1.0, tau=-1.0, cbar=CBAR)
    with pytest.raises(DomainError):
        functional_dprod(1.0, FAMILY, 10.0, "fake")
    with pytest.raises(DomainError):
        estimate_cbar(0)
    with pytest.raises(DomainError):
        estimate_cbar(1, (1000.0, 500.0))
    with pytest.raises(ValueError):
        SelbergConstantEstimate(1, ())
    with pytest.raises(DomainError):
        ScanSettings(kind="dprod")
    with pytest.raises(DomainError):
        ScanBounds(n_min=2)


# --- scan --------------------------------------------------------------------


def test_small_scan_synthetic():
    bounds = ScanBounds(10, 10, 10, 3, 5)
    settings = ScanSettings("prod3", backend="synthetic", cbar=CBAR)
    rows, summary = summarize_scan(fermat_scan(bounds, settings))
    assert summary.tuples == bounds.size == len(rows)
    assert summary.ok and summary.equalities == 0
    assert summary.max_estimate_error < 1e-12
    row = next(r for r in rows if (r.x, r.y, r.z, r.n) == (3, 4, 5, 3))
    assert row.exact == Fraction(91, 125)
    assert [(r.x, r.y, r.z, r.n) for r in rows] == sorted((r.x, r.y, r.z, r.n) for r in rows)


def test_scan_worker_count_irrelevant():
    bounds = ScanBounds(4, 4, 4, 3, 4)
    settings = ScanSettings("dprod", backend="synthetic", family=FAMILY)
    assert list(fermat_scan(bounds, settings)) == list(fermat_scan(bounds, settings, workers=2))


# --- real backend spot checks ------------------------------------------------


def test_real_prod3(cbar1):
    one = functional_prod3(1.0, cbar=cbar1)
    assert abs(one.deviation) < 0.20
    fr = functional_prod3(0.728, cbar=cbar1)
    assert abs(fr.deviation) < 0.20 * 0.728
    assert fr.estimate < 1


def test_real_lin3(cbar1):
    assert abs(functional_lin3(1.0, cbar=cbar1).deviation) < 0.20


def test_real_dprod():
    unit_only = SeriesFamily((catalog_spec("unit"),))
    assert abs(functional_dprod(1.0, unit_only, 500.0).deviation) < 0.05
    mixed = functional_dprod(0.728, FAMILY, 500.0)
    assert mixed.estimate - 1 < 0


def test_real_chain(cbar1):
    ch = chain_compare(1.0, 1, 1.0, FAMILY, 1e3, cbar=cbar1)
    assert ch.worst < 0.25


@pytest.mark.slow
def test_real_chain_trend(cbar1):
    low = chain_compare(1.0, 1, 1.0, FAMILY, 1e3, cbar=cbar1)
    high = chain_compare(1.0, 1, 1.0, FAMILY, 1e4, cbar=cbar1)
    assert high.worst < low.worst
