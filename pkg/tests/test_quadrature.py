import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetalab.analytic import hardy_z
from zetalab.constants import ONE_MINUS_C
from zetalab.errors import DomainError, NonFiniteIntegrand, ToleranceNotMet
from zetalab.quadrature import (
    MomentIntegralResult,
    crit_integral,
    fixed_panel_rule,
    hl_sigma_integral,
    initial_panels,
    integrate_adaptive,
    s1_moment_integral,
    zeta_two_sigma,
)
from zetalab.store import CheckpointStore, use_store


def test_constant_and_polynomial():
    r = integrate_adaptive(lambda t: np.ones_like(t), 0.0, 10.0, 1e-12)
    assert r.value == 10.0
    r = integrate_adaptive(lambda t: t**2, 0.0, 1.0, 1e-12)
    assert abs(r.value - 1 / 3) < 1e-12
    assert r.abs_error_estimate <= 1e-12


def test_oscillatory_long_range():
    r = integrate_adaptive(np.cos, 0.0, 1000.0, 1e-10, max_width=1.0)
    assert abs(r.value - math.sin(1000.0)) < 1e-10


def test_breakpoints_respected():
    step = lambda t: np.where(t < 0.3, 0.0, 1.0)  # noqa: E731
    r = integrate_adaptive(step, 0.0, 1.0, 1e-12, breakpoints=[0.3], keep_edges=True)
    assert abs(r.value - 0.7) < 1e-12
    assert np.any(r.panel_edges == 0.3)


def test_panels_never_straddle_breakpoints():
    left, right = initial_panels(0.0, 5.0, [1.5, 2.25, 7.0], max_width=0.4)
    for bp in (1.5, 2.25):
        assert not np.any((left < bp) & (right > bp))
    assert left[0] == 0.0 and right[-1] == 5.0


def test_z_squared_to_first_zero(oracles):
    r = integrate_adaptive(lambda t: hardy_z(t) ** 2, 0.0, 14.134725141734693, 1e-11)
    assert abs(r.value - oracles["z2_to_first_zero"]) < 1e-9


def test_errors():
    with pytest.raises(DomainError):
        integrate_adaptive(np.sin, 1.0, 0.0, 1e-8)
    with pytest.raises(NonFiniteIntegrand):
        integrate_adaptive(lambda t: np.where(t > 0.7, np.inf, 1.0), 0.0, 1.0, 1e-8)
    with pytest.raises(ToleranceNotMet):
        integrate_adaptive(lambda t: 1 / np.sqrt(np.abs(t - 1 / 3)), 0.0, 1.0, 1e-14, max_panels=200)


def test_deterministic_bits():
    f = lambda t: np.exp(np.sin(3 * t)) * t  # noqa: E731
    a = integrate_adaptive(f, 0.0, 50.0, 1e-10)
    b = integrate_adaptive(f, 0.0, 50.0, 1e-10)
    assert a.value == b.value and a.abs_error_estimate == b.abs_error_estimate


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(0.0, 20.0), st.floats(0.0, 20.0))
def test_additivity(a, b, c):
    a, b, c = sorted((a, b, c))
    f = lambda t: np.cos(t) ** 2 + np.sqrt(t + 1)  # noqa: E731
    ab = integrate_adaptive(f, a, b, 1e-10)
    bc = integrate_adaptive(f, b, c, 1e-10)
    ac = integrate_adaptive(f, a, c, 1e-10)
    budget = ab.abs_error_estimate + bc.abs_error_estimate + ac.abs_error_estimate + 1e-13 * (1 + ac.value)
    assert abs(ab.value + bc.value - ac.value) <= budget


def test_fixed_panel_rule_reproduces_sum():
    r = integrate_adaptive(np.exp, 0.0, 2.0, 1e-12, keep_edges=True)
    x, w = fixed_panel_rule(r.panel_edges)
    assert abs(math.fsum(w * np.exp(x)) - r.value) < 1e-13


def test_result_validation():
    with pytest.raises(ValueError):
        MomentIntegralResult(1.0, 2.0, 1.0, 0.0, 1)
    with pytest.raises(ValueError):
        MomentIntegralResult(float("nan"), 0.0, 1.0, 0.0, 1)
    with pytest.raises(ValueError):
        MomentIntegralResult(1.0, 0.0, 1.0, -1.0, 1)
    with pytest.raises(ValueError):
        MomentIntegralResult(1.0, 0.0, 1.0, 0.1, 0, "synthetic")


# --- moment integrals -------------------------------------------------------


def test_hl_examples():
    assert hl_sigma_integral(1.0, 1.0).value == 0.0
    syn = hl_sigma_integral(1.0, 2000.0, backend="synthetic")
    assert syn.value == zeta_two_sigma(1.0) * 2000.0
    assert syn.abs_error_estimate == 0.0 and syn.backend == "synthetic"
    with pytest.raises(DomainError):
        hl_sigma_integral(0.52, 100.0)
    with pytest.raises(DomainError):
        hl_sigma_integral(1.0, 0.5)


def test_hl_ratio_at_2000():
    r = hl_sigma_integral(1.0, 2000.0)
    assert abs(r.value / 2000.0 - math.pi**2 / 6) / (math.pi**2 / 6) < 0.02


def test_crit_examples():
    assert crit_integral(50.0, 50.0).value == 0.0
    syn = crit_integral(1e4, 10494.4, backend="synthetic")
    assert syn.value == ONE_MINUS_C * 1e4
    with pytest.raises(DomainError):
        crit_integral(5.0, 4.0)


def test_crit_agrees_with_generic_rule():
    r = crit_integral(100.0, 130.0)
    ref = integrate_adaptive(lambda t: hardy_z(t) ** 2, 100.0, 130.0, 1e-9)
    assert abs(r.value - ref.value) <= r.abs_error_estimate + ref.abs_error_estimate


def test_s1_moment_examples(cbar1):
    assert s1_moment_integral(1, 1.0).value == 0.0
    syn = s1_moment_integral(2, 700.0, backend="synthetic", cbar=0.5)
    assert syn.value == 350.0
    with pytest.raises(DomainError):
        s1_moment_integral(1, 100.0, backend="synthetic")
    with pytest.raises(DomainError):
        s1_moment_integral(0, 100.0)
    a = s1_moment_integral(1, 500.0).value / 500.0
    b = s1_moment_integral(1, 1000.0).value / 1000.0
    assert abs(a - b) / b < 0.10
    assert b == cbar1


def test_monotone_in_upper_limit():
    for fn in (lambda T: hl_sigma_integral(1.5, T), lambda T: crit_integral(0.0, T), lambda T: s1_moment_integral(1, T)):
        values = [fn(T).value for T in (20.0, 40.0, 80.0)]
        assert values == sorted(values)


def test_higher_moment_runs():
    r = s1_moment_integral(2, 200.0)
    assert r.value > 0 and r.abs_error_estimate <= 1e-8 * 200


def test_store_round_trip(tmp_path):
    path = tmp_path / "store.tsv"
    with use_store(CheckpointStore(path)):
        cold = crit_integral(200.0, 230.0)
    with use_store(CheckpointStore(path)):
        warm = crit_integral(200.0, 230.0)
    assert cold.panels_used > 0 and warm.panels_used == 0
    assert warm.value == cold.value and warm.abs_error_estimate == cold.abs_error_estimate
