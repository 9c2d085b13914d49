import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetalab import divisors
from zetalab.constants import ONE_MINUS_C
from zetalab.divisors import SegmentSum, dirichlet_sum_D, divisor_d, divisor_functional
from zetalab.errors import DomainError
from zetalab.ladder import LadderConfig


def _d_table(n):
    d = np.zeros(n + 1, dtype=np.int64)
    for k in range(1, n + 1):
        d[k::k] += 1
    return d


def test_divisor_d_small():
    assert [divisor_d(n) for n in range(1, 13)] == [1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]
    assert divisor_d(5040) == 60
    for bad in (0, -3, 2.5):
        with pytest.raises(DomainError):
            divisor_d(bad)


def test_D_examples():
    assert dirichlet_sum_D(10) == 27
    assert dirichlet_sum_D(0) == 0
    assert dirichlet_sum_D(10.99) == 27
    with pytest.raises(DomainError):
        dirichlet_sum_D(-1)
    with pytest.raises(DomainError):
        dirichlet_sum_D(float("inf"))


def test_D_matches_brute_force_prefix():
    cum = np.cumsum(_d_table(20_000))
    for x in range(0, 20_001, 37):
        assert dirichlet_sum_D(x) == cum[x]
    assert dirichlet_sum_D(10**5) == int(np.sum(_d_table(10**5)))


def test_D_classical_main_term():
    # D(x) = x ln x + (2c - 1) x + O(sqrt x)
    c = 1 - ONE_MINUS_C
    for x in (1e4, 1e6, 1e8):
        main = x * math.log(x) + (2 * c - 1) * x
        assert abs(dirichlet_sum_D(x) - main) < 2 * math.sqrt(x)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 5000.0), st.floats(0.0, 500.0))
def test_segment_matches_brute_force(lower, width):
    seg = SegmentSum.of(lower, lower + width)
    lo, hi = math.floor(lower), math.floor(lower + width)
    assert seg.value == sum(divisor_d(n) for n in range(lo + 1, hi + 1))


def test_segment_domain():
    with pytest.raises(DomainError):
        SegmentSum.of(5.0, 4.0)
    with pytest.raises(DomainError):
        SegmentSum.of(-1.0, 4.0)
    with pytest.raises(ValueError):
        SegmentSum(1.0, 2.0, -1)


def test_synthetic_is_exact():
    rng = np.random.default_rng(3)
    for x in rng.uniform(0.01, 10.0, 20):
        est = divisor_functional(float(x), 1e3, backend="synthetic")
        assert abs(est.estimate - x) <= 1e-12 * x


def test_real_divisor_functional():
    est = divisor_functional(1.0, 1e4)
    assert abs(est.deviation) < 0.25
    quad = divisor_functional(1.0, 1e3, LadderConfig("quadrature"))
    assert abs(quad.deviation) < 0.4


def test_empty_segment_warns(monkeypatch):
    monkeypatch.setattr(divisors, "phi1_inv", lambda X, cfg: X + 1e-9)
    with pytest.warns(RuntimeWarning, match="no integer"):
        est = divisor_functional(0.5, 1.0)
    assert est.estimate == 0.0


def test_domain_errors():
    with pytest.raises(DomainError):
        divisor_functional(0.0, 10.0)
    with pytest.raises(DomainError):
        divisor_functional(1.0, 1e3, backend="fake")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        divisor_functional(1.0, 1e3)
