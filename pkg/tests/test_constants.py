import dataclasses
import math

import pytest

from zetalab.constants import CONSTANTS, EULER_C, LN_TWO_PI, ONE_MINUS_C, Constants


def test_pinned_against_oracle(oracles):
    c = oracles["constants"]
    assert abs(EULER_C - c["euler"]) <= 1e-14
    assert abs(LN_TWO_PI - c["ln_two_pi"]) <= 1e-14
    assert abs(ONE_MINUS_C - c["one_minus_euler"]) <= 1e-14


def test_one_minus_c_is_stored_arithmetic():
    assert CONSTANTS.one_minus_c == 1 - CONSTANTS.euler_c
    assert 0.577215 < CONSTANTS.euler_c < 0.577216


def test_frozen():
    with pytest.raises(dataclasses.FrozenInstanceError):
        CONSTANTS.euler_c = 0.5


def test_validation():
    with pytest.raises(ValueError):
        Constants(euler_c=0.6)
    with pytest.raises(ValueError):
        Constants(precision_target=-1.0)
    assert math.isclose(Constants().ln_two_pi, math.log(2 * math.pi))
