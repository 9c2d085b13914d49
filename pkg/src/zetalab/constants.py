"""Numeric constants used throughout the package."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Constants:
    euler_c: float = 0.57721566490153286061
    one_minus_c: float = 1.0 - 0.57721566490153286061
    ln_two_pi: float = math.log(2.0 * math.pi)
    precision_target: float = 1e-10

    def __post_init__(self) -> None:
        if not 0.577215 < self.euler_c < 0.577216:
            raise ValueError("euler_c out of range")
        if self.one_minus_c != 1.0 - self.euler_c:
            raise ValueError("one_minus_c must equal 1 - euler_c")
        if not self.precision_target > 0:
            raise ValueError("precision_target must be positive")


CONSTANTS = Constants()

EULER_C = CONSTANTS.euler_c
ONE_MINUS_C = CONSTANTS.one_minus_c
LN_TWO_PI = CONSTANTS.ln_two_pi
PRECISION_TARGET = CONSTANTS.precision_target
