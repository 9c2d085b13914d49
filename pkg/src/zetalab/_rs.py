"""Correction-term polynomials for the Riemann-Siegel formula.

The terms C_0..C_4 are combinations of derivatives of

    Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p),

written in the variable z = 1 - 2p, where Psi becomes the entire function
-cos(pi z^2 / 2 - 5 pi / 8) / cos(pi z).  Its Taylor series is generated once
in extended precision and every C_k is stored as a float polynomial in z.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P

_DEGREE = 90


def _psi_series(degree: int) -> list:
    with mpmath.workdps(60):
        pi = mpmath.pi
        b = 5 * pi / 8
        cb, sb = mpmath.cos(b), mpmath.sin(b)
        num = [mpmath.mpf(0)] * (degree + 1)
        # cos(a - b) with a = pi z^2 / 2
        k = 0
        while 2 * k <= degree:
            # a^k / k! contributes to z^{2k}
            term = (pi / 2) ** k / mpmath.factorial(k)
            r = k % 4
            if r == 0:
                num[2 * k] += cb * term
            elif r == 1:
                num[2 * k] += sb * term
            elif r == 2:
                num[2 * k] -= cb * term
            else:
                num[2 * k] -= sb * term
            k += 1
        den = [mpmath.mpf(0)] * (degree + 1)
        for j in range(0, degree + 1, 2):
            den[j] = (-1) ** (j // 2) * pi**j / mpmath.factorial(j)
        q = [mpmath.mpf(0)] * (degree + 1)
        for n in range(degree + 1):
            # den * q = -num
            acc = -num[n] - sum(den[n - i] * q[i] for i in range(n))
            q[n] = acc / den[0]
        return q


@lru_cache(maxsize=1)
def correction_polynomials() -> tuple[np.ndarray, ...]:
    """Return float coefficient arrays (increasing powers of z) for C_0..C_4."""
    psi = np.array([float(c) for c in _psi_series(_DEGREE)])

    def d(j: int) -> np.ndarray:
        # derivative with respect to p; dz/dp = -2
        return P.polyder(psi, j) * (-2.0) ** j if j else psi

    pi2 = np.pi**2
    c0 = psi
    c1 = -d(3) / (96 * pi2)
    c2 = P.polyadd(d(2) / (64 * pi2), d(6) / (18432 * pi2**2))
    c3 = P.polyadd(
        P.polyadd(-d(1) / (64 * pi2), -d(5) / (3840 * pi2**2)),
        -d(9) / (5308416 * pi2**3),
    )
    c4 = P.polyadd(
        P.polyadd(psi / (128 * pi2), 19 * d(4) / (24576 * pi2**2)),
        P.polyadd(11 * d(8) / (5898240 * pi2**3), d(12) / (2038431744 * pi2**4)),
    )
    return tuple(np.trim_zeros(c, "b") for c in (c0, c1, c2, c3, c4))
