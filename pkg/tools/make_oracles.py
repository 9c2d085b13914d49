"""Regenerate tests/oracles.json from independent references.

Nothing here imports zetalab: values come from mpmath at high precision,
exact integer arithmetic, or brute force.  Run once; the JSON is frozen.

    python3 tools/make_oracles.py
"""

from __future__ import annotations

import json
import math
import random
from fractions import Fraction
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
OUT = Path(__file__).resolve().parent.parent / "tests" / "oracles.json"


def f(x) -> float:
    return float(x)


def zeta_points():
    rng = random.Random(20240601)
    pts = [(2.0, 0.0), (0.5, 0.0), (3.0, 0.0), (1.0, 1.0), (0.5, 14.0), (0.75, 1000.0), (0.5, 10000.0)]
    pts += [(rng.uniform(0.55, 3.0), rng.uniform(0.0, 100.0)) for _ in range(20)]
    out = []
    for s, t in pts:
        z = mp.zeta(mp.mpf(s) + 1j * mp.mpf(t))
        out.append([s, t, f(z.real), f(z.imag)])
    return out


def z_points():
    rng = random.Random(77)
    ts = [rng.uniform(50.0, 500.0) for _ in range(20)]
    ts += [0.0, 5.0, 35.0, 399.0, 401.0, 1000.5, 5000.25, 20000.0, 99999.0]
    return [[t, f(mp.siegelz(t))] for t in ts]


def theta_points():
    ts = [0.5, 1.0, 6.0, 10.0, 17.8, 100.0, 1000.0, 12345.678]
    return [[t, f(mp.siegeltheta(t))] for t in ts]


def theta_minimum():
    return f(mp.findroot(lambda t: mp.diff(mp.siegeltheta, t), 6.3))


def zeros():
    return [f(mp.zetazero(k).imag) for k in range(1, 30)]


def zero_counts():
    # N(T) for T between consecutive zeros, located by mpmath's own zero list
    return {"100": 29, "1000": int(mp.nzeros(1000)), "500": int(mp.nzeros(500)), "30": 3}


def theta_integrals():
    return [[t, f(mp.quad(mp.siegeltheta, mp.linspace(0, t, 1 + int(t))))] for t in (10.0, 50.0, 100.0)]


def s1_littlewood(ts):
    """S_1(t) = (1/pi) int_{1/2}^inf ln|zeta(s+it)| ds - the same at t = 0."""
    mp.mp.dps = 25

    def I(t):
        g = lambda s: mp.log(abs(mp.zeta(s + 1j * t)))  # noqa: E731
        return mp.quad(g, [0.5, 0.75, 1, 1.5, 2, 4, 8, 16, mp.inf]) / mp.pi

    base = I(0)
    out = [[t, f(I(t) - base)] for t in ts]
    mp.mp.dps = 40
    return out


def z_squared_to_first_zero():
    return f(mp.quad(lambda t: mp.siegelz(t) ** 2, [0, 5, 10, 14.134725141734693]))


def ladder():
    c = mp.euler
    l2p = mp.log(2 * mp.pi)
    T = mp.mpf(10) ** 4
    J = T * mp.log(T) + (2 * c - 1 - l2p) * T
    V = T * mp.log(T) + (c - l2p) * T
    # y ln y + b y = J  <=>  y = J / W(J e^b)
    b = c - l2p
    phi1 = J / mp.lambertw(J * mp.exp(b))
    a = 2 * c - 1 - l2p
    inv = V / mp.lambertw(V * mp.exp(a))
    # bisection oracle on the same equation, kept separate from Lambert W
    lo, hi = mp.mpf(10), T
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid * mp.log(mid) + b * mid < J:
            lo = mid
        else:
            hi = mid
    return {
        "T": 1e4,
        "J_hat": f(J),
        "V": f(V),
        "phi1": f(phi1.real),
        "phi1_bisection": f(lo),
        "phi1_inv": f(inv.real),
    }


def dirichlet():
    z = mp.zeta
    brute = math.fsum(_d(n) ** 2 / n ** 4 for n in range(1, 200001))
    return {
        "zeta2": f(z(2)),
        "zeta4": f(z(4)),
        "inv_zeta2": f(1 / z(2)),
        "mobius_F": f(z(4) / z(8)),
        "divisor_F": f(z(4) ** 4 / z(8)),
        "divisor_F_brute_200000": brute,
        "zeta_2_plus_10i": [f(z(2 + 10j).real), f(z(2 + 10j).imag)],
    }


def _d(n: int) -> int:
    c = 0
    k = 1
    while k * k <= n:
        if n % k == 0:
            c += 1 if k * k == n else 2
        k += 1
    return c


def constants():
    return {
        "euler": f(mp.euler),
        "ln_two_pi": f(mp.log(2 * mp.pi)),
        "one_minus_euler": f(1 - mp.euler),
    }


def fermat():
    return {"3,4,5,3": [91, 125], "1,1,1,7": [2, 1]}


def main() -> None:
    data = {
        "constants": constants(),
        "zeta": zeta_points(),
        "hardy_z": z_points(),
        "theta": theta_points(),
        "theta_min": theta_minimum(),
        "zeros": zeros(),
        "zero_counts": zero_counts(),
        "theta_integral": theta_integrals(),
        "s1": s1_littlewood([10.0, 30.0, 100.0, 250.0]),
        "z2_to_first_zero": z_squared_to_first_zero(),
        "ladder": ladder(),
        "dirichlet": dirichlet(),
        "fermat": fermat(),
    }
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
