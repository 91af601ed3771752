"""Reference values frozen into the C++ tests.

Independent of the C++ solver: LSODA/DOP853 from scipy, Taylor series from
mpmath and closed forms from sympy.
"""
import math

import mpmath as mp
import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp


def lane_emden_first_zero(d):
    mp.mp.dps = 30
    r0 = mp.mpf("1e-4")
    u = 1 - r0**2 / (2 * d) + r0**4 / (8 * d * (d + 2))
    du = -r0 / d + r0**3 / (2 * d * (d + 2))
    f = mp.odefun(lambda r, y: [y[1], -y[0] ** 2 - (d - 1) / r * y[1]], r0, [u, du])
    return mp.findroot(lambda r: f(r)[0], 4.35)


def universal(r, y, d):
    u, du, V, dV = y
    return [du, (V - 1) * u - (d - 1) / r * du, dV, u * u - (d - 1) / r * dV]


def start(u0, d, r0):
    a = (0 - 1) * u0 / (2 * d)  # u = u0 + a r^2 + ...
    b = u0 * u0 / (2 * d)
    c = (b * u0 + (-1) * a) / (4 * (d + 2))  # r^4 coefficient of u
    e = (2 * u0 * a) / (4 * (d + 2))  # r^4 coefficient of V
    return [u0 + a * r0**2 + c * r0**4, 2 * a * r0 + 4 * c * r0**3, b * r0**2 + e * r0**4,
            2 * b * r0 + 4 * e * r0**3]


def verdict(u0, d, r_max=200.0):
    zero = lambda r, y, d: y[0]
    zero.terminal, zero.direction = True, -1
    turn = lambda r, y, d: y[1]
    turn.terminal, turn.direction = True, 1
    r0 = 1e-3
    sol = solve_ivp(universal, (r0, r_max), start(u0, d, r0), args=(d,), method="DOP853",
                    rtol=1e-13, atol=1e-15, events=(zero, turn))
    if sol.t_events[0].size:
        return -1
    if sol.t_events[1].size:
        return 1
    return 0


def ground_state(d):
    lo, hi = 1.0, 2.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        v = verdict(mid, d)
        if v < 0:
            lo = mid
        elif v > 0:
            hi = mid
        else:
            break
    return 0.5 * (lo + hi)


def functionals_d3(u0, gamma=1.0):
    d = 3
    r0 = 1e-3
    sol = solve_ivp(universal, (r0, 14.0), start(u0, d, r0), args=(d,), method="DOP853",
                    rtol=1e-13, atol=1e-15, dense_output=True)
    r = np.linspace(r0, 14.0, 200001)
    u, du, V, dV = sol.sol(r)
    v_inf = V[-1] + r[-1] * dV[-1]
    w = 4 * math.pi
    n = w * np.trapezoid(u * u * r * r, r)
    e = 0.5 * w * np.trapezoid(du * du * r * r, r) - 0.25 * gamma * w * np.trapezoid((V - v_inf) * u * u * r * r, r)
    return n, e, v_inf


def d6_closed_forms():
    r, g = sp.symbols("r gamma", positive=True)
    u = (1 + r**2 / 24) ** -2
    w = sp.pi**3
    n = sp.simplify(w * sp.integrate(u**2 * r**5, (r, 0, sp.oo)))
    kin = sp.integrate(sp.diff(u, r) ** 2 * r**5, (r, 0, sp.oo))
    pot = sp.integrate(-u * u**2 * r**5, (r, 0, sp.oo))
    e = sp.simplify(w / 2 * kin - g * w / 4 * pot)
    return n, e


if __name__ == "__main__":
    print("lane-emden d=3 first zero", mp.nstr(lane_emden_first_zero(3), 16))
    for d in (2, 3):
        print(f"ground state d={d}", repr(ground_state(d)))
    u3 = ground_state(3)
    print("d=3 N, E(gamma=1), V_inf", functionals_d3(u3))
    n6, e6 = d6_closed_forms()
    print("d=6 exact N", n6, float(n6))
    print("d=6 exact E", e6, sp.N(e6.subs("gamma", 1)))
