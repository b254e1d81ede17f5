"""Regenerate ``frozen.json``: reference values from independent routes.

Nothing here touches the closed-form code paths of the package.  Classical
quantities come from scipy's adaptive ``solve_ivp``/``quad``/``dblquad``;
wave-packet quantities come from a fine Crank-Nicolson run (8192 nodes,
8192 steps) on a hand-built initial state.  Run from the repo root::

    python3 tests/oracles/freeze.py
"""
import json
import math
from pathlib import Path

import numpy as np
from scipy.integrate import dblquad, quad, solve_ivp
from scipy.optimize import minimize_scalar

from caustica.oracle import GridState, moments, propagate
from caustica.timefun import Constant

OUT = Path(__file__).with_name("frozen.json")
TIGHT = dict(method="DOP853", rtol=1e-13, atol=1e-14)


def ivp(lam, force, T, y0):
    """x'' = -lam(t) x + force(t)."""
    sol = solve_ivp(lambda t, y: [y[1], -lam(t) * y[0] + force(t)], (0, T), y0, dense_output=True, **TIGHT)
    return sol


def bv_action(lam, force, T, x, y):
    """Action of the path from x to y by shooting and adaptive quadrature."""
    def end(p):
        return ivp(lam, force, T, [x, p]).y[0, -1] - y
    # linear in p: two shots give the exact slope
    e0, e1 = end(0.0), end(1.0)
    p = -e0 / (e1 - e0)
    sol = ivp(lam, force, T, [x, p])

    def lag(t):
        q, dq = sol.sol(t)
        return 0.5 * dq * dq - 0.5 * lam(t) * q * q + force(t) * q

    return quad(lag, 0, T, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


def packet(a, s0, tau, hbar, lo, hi, n):
    chirp = 0.0 if math.isinf(tau) else 1 / tau

    def psi(x):
        return (2 * math.pi * s0**2) ** -0.25 * np.exp(-(x - a) ** 2 / (4 * s0**2) + 1j * chirp * x * x / (2 * hbar))

    return GridState.from_function(psi, lo, hi, n)


def cn_moments(lam, T, a, s0, tau=math.inf, hbar=1.0, box=(-14.0, 14.0)):
    st = packet(a, s0, tau, hbar, *box, 8192)
    out = propagate(st, Constant(lam), Constant(0.0), 0.0, T, n_steps=8192, hbar=hbar)
    m = moments(out, hbar)
    return {"center": m.center, "variance": m.variance, "norm": m.norm}


def ho_sigma(omega, T, a, p, s0, hbar=1.0):
    # harmonic width law written out directly
    wt = omega * T
    return s0 * math.hypot(math.cos(wt) + p / (a * omega) * math.sin(wt), hbar * math.sin(wt) / (2 * s0**2 * omega))


def main():
    one = lambda t: 1.0  # noqa: E731
    zero = lambda t: 0.0  # noqa: E731
    data = {}
    # constant force f = 1 on the unit oscillator, special solution at T = pi/2
    data["s_T_forced_quarter"] = float(ivp(one, one, math.pi / 2, [0.0, 0.0]).y[0, -1])
    # boundary-value actions (mu = 0, and constant force f = 0.5)
    data["action_ho_quarter_x0.3_y-0.7"] = bv_action(one, zero, math.pi / 4, 0.3, -0.7)
    data["action_forced_x0.3_y-0.7"] = bv_action(one, lambda t: 0.5, math.pi / 4, 0.3, -0.7)
    data["action_forced_x0_y0"] = bv_action(one, lambda t: 0.5, math.pi / 4, 0.0, 0.0)
    # sin drive on the caustic omega T = pi from a = 0: double-integral action form
    inner = dblquad(lambda tp, t: math.cos(t) * math.sin(tp) * math.sin(t) * math.sin(tp),
                    0, math.pi, 0, lambda t: t, epsabs=1e-13, epsrel=1e-13)[0]
    data["action_sin_drive_caustic"] = -inner
    data["s_T_sin_drive_caustic"] = quad(lambda t: math.sin(math.pi - t) * math.sin(t), 0, math.pi)[0]
    # wave packet references by fine Crank-Nicolson
    data["cn_free_T1"] = cn_moments(0.0, 1.0, 0.0, 1.0)
    data["cn_ho_pi_from_a1"] = cn_moments(1.0, math.pi, 1.0, 0.7)
    data["cn_ho_half_pi_slit"] = cn_moments(1.0, math.pi / 2, 1.0, 1.0)
    data["cn_ho_quarter_chirped"] = cn_moments(1.0, math.pi / 4, 1.0, 0.8, tau=2.0)
    # slit optimum by golden section on the written-out width law
    res = minimize_scalar(lambda s: ho_sigma(1.0, math.pi / 4, 1.0, 0.0, s), bracket=(0.2, 0.7, 2.0),
                          method="golden", tol=1e-12)
    data["golden_ho_quarter"] = {"sigma0_star": res.x, "sigma_min": res.fun}
    # susceptibility by central difference of the width law (p through tau = a/p)
    d = 1e-5
    data["fd_susceptibility_ho_quarter"] = (ho_sigma(1.0, math.pi / 4, 1.0, d, 1.0)
                                            - ho_sigma(1.0, math.pi / 4, 1.0, -d, 1.0)) / (2 * d)
    OUT.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(json.dumps(data, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
