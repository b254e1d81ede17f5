"""Time the compiled and pure-Python hot loops side by side.

    python3 benchmarks/bench_kernels.py [--points 4096] [--steps 4096] [--repeat 3]

Prints one line per (kernel, backend) with the best wall time and the
maximum difference from the fallback result.
"""
import argparse
import time

import numpy as np

from caustica import _core
from caustica.slit import SlitSetup, initial_state


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--points", type=int, default=4096)
    ap.add_argument("--steps", type=int, default=4096)
    ap.add_argument("--rk4-steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    mods = _core.backends()
    print(f"active backend: {_core.BACKEND}; available: {', '.join(mods)}")

    n = args.rk4_steps
    h = 10.0 / n
    t = np.linspace(0, 10, n + 1)
    lam = 1 + 0.5 * np.cos(t)
    mu = 0.2 * np.sin(t)
    mid = 1 + 0.5 * np.cos(t[:-1] + h / 2)
    rk_args = (lam[:-1], mid, lam[1:], mu[:-1], 0.2 * np.sin(t[:-1] + h / 2), mu[1:], h,
               np.array([0.0, 1.0, 1.0, 0.0, 0.0, 0.0]))

    x = np.linspace(-20, 20, args.points)
    psi = initial_state(SlitSetup(1.0, 0.7, 3.0))(x)
    dt = 3.0 / args.steps
    tm = dt * (np.arange(args.steps) + 0.5)
    cases = {
        "cn const": (np.ones(args.steps), np.zeros(args.steps)),
        "cn varying": (1 + 0.3 * np.sin(tm), 0.1 * np.cos(tm)),
    }

    ref_rk = mods["python"].rk4_linear(*rk_args)
    for name, mod in mods.items():
        sec, out = best_of(lambda: mod.rk4_linear(*rk_args), args.repeat)
        print(f"rk4 {n} steps      {name:7s} {sec:8.4f} s  max diff {np.max(np.abs(out - ref_rk)):.1e}")
    for label, (lm, mm) in cases.items():
        ref = mods["python"].cn_propagate(psi, x, lm, mm, dt, 1.0, x[1] - x[0])
        for name, mod in mods.items():
            sec, out = best_of(lambda: mod.cn_propagate(psi, x, lm, mm, dt, 1.0, x[1] - x[0]), args.repeat)
            print(f"{label:11s} {args.points}x{args.steps} {name:7s} {sec:8.4f} s  "
                  f"max diff {np.max(np.abs(out - ref)):.1e}")


if __name__ == "__main__":
    main()
