"""Grid Schrodinger propagation used as ground truth.

i hbar dpsi/dt = [-(hbar^2/2) d2/dx2 + lam(t) x^2/2 + mu(t) x] psi on a
uniform grid with Dirichlet walls, Crank-Nicolson in time with the
potential at the step midpoint.  Second order in both h and dt; exactly
unitary up to the tridiagonal solve.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable

import numpy as np

from . import _core
from .timefun import CoefficientProfile, Constant

DEFAULT_POINTS = 4096
DEFAULT_STEPS = 4096
# outermost fraction of nodes that must stay (numerically) empty
EDGE_FRACTION = 0.05
EDGE_TOL = 1e-6


class BoundaryLeakError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridState:
    x: np.ndarray
    psi: np.ndarray
    t: float = 0.0

    @classmethod
    def from_function(cls, func: Callable, x_min: float, x_max: float, n_points: int = DEFAULT_POINTS,
                      t: float = 0.0) -> "GridState":
        x = np.linspace(x_min, x_max, n_points)
        return cls(x, np.asarray(func(x), dtype=complex), t)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def x_min(self) -> float:
        return float(self.x[0])

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    @property
    def n_points(self) -> int:
        return self.x.size

    def edge_ratio(self) -> float:
        amp = np.abs(self.psi)
        peak = amp.max()
        if peak == 0:
            return 0.0
        w = max(1, int(math.ceil(EDGE_FRACTION * amp.size)))
        return float(max(amp[:w].max(), amp[-w:].max()) / peak)

    def contained(self) -> bool:
        return self.edge_ratio() <= EDGE_TOL


def default_box(centers: Iterable[float], sigma_max: float, margin: float = 12.0) -> tuple[float, float]:
    """Box spanning every expected center with ``margin`` widths either side."""
    cs = list(centers)
    return min(cs) - margin * sigma_max, max(cs) + margin * sigma_max


def propagate(state: GridState, lam: CoefficientProfile, mu: CoefficientProfile | None,
              t0: float, t1: float, n_steps: int = DEFAULT_STEPS, hbar: float = 1.0,
              check_every: int = 64) -> GridState:
    """Advance ``state`` from t0 to t1 with ``n_steps`` Crank-Nicolson steps.

    Raises
    ------
    BoundaryLeakError
        If amplitude reaches the outer 5% of the box (checked initially and
        every ``check_every`` steps).
    """
    if n_steps < 16:
        raise ValueError("n_steps must be >= 16")
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    mu = Constant(0.0) if mu is None else mu
    if not state.contained():
        raise BoundaryLeakError(f"initial state touches the box edge (ratio {state.edge_ratio():.2e})")
    dt = (t1 - t0) / n_steps
    tmid = t0 + dt * (np.arange(n_steps) + 0.5)
    lam_mid = np.ascontiguousarray(lam.eval(tmid), dtype=float)
    mu_mid = np.ascontiguousarray(mu.eval(tmid), dtype=float)
    x = np.ascontiguousarray(state.x, dtype=float)
    psi = state.psi
    for start in range(0, n_steps, check_every):
        stop = min(start + check_every, n_steps)
        psi = _core.cn_propagate(psi, x, lam_mid[start:stop], mu_mid[start:stop], dt, hbar, state.dx)
        cur = GridState(state.x, psi, t0 + stop * dt)
        if not np.all(np.isfinite(psi)):
            raise RuntimeError(f"linear solve produced non-finite values near t = {cur.t:.6g}")
        if not cur.contained():
            raise BoundaryLeakError(
                f"wave function reached the box edge at t = {cur.t:.6g} (ratio {cur.edge_ratio():.2e})")
    return replace(state, psi=psi, t=float(t1))


@dataclass(frozen=True)
class Moments:
    norm: float
    center: float
    variance: float
    mean_momentum: float


def moments(state: GridState, hbar: float = 1.0) -> Moments:
    """Trapezoidal moments of |psi|^2 and <-i hbar d/dx> by central differences.

    ``norm`` is the integral of |psi|^2 (the squared L2 norm).
    """
    x, psi, h = state.x, state.psi, state.dx
    rho = np.abs(psi) ** 2
    norm = np.trapezoid(rho, x)
    center = np.trapezoid(x * rho, x) / norm
    var = np.trapezoid((x - center) ** 2 * rho, x) / norm
    dpsi = np.zeros_like(psi)
    dpsi[1:-1] = (psi[2:] - psi[:-2]) / (2 * h)
    mom = (np.sum(np.conj(psi) * (-1j * hbar) * dpsi) * h).real / norm
    return Moments(float(norm), float(center), float(var), float(mom))


def l2_norm(x: np.ndarray, f: np.ndarray) -> float:
    return float(math.sqrt(np.trapezoid(np.abs(f) ** 2, x)))


def unitarity_check(lam: CoefficientProfile, mu: CoefficientProfile | None, T: float,
                    centers: Iterable[float] = (-1.0, 0.0, 1.0), width: float = 0.5,
                    x_min: float = -12.0, x_max: float = 12.0, n_points: int = DEFAULT_POINTS,
                    n_steps: int = DEFAULT_STEPS, hbar: float = 1.0) -> float:
    """Max |<U g_c, U g_a> - <g_c, g_a>| over a basis of narrow Gaussians.

    The initial overlaps are the Gaussian-smeared delta(a - c); a unitary
    propagator must reproduce them.
    """
    cs = list(centers)
    x = np.linspace(x_min, x_max, n_points)
    states = []
    for c in cs:
        g = (2 * math.pi * width**2) ** -0.25 * np.exp(-(x - c) ** 2 / (4 * width**2))
        states.append(GridState(x, g.astype(complex)))
    before = np.array([[np.trapezoid(np.conj(s.psi) * r.psi, x) for r in states] for s in states])
    after_states = [propagate(s, lam, mu, 0.0, T, n_steps, hbar) for s in states]
    after = np.array([[np.trapezoid(np.conj(s.psi) * r.psi, x) for r in after_states] for s in after_states])
    return float(np.max(np.abs(after - before)))


def write_density_csv(path, states: Iterable[GridState]) -> None:
    """Dump |psi(x)|^2 snapshots as long-format CSV (t, x, density)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "density"])
        for st in states:
            for xi, d in zip(st.x, np.abs(st.psi) ** 2):
                w.writerow([f"{st.t:.16e}", f"{xi:.16e}", f"{d:.16e}"])


def envelope_box(centers: np.ndarray, sigmas: np.ndarray, margin: float = 12.0) -> tuple[float, float]:
    """Box covering ``center(t) +- margin sigma(t)`` along a whole run."""
    c, s = np.asarray(centers), np.asarray(sigmas)
    return float(np.min(c - margin * s)), float(np.max(c + margin * s))
