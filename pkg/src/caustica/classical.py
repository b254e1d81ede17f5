"""Classical solutions, Jacobi fields, caustics and the boundary-value action.

All solutions live on one uniform grid produced by fixed-step RK4, so
every downstream quantity (zeros, quadratures, kernels) shares samples.
Mass is 1; the Lagrangian is ``xdot**2/2 - lam(t) x**2/2 - mu(t) x``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import _core
from .timefun import CoefficientProfile, Constant

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 2048
EPS_CAUSTIC = 1e-8
TOL_WRONSKIAN = 1e-9


class IntegrationError(RuntimeError):
    def __init__(self, msg: str, time: float | None = None):
        self.time = time
        super().__init__(msg if time is None else f"{msg} at t = {time:.17g}")


class InvalidInputError(ValueError):
    pass


class CriticalPotentialError(ValueError):
    """The potential is critical; the regular quadratic form does not exist."""


class AccuracyWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SampledFunction:
    """Samples ``y(t)`` with derivatives; evaluates by cubic Hermite interpolation."""

    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    _spline: CubicHermiteSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicHermiteSpline(self.t, self.y, self.dy))

    def __call__(self, t):
        return self._spline(t)

    def derivative(self, t):
        return self._spline(t, 1)

    @property
    def final(self) -> float:
        return float(self.y[-1])

    @property
    def final_rate(self) -> float:
        return float(self.dy[-1])


@dataclass(frozen=True)
class FundamentalPair:
    """Homogeneous solutions u, v and the special solution s on a shared grid.

    u(0)=0, u'(0)=1;  v(0)=1, v'(0)=0;  s(0)=s'(0)=0 with s'' + lam s = -mu.
    """

    u: SampledFunction
    v: SampledFunction
    s: SampledFunction
    lam: CoefficientProfile
    mu: CoefficientProfile
    T: float
    wronskian_drift: float
    error_estimate: float | None = None

    @property
    def sample_times(self) -> np.ndarray:
        return self.u.t

    @property
    def n_steps(self) -> int:
        return self.u.t.size - 1

    def wronskian(self) -> np.ndarray:
        return self.u.y * self.v.dy - self.u.dy * self.v.y


@dataclass(frozen=True)
class ClassicalTrajectory:
    a: float
    p: float
    x: SampledFunction
    action: float


@dataclass(frozen=True)
class CausticReport:
    critical: bool
    u_T: float
    caustic_residual: float
    morse_index: int
    zero_times: tuple[float, ...]
    k: float | None = None
    focal_intercept: float | None = None

    def to_dict(self) -> dict:
        return {
            "critical": self.critical,
            "u_T": self.u_T,
            "caustic_residual": self.caustic_residual,
            "morse_index": self.morse_index,
            "zero_times": list(self.zero_times),
            "k": self.k,
            "focal_intercept": self.focal_intercept,
        }


@dataclass(frozen=True)
class ActionQuadraticForm:
    """I(y, T; x, 0) = A x^2 + B x y + C y^2 + D x + E y + F.

    ``x`` is the initial and ``y`` the final position.
    """

    A: float
    B: float
    C: float
    D: float = 0.0
    E: float = 0.0
    F: float = 0.0

    def action(self, x, y):
        return (self.A * x * x + self.B * x * y + self.C * y * y
                + self.D * x + self.E * y + self.F)

    @property
    def jacobi(self) -> float:
        """J(T) = -1/B, the final Jacobi field value."""
        return -1.0 / self.B

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in "ABCDEF"}


def _stage_samples(profile: CoefficientProfile, t: np.ndarray, h: float):
    return (profile.eval(t[:-1], "right"),
            profile.eval(t[:-1] + 0.5 * h),
            profile.eval(t[1:], "left"))


def _integrate(lam, mu, T, n):
    t = np.linspace(0.0, T, n + 1)
    h = T / n
    ls, lm, le = _stage_samples(lam, t, h)
    ms, mm, me = _stage_samples(mu, t, h)
    if not all(np.all(np.isfinite(a)) for a in (ls, lm, le, ms, mm, me)):
        raise InvalidInputError("coefficient profile is not finite on [0, T]")
    y = _core.rk4_linear(ls, lm, le, ms, mm, me, h, np.array([0.0, 1.0, 1.0, 0.0, 0.0, 0.0]))
    bad = ~np.all(np.isfinite(y), axis=1)
    if np.any(bad):
        raise IntegrationError("non-finite solution (step underflow/overflow)",
                               float(t[np.argmax(bad)]))
    return t, y


def solve_fundamental(lam: CoefficientProfile, mu: CoefficientProfile | None = None,
                      T: float | None = None, n_steps: int = DEFAULT_STEPS,
                      check_convergence: bool = True,
                      tol_wronskian: float = TOL_WRONSKIAN) -> FundamentalPair:
    """Integrate u, v, s on a uniform grid of ``n_steps`` RK4 steps.

    With ``check_convergence`` the solve is repeated with half the step
    and the Richardson estimate ``max|y_h - y_h/2| / 15`` is stored in
    ``error_estimate``.  A Wronskian drift above ``tol_wronskian`` issues
    an :class:`AccuracyWarning`.
    """
    if mu is None:
        mu = Constant(0.0)
    if T is None:
        T = lam.horizon
    T = float(T)
    if not (math.isfinite(T) and T > 0):
        raise InvalidInputError(f"horizon T must be positive and finite, got {T}")
    if n_steps < 16 or n_steps % 2:
        raise InvalidInputError("n_steps must be even and >= 16")
    for name, prof in (("lambda", lam), ("mu", mu)):
        if not prof.covers(T):
            raise InvalidInputError(f"{name} profile horizon {prof.horizon} < T = {T}")

    t, y = _integrate(lam, mu, T, n_steps)
    err = None
    if check_convergence:
        _, y2 = _integrate(lam, mu, T, 2 * n_steps)
        err = float(np.max(np.abs(y - y2[::2]))) / 15.0

    u = SampledFunction(t, y[:, 0], y[:, 1])
    v = SampledFunction(t, y[:, 2], y[:, 3])
    s = SampledFunction(t, y[:, 4], y[:, 5])
    drift = float(np.max(np.abs(u.y * v.dy - u.dy * v.y + 1.0)))
    if drift > tol_wronskian:
        warnings.warn(f"Wronskian drift {drift:.3e} exceeds {tol_wronskian:.1e}; "
                      "increase n_steps", AccuracyWarning, stacklevel=2)
    return FundamentalPair(u, v, s, lam, mu, T, drift, err)


def lagrangian_action(t: np.ndarray, x: np.ndarray, dx: np.ndarray,
                      lam: CoefficientProfile, mu: CoefficientProfile) -> float:
    """Composite Simpson quadrature of L along samples on a uniform even grid.

    Panel ends use one-sided coefficient limits so that breakpoints on
    even nodes do not degrade the rule.
    """
    n = t.size - 1
    if n % 2:
        raise InvalidInputError("Simpson quadrature needs an even number of steps")
    h = (t[-1] - t[0]) / n

    def lag(idx, side):
        tt = t[idx]
        return 0.5 * dx[idx] ** 2 - 0.5 * lam.eval(tt, side) * x[idx] ** 2 - mu.eval(tt, side) * x[idx]

    start = np.arange(0, n, 2)
    total = lag(start, "right") + 4.0 * lag(start + 1, "left") + lag(start + 2, "left")
    return float(h / 3.0 * np.sum(total))


def solve_trajectory(pair: FundamentalPair, a: float, p: float) -> ClassicalTrajectory:
    """x(t) = a v(t) + p u(t) + s(t) with its action by Simpson quadrature."""
    x = a * pair.v.y + p * pair.u.y + pair.s.y
    dx = a * pair.v.dy + p * pair.u.dy + pair.s.dy
    traj = SampledFunction(pair.u.t, x, dx)
    return ClassicalTrajectory(float(a), float(p), traj,
                               lagrangian_action(pair.u.t, x, dx, pair.lam, pair.mu))


def boundary_term_action(pair: FundamentalPair, traj: ClassicalTrajectory) -> float:
    """Cross-check form  I = (x xdot)|_0^T / 2 - (1/2) int mu x dt."""
    t = pair.u.t
    x, dx = traj.x.y, traj.x.dy
    n = t.size - 1
    h = pair.T / n
    start = np.arange(0, n, 2)
    mx = lambda idx, side: pair.mu.eval(t[idx], side) * x[idx]  # noqa: E731
    integral = h / 3.0 * np.sum(mx(start, "right") + 4 * mx(start + 1, "left") + mx(start + 2, "left"))
    return float(0.5 * (x[-1] * dx[-1] - x[0] * dx[0]) - 0.5 * integral)


def jacobi_field(pair: FundamentalPair) -> SampledFunction:
    """Normalized Jacobi field u (J(0) = 0, J'(0) = 1)."""
    return pair.u


def stretching_factor(pair: FundamentalPair, c: float = 0.0) -> float:
    """k = w(T)/w(0) for the homogeneous solution w = v + c u.

    Independent of ``c`` exactly when the potential is critical.
    """
    return float((pair.v.final + c * pair.u.final) / (pair.v.y[0] + c * pair.u.y[0]))


def _bisect(f, lo: float, hi: float, tol: float) -> float:
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def caustic_report(pair: FundamentalPair, eps_caustic: float = EPS_CAUSTIC,
                   tol_zero: float | None = None) -> CausticReport:
    """Criticality, stretching factor, focal intercept and Morse index.

    Zeros of u on (0, T] are bracketed by sign changes between samples and
    refined by bisection of the Hermite interpolant to ``tol_zero``
    (default ``1e-10 T``).  When the potential is critical, T itself is
    counted as a zero.
    """
    if eps_caustic <= 0:
        raise InvalidInputError("eps_caustic must be positive")
    T = pair.T
    tol = 1e-10 * T if tol_zero is None else tol_zero
    u = pair.u
    umax = float(np.max(np.abs(u.y)))
    if not umax > 0 or not math.isfinite(umax):
        raise InvalidInputError("degenerate fundamental pair: u vanishes identically")
    residual = abs(u.final) / umax
    critical = residual <= eps_caustic

    y, t = u.y, u.t
    n = t.size - 1
    zeros: list[float] = []
    last = n - 1 if critical else n
    for i in range(1, last):
        if y[i] == 0.0:
            zeros.append(float(t[i]))
        elif y[i] * y[i + 1] < 0:
            zeros.append(_bisect(u, float(t[i]), float(t[i + 1]), tol))
    if critical:
        zeros = [z for z in zeros if T - z > tol]
        zeros.append(T)
    elif y[n] == 0.0:  # pragma: no cover - excluded by residual > eps
        zeros.append(T)

    dmax = float(np.max(np.abs(u.dy)))
    for z in zeros:
        if abs(float(u.derivative(z))) < 1e-8 * dmax:
            raise InvalidInputError(f"tangential zero of the Jacobi field near t = {z:.6g}")

    k = float(pair.v.final) if critical else None
    s_T = float(pair.s.final) if critical else None
    return CausticReport(critical, float(u.final), residual, len(zeros), tuple(zeros), k, s_T)


def boundary_value_trajectory(pair: FundamentalPair, x: float, y: float) -> ClassicalTrajectory:
    """The unique path from x at t=0 to y at t=T (non-critical potentials)."""
    uT = pair.u.final
    return solve_trajectory(pair, x, (y - x * pair.v.final - pair.s.final) / uT)


_PROBES = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


def action_coefficients(pair: FundamentalPair, eps_caustic: float = EPS_CAUSTIC) -> ActionQuadraticForm:
    """Quadratic form of the boundary-value action.

    A, B, C come from the endpoint values of u, v; D, E, F are read off by
    least squares from the quadrature action at six (x, y) probes.
    """
    umax = float(np.max(np.abs(pair.u.y)))
    uT = pair.u.final
    if abs(uT) <= eps_caustic * umax:
        raise CriticalPotentialError(
            f"|u(T)| = {abs(uT):.3e} below caustic threshold; use the critical kernel")
    A = pair.v.final / (2.0 * uT)
    B = -1.0 / uT
    C = pair.u.final_rate / (2.0 * uT)
    rows, rhs = [], []
    for yv, xv in _PROBES:
        act = boundary_value_trajectory(pair, xv, yv).action
        rows.append((xv, yv, 1.0))
        rhs.append(act - (A * xv * xv + B * xv * yv + C * yv * yv))
    (D, E, F), *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    # pure-quadratic case: exact zeros rather than quadrature noise
    if isinstance(pair.mu, Constant) and pair.mu.value == 0.0:
        D = E = F = 0.0
    return ActionQuadraticForm(float(A), float(B), float(C), float(D), float(E), float(F))
