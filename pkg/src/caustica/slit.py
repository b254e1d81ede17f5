"""Gaussian slit experiment: post-slit state, closed-form evolution,
optimal slit width and momentum susceptibility.

The post-slit state is a Gaussian of width ``sigma0`` centred at ``a``
carrying the chirp of free flight from the origin over a time ``tau``::

    psi(x, 0) = (2 pi sigma0^2)^(-1/4) exp(-(x - a)^2 / 4 sigma0^2 + i x^2 / 2 hbar tau)

with mean momentum p = a / tau.  ``tau`` may be infinite (p = 0) or
negative (a converging chirp).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import ActionQuadraticForm, FundamentalPair
from .kernel import CriticalKernel, RegularKernel, apply_critical_gaussian, apply_regular_gaussian

# |magnification| below this counts as the focused "p = -2aA" branch
EPS_FOCUS = 1e-9


class CriticalFormError(ValueError):
    pass


@dataclass(frozen=True)
class SlitSetup:
    """Slit parameters.  ``p`` defaults to a / tau.

    With ``decoupled=True`` the mean momentum ``p`` is set independently of
    the chirp by a linear phase kick (p - a/tau) x / hbar.
    """

    a: float
    sigma0: float
    tau: float = math.inf
    hbar: float = 1.0
    p: float | None = None
    decoupled: bool = False

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        if self.tau == 0 or math.isnan(self.tau):
            raise ValueError("tau must be nonzero")
        coupled = self.a * self.chirp
        if self.p is None:
            object.__setattr__(self, "p", coupled)
        elif not self.decoupled and not math.isclose(self.p, coupled, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError(f"p = {self.p} differs from a/tau = {coupled}; pass decoupled=True")

    @classmethod
    def from_momentum(cls, a: float, sigma0: float, p: float, hbar: float = 1.0) -> "SlitSetup":
        """Coupled setup with tau = a/p (infinite when p = 0)."""
        if p == 0:
            return cls(a, sigma0, math.inf, hbar)
        if a == 0:
            raise ValueError("a = 0 cannot carry p != 0 through the chirp; use decoupled=True")
        return cls(a, sigma0, a / p, hbar, p)

    @property
    def chirp(self) -> float:
        """1/tau, the initial momentum per unit position."""
        return 0.0 if math.isinf(self.tau) else 1.0 / self.tau

    @property
    def kick(self) -> float:
        return self.p - self.a * self.chirp


@dataclass(frozen=True)
class GaussianState:
    """psi(x) = norm (2 pi variance)^(-1/4) exp(-(x - center)^2 / 4 variance
    + i (quad_phase x^2 + lin_phase x + glob_phase))."""

    center: float
    variance: float
    quad_phase: float
    lin_phase: float
    glob_phase: float
    norm: float
    hbar: float = 1.0

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    @property
    def mean_momentum(self) -> float:
        return self.hbar * (2 * self.quad_phase * self.center + self.lin_phase)

    def coefficients(self) -> tuple[complex, complex, complex]:
        v, c = self.variance, self.center
        return (complex(-1 / (4 * v), self.quad_phase),
                complex(c / (2 * v), self.lin_phase),
                complex(-c * c / (4 * v) + math.log(self.norm) - 0.25 * math.log(2 * math.pi * v),
                        self.glob_phase))

    @classmethod
    def from_coefficients(cls, coeffs, hbar: float = 1.0) -> "GaussianState":
        c2, c1, c0 = (complex(c) for c in coeffs)
        if c2.real >= 0:
            raise ValueError("not a normalizable Gaussian")
        v = -1 / (4 * c2.real)
        c = 2 * v * c1.real
        lognorm = c0.real + c * c / (4 * v) + 0.25 * math.log(2 * math.pi * v)
        glob = math.remainder(c0.imag, 2 * math.pi)
        return cls(c, v, c2.imag, c1.imag, glob, math.exp(lognorm), hbar)

    def __call__(self, x):
        c2, c1, c0 = self.coefficients()
        x = np.asarray(x, float)
        return np.exp(c2 * x * x + c1 * x + c0)


def initial_state(setup: SlitSetup) -> GaussianState:
    return GaussianState(setup.a, setup.sigma0**2, setup.chirp / (2 * setup.hbar),
                         setup.kick / setup.hbar, 0.0, 1.0, setup.hbar)


def _regular(form, morse_index, hbar) -> RegularKernel:
    if isinstance(form, RegularKernel):
        return form
    if not form.B or not math.isfinite(form.B):
        raise CriticalFormError("critical form; use kernel.apply_critical_kernel")
    return RegularKernel(form, morse_index, hbar)


def evolve(setup: SlitSetup, form: ActionQuadraticForm | RegularKernel, morse_index: int = 0) -> GaussianState:
    """State at time T by the closed-form Gaussian integral over the regular kernel."""
    kern = _regular(form, morse_index, setup.hbar)
    if kern.hbar != setup.hbar:
        raise ValueError("kernel and setup disagree on hbar")
    out = apply_regular_gaussian(kern, initial_state(setup).coefficients())
    return GaussianState.from_coefficients(out, setup.hbar)


def evolve_critical(setup: SlitSetup, kern: CriticalKernel) -> GaussianState:
    """State at time T on a caustic (pushforward by the critical kernel)."""
    out = apply_critical_gaussian(kern, initial_state(setup).coefficients())
    return GaussianState.from_coefficients(out, setup.hbar)


def magnification(setup: SlitSetup, form: ActionQuadraticForm) -> float:
    """Classical width magnification d x_cl(T)/d x(0) along the chirped family.

    Equals x_cl(T)/a for mu = 0 and coupled p = a/tau; written without a
    division by ``a`` so the a = 0 slit is covered.
    """
    return -(2 * form.A + setup.chirp) / form.B


def classical_center(setup: SlitSetup, form: ActionQuadraticForm) -> float:
    """x_cl(T) = -(2 a A + p + D) / B."""
    return -(2 * setup.a * form.A + setup.p + form.D) / form.B


def sigma_formula(setup: SlitSetup, form: ActionQuadraticForm) -> float:
    """sigma(T) = sigma0 {M^2 + (hbar / 2 sigma0^2 B)^2}^(1/2)."""
    m = magnification(setup, form)
    q = setup.hbar / (2 * setup.sigma0**2 * form.B)
    return setup.sigma0 * math.hypot(m, q)


def harmonic_sigma(omega: float, T: float, a: float, p: float, sigma0: float, hbar: float = 1.0) -> float:
    """Width for lam = omega^2, mu = 0, coupled p (requires a != 0)."""
    wt = omega * T
    cl = math.cos(wt) + p / (a * omega) * math.sin(wt)
    qu = hbar * math.sin(wt) / (2 * sigma0**2 * omega)
    return sigma0 * math.hypot(cl, qu)


@dataclass(frozen=True)
class OptimalSlit:
    sigma0_star: float
    sigma_min: float
    sigma_check: float
    infinite_concentration: bool = False


def optimal_slit(a: float, form: ActionQuadraticForm, tau: float = math.inf, hbar: float = 1.0,
                 morse_index: int = 0, p: float | None = None) -> OptimalSlit:
    """Slit width minimizing sigma(T) and the minimum itself.

    sigma_min = |hbar M / B|^(1/2) at sigma0* = |hbar / (2 B M)|^(1/2), with
    M the magnification.  When M vanishes (p = -2aA) the concentration is
    unbounded and the result carries ``infinite_concentration=True`` with
    NaN numbers.  ``p`` overrides ``tau`` through tau = a/p.
    """
    probe = SlitSetup.from_momentum(a, 1.0, p, hbar) if p is not None else SlitSetup(a, 1.0, tau, hbar)
    if not form.B or not math.isfinite(form.B):
        raise CriticalFormError("critical form; concentration is purely classical")
    m = magnification(probe, form)
    if abs(m) <= EPS_FOCUS:
        return OptimalSlit(math.nan, math.nan, math.nan, True)
    sigma_min = math.sqrt(abs(hbar * m / form.B))
    star = math.sqrt(abs(hbar / (2 * form.B * m)))
    check = evolve(SlitSetup(a, star, probe.tau, hbar, probe.p), form, morse_index).sigma
    return OptimalSlit(star, sigma_min, check)


@dataclass(frozen=True)
class Susceptibility:
    value: float
    signed: float
    jacobi: float
    finite_difference: float
    purely_quantum: bool = False


def susceptibility(setup: SlitSetup, form: ActionQuadraticForm, delta: float | None = None,
                   morse_index: int = 0) -> Susceptibility:
    """S(p, T) = (a / sigma0) d sigma / d p in closed form, plus its check.

    ``value`` is |J| {1 + (hbar / 2 sigma0^2 B M)^2}^(-1/2) >= 0 and
    ``signed`` carries the sign of the derivative (that of J M).  The
    finite difference differentiates the evolved width with p entering
    through the chirp tau = a/p, step ``delta`` (default
    1e-5 max(1, |p|)).
    """
    if setup.a == 0:
        raise ValueError("susceptibility is defined for a != 0")
    if not form.B or not math.isfinite(form.B):
        raise CriticalFormError("critical form")
    j = form.jacobi
    m = magnification(setup, form)
    delta = 1e-5 * max(1.0, abs(setup.p)) if delta is None else delta

    def width(p):
        return evolve(SlitSetup.from_momentum(setup.a, setup.sigma0, p, setup.hbar), form, morse_index).sigma

    fd = setup.a / setup.sigma0 * (width(setup.p + delta) - width(setup.p - delta)) / (2 * delta)
    if abs(m) <= EPS_FOCUS:
        return Susceptibility(0.0, 0.0, j, fd, True)
    q = setup.hbar / (2 * setup.sigma0**2 * form.B * m)
    value = abs(j) / math.sqrt(1 + q * q)
    return Susceptibility(value, math.copysign(value, j * m), j, fd)


def envelope(pair: FundamentalPair, setup: SlitSetup) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact center and width of the packet at every solver sample time.

    Uses the fundamental pair directly, so it stays valid through caustics:
    center = a v + p u + s and sigma^2 = sigma0^2 (v + u/tau)^2 + (hbar u / 2 sigma0)^2.
    """
    u, v, s = pair.u.y, pair.v.y, pair.s.y
    center = setup.a * v + setup.p * u + s
    sigma = np.hypot(setup.sigma0 * (v + setup.chirp * u), setup.hbar * u / (2 * setup.sigma0))
    return pair.u.t, center, sigma
