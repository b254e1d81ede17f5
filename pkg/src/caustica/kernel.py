"""Semiclassical transition kernels for quadratic Lagrangians.

Regular branch (u(T) != 0)::

    K(b, a) = sqrt(|B| / 2 pi hbar) exp(-i pi/4) exp(i I(b, a)/hbar - i pi m/2)

Critical branch (u(T) = 0)::

    K(b, a) = sqrt(|k|) delta(b - k a - s(T)) exp(i I(a)/hbar - i pi m/2)

The delta function is never discretized; the critical kernel is only
applied as a pushforward of wave functions.  Gaussians (``exp`` of a
complex quadratic, given as coefficients ``(c2, c1, c0)``) are mapped to
Gaussians in closed form by both branches.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .classical import (
    EPS_CAUSTIC,
    DEFAULT_STEPS,
    ActionQuadraticForm,
    CausticReport,
    FundamentalPair,
    action_coefficients,
    caustic_report,
    solve_fundamental,
    solve_trajectory,
)
from .timefun import CoefficientProfile

# principal branch of (1/i)^(1/2); see RegularKernel
PREFACTOR_PHASE = -math.pi / 4

GaussCoeffs = tuple  # (c2, c1, c0): psi(x) = exp(c2 x^2 + c1 x + c0)


class NotCriticalError(ValueError):
    pass


class CausticWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RegularKernel:
    """Kernel for a non-critical potential.

    The constant prefactor phase is exp(-i pi/4), the value carried by the
    free-particle kernel (2 pi i hbar T)^(-1/2).
    """

    form: ActionQuadraticForm
    morse_index: int
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.form.B != 0 and math.isfinite(self.form.B)):
            raise ValueError("regular kernel requires finite B != 0")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    def __call__(self, a, b):
        return regular_kernel(self.form, self.morse_index, self.hbar, a, b)

    @property
    def amplitude(self) -> float:
        return math.sqrt(abs(self.form.B) / (2 * math.pi * self.hbar))


@dataclass(frozen=True)
class CriticalKernel:
    """Kernel on a caustic; ``action_coeffs`` = (I2, I1, I0) of I(a) at p = 0."""

    k: float
    s_T: float
    morse_index: int
    hbar: float
    action_coeffs: tuple[float, float, float]

    def action_at(self, a):
        i2, i1, i0 = self.action_coeffs
        return i2 * a * a + i1 * a + i0

    def focal_point(self, a):
        return self.k * a + self.s_T

    @property
    def amplitude(self) -> float:
        return math.sqrt(abs(self.k))

    def phase(self, a):
        """Total phase I(a)/hbar - pi m/2 multiplying the delta function."""
        return self.action_at(a) / self.hbar - 0.5 * math.pi * self.morse_index


Kernel = Union[RegularKernel, CriticalKernel]


def regular_kernel(form: ActionQuadraticForm, m: int, hbar: float, a, b):
    """Evaluate the regular-branch kernel K(b, T; a, 0); vectorized in a, b."""
    if not form.B:
        raise ValueError("critical form: B unavailable, use the critical kernel")
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    amp = math.sqrt(abs(form.B) / (2 * math.pi * hbar))
    phase = form.action(np.asarray(a, float), np.asarray(b, float)) / hbar \
        + PREFACTOR_PHASE - 0.5 * math.pi * m
    return amp * np.exp(1j * phase)


def critical_kernel(report: CausticReport, pair: FundamentalPair, m: int | None = None,
                    hbar: float = 1.0) -> CriticalKernel:
    """Critical kernel from a caustic report.

    I(a) is the quadrature action of the path from (a, p=0); it is exactly
    quadratic in a, so three evaluations fix it.
    """
    if not report.critical:
        raise NotCriticalError("potential is not critical at T")
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    m = report.morse_index if m is None else m
    im, i0, ip = (solve_trajectory(pair, a, 0.0).action for a in (-1.0, 0.0, 1.0))
    coeffs = (0.5 * (ip + im) - i0, 0.5 * (ip - im), i0)
    return CriticalKernel(float(report.k), float(report.focal_intercept), int(m), float(hbar),
                          tuple(float(c) for c in coeffs))


def build_kernel(lam: CoefficientProfile, mu: CoefficientProfile | None, T: float,
                 hbar: float = 1.0, n_steps: int = DEFAULT_STEPS,
                 eps_caustic: float = EPS_CAUSTIC) -> Kernel:
    """Solve the classical problem and return the matching kernel branch."""
    pair = solve_fundamental(lam, mu, T, n_steps=n_steps)
    rep = caustic_report(pair, eps_caustic)
    if rep.critical:
        return critical_kernel(rep, pair, hbar=hbar)
    return RegularKernel(action_coefficients(pair, eps_caustic), rep.morse_index, hbar)


def apply_regular_gaussian(kern: RegularKernel, coeffs: GaussCoeffs) -> GaussCoeffs:
    """Closed-form integral of K(y, x) exp(c2 x^2 + c1 x + c0) over x."""
    c2, c1, c0 = (complex(c) for c in coeffs)
    f, hb = kern.form, kern.hbar
    alpha = -(c2 + 1j * f.A / hb)
    if alpha.real <= 0:
        raise ValueError("input is not a normalizable Gaussian (Re c2 >= 0)")
    beta0 = c1 + 1j * f.D / hb
    beta1 = 1j * f.B / hb
    n2 = 1j * f.C / hb + beta1 * beta1 / (4 * alpha)
    n1 = 1j * f.E / hb + beta0 * beta1 / (2 * alpha)
    n0 = (c0 + 1j * f.F / hb + beta0 * beta0 / (4 * alpha)
          + math.log(kern.amplitude) + 1j * (PREFACTOR_PHASE - 0.5 * math.pi * kern.morse_index)
          + 0.5 * cmath.log(math.pi / alpha))
    return n2, n1, n0


def apply_critical_gaussian(kern: CriticalKernel, coeffs: GaussCoeffs) -> GaussCoeffs:
    """Pushforward of a Gaussian: |k|^(-1/2) e^{i I(a*)/hbar - i pi m/2} psi(a*)."""
    c2, c1, c0 = (complex(c) for c in coeffs)
    k, s, hb = kern.k, kern.s_T, kern.hbar
    i2, i1, i0 = kern.action_coeffs
    # exponent as a polynomial in a*, then substitute a* = (b - s)/k
    p2 = c2 + 1j * i2 / hb
    p1 = c1 + 1j * i1 / hb
    p0 = c0 + 1j * i0 / hb - 0.5j * math.pi * kern.morse_index - 0.5 * math.log(abs(k))
    return (p2 / k**2,
            p1 / k - 2 * p2 * s / k**2,
            p0 + p2 * s * s / k**2 - p1 * s / k)


def apply_critical_kernel(kern: CriticalKernel, psi, b):
    """Apply the critical kernel to a wave function, evaluated at points ``b``.

    ``psi`` is either a vectorized callable of position or a pair
    ``(a_grid, values)`` which is linearly interpolated (zero outside).
    """
    if kern.k == 0:
        raise ValueError("stretching factor must be nonzero")
    b = np.asarray(b, float)
    astar = (b - kern.s_T) / kern.k
    if callable(psi):
        vals = np.asarray(psi(astar), complex)
    else:
        grid, samples = psi
        samples = np.asarray(samples, complex)
        vals = (np.interp(astar, grid, samples.real, left=0.0, right=0.0)
                + 1j * np.interp(astar, grid, samples.imag, left=0.0, right=0.0))
    return vals * np.exp(1j * kern.phase(astar)) / math.sqrt(abs(kern.k))


def forced_ho_reference(omega: float, f: CoefficientProfile | Callable, T: float, a: float,
                        n_quad: int = 20001) -> tuple[float, float]:
    """Reference s(T) and caustic action for lam = omega^2, mu = -f.

    Both are evaluated by Simpson quadrature of the closed integral forms
    on ``n_quad`` points.  The action form holds only on caustics
    (omega T = n pi); elsewhere a :class:`CausticWarning` is issued.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    ratio = omega * T / math.pi
    if abs(ratio - round(ratio)) > 1e-6 or round(ratio) == 0:
        warnings.warn(f"omega T / pi = {ratio:.9g} is not a caustic; action formula does not apply",
                      CausticWarning, stacklevel=2)
    if n_quad % 2 == 0:
        n_quad += 1
    t = np.linspace(0.0, T, n_quad)
    ft = f.eval(t) if isinstance(f, CoefficientProfile) else np.asarray(f(t), float)
    s_T = simpson(np.sin(omega * (T - t)) * ft, x=t) / omega
    inner = cumulative_simpson(np.sin(omega * t) * ft, x=t, initial=0.0)
    action = a * simpson(np.cos(omega * t) * ft, x=t) \
        - simpson(np.cos(omega * t) * ft * inner, x=t) / omega
    return float(s_T), float(action)


def _gauss_eval(coeffs, x):
    c2, c1, c0 = coeffs
    return np.exp(c2 * x * x + c1 * x + c0)


def unitarity_deviation(kern: RegularKernel, centers, sigma_s: float,
                        a_grid: np.ndarray | None = None,
                        b_grid: np.ndarray | None = None) -> float:
    """Max deviation of the smeared kernel product from the smeared identity.

    Forms phi_c(b) = int da K(b, a) g_c(a) by trapezoidal quadrature of the
    pointwise kernel, then O_cd = int db conj(phi_c) phi_d, and compares to
    int g_c g_d = exp(-(c - d)^2 / 8 sigma_s^2).  g_c are normalized
    Gaussians of standard deviation ``sigma_s``.
    """
    centers = np.asarray(centers, float)
    gauss = [(-1 / (4 * sigma_s**2), c / (2 * sigma_s**2),
              -c * c / (4 * sigma_s**2) - 0.25 * math.log(2 * math.pi * sigma_s**2)) for c in centers]
    f, hb = kern.form, kern.hbar
    if b_grid is None or a_grid is None:
        out = [apply_regular_gaussian(kern, g) for g in gauss]
        widths = [math.sqrt(-1 / (4 * o[0].real)) for o in out]
        mids = [-o[1].real / (2 * o[0].real) for o in out]
        blo = min(m - 10 * w for m, w in zip(mids, widths))
        bhi = max(m + 10 * w for m, w in zip(mids, widths))
        alo, ahi = centers.min() - 10 * sigma_s, centers.max() + 10 * sigma_s
        amax, bmax = max(abs(alo), abs(ahi)), max(abs(blo), abs(bhi))
        rate_a = (2 * abs(f.A) * amax + abs(f.B) * bmax + abs(f.D)) / hb
        rate_b = max(abs((2 * o[0] * x + o[1]).imag) for o in out for x in (blo, bhi))
        da = min(sigma_s / 4, math.pi / (4 * rate_a))
        db = min(min(widths) / 4, math.pi / (4 * max(rate_b, 1e-300)))
        if a_grid is None:
            a_grid = np.linspace(alo, ahi, int(math.ceil((ahi - alo) / da)) + 1)
        if b_grid is None:
            b_grid = np.linspace(blo, bhi, int(math.ceil((bhi - blo) / db)) + 1)
    wa = np.gradient(a_grid) if a_grid.size > 2 else np.full(a_grid.size, a_grid[-1] - a_grid[0])
    wa[0] *= 0.5
    wa[-1] *= 0.5
    wb = np.gradient(b_grid)
    wb[0] *= 0.5
    wb[-1] *= 0.5
    kmat = regular_kernel(f, kern.morse_index, hb, a_grid[None, :], b_grid[:, None])
    g = np.stack([_gauss_eval(gc, a_grid) for gc in gauss], axis=1).real
    phi = kmat @ (g * wa[:, None])
    overlap = phi.conj().T @ (phi * wb[:, None])
    expected = np.exp(-(centers[:, None] - centers[None, :]) ** 2 / (8 * sigma_s**2))
    return float(np.max(np.abs(overlap - expected)))
