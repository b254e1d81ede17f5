import cmath
import math

import numpy as np
import pytest

from caustica.classical import action_coefficients, caustic_report, solve_fundamental
from caustica.kernel import (
    CausticWarning,
    CriticalKernel,
    NotCriticalError,
    RegularKernel,
    apply_critical_gaussian,
    apply_critical_kernel,
    apply_regular_gaussian,
    build_kernel,
    critical_kernel,
    forced_ho_reference,
    regular_kernel,
    unitarity_deviation,
)
from caustica.oracle import GridState, envelope_box, propagate
from caustica.slit import SlitSetup, envelope, evolve, initial_state
from caustica.timefun import Constant

PI = math.pi


def _form(lam, T, mu=None):
    return action_coefficients(solve_fundamental(Constant(lam), mu, T))


def test_free_kernel_at_origin():
    k = regular_kernel(_form(0.0, 1.0), 0, 1.0, 0.0, 0.0)
    assert k == pytest.approx((2 * PI) ** -0.5 * cmath.exp(-0.25j * PI), abs=1e-14)


def test_free_kernel_closed_form():
    T, hbar = 1.7, 0.6
    a, b = np.meshgrid(np.linspace(-2, 2, 7), np.linspace(-3, 1, 5))
    want = (2j * PI * hbar * T) ** -0.5 * np.exp(1j * (b - a) ** 2 / (2 * hbar * T))
    got = regular_kernel(_form(0.0, T), 0, hbar, a, b)
    assert np.allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("wt", [PI / 3, 2.0, 4 * PI / 3, 5.5])
def test_harmonic_kernel_matches_mehler(wt):
    omega, hbar = 1.4, 0.8
    T = wt / omega
    pair = solve_fundamental(Constant(omega**2), None, T)
    m = caustic_report(pair).morse_index
    sn, cs = math.sin(wt), math.cos(wt)
    a, b = 0.7, -1.3
    amp = math.sqrt(omega / (2 * PI * hbar * abs(sn)))
    phase = omega * ((a * a + b * b) * cs - 2 * a * b) / (2 * hbar * sn)
    want = amp * cmath.exp(1j * (phase - PI / 4 - PI / 2 * m))
    assert regular_kernel(action_coefficients(pair), m, hbar, a, b) == pytest.approx(want, abs=1e-9)


def test_quarter_period_value():
    k = complex(regular_kernel(_form(1.0, PI / 2), 0, 1.0, 1.0, 0.0))
    assert abs(k) == pytest.approx((2 * PI) ** -0.5, rel=1e-12)
    assert cmath.phase(k) == pytest.approx(-PI / 4, abs=1e-10)


def test_critical_kernel_reflection():
    pair = solve_fundamental(Constant(1.0), None, PI)
    kern = critical_kernel(caustic_report(pair), pair)
    assert kern.k == pytest.approx(-1.0, abs=1e-10)
    assert kern.morse_index == 1
    assert kern.amplitude == pytest.approx(1.0)
    for a in (-1.0, 0.3, 2.0):
        assert kern.focal_point(a) == pytest.approx(-a, abs=1e-10)
        assert kern.action_at(a) == pytest.approx(0.0, abs=1e-9)
        assert kern.phase(a) == pytest.approx(-PI / 2, abs=1e-9)


@pytest.mark.parametrize("n", [1, 2])
def test_critical_kernel_constant_force(n):
    omega, f = 1.0, 0.8
    T = n * PI / omega
    kern = build_kernel(Constant(omega**2), Constant(-f), T)
    assert isinstance(kern, CriticalKernel)
    a = 0.6
    assert kern.focal_point(a) == pytest.approx((-1) ** n * a + (1 - (-1) ** n) * f / omega**2, abs=1e-10)
    assert kern.phase(a) == pytest.approx(f * f * T / (2 * omega**2) - n * PI / 2, abs=1e-8)


def test_not_critical():
    pair = solve_fundamental(Constant(1.0), None, 2.0)
    with pytest.raises(NotCriticalError):
        critical_kernel(caustic_report(pair), pair)
    assert isinstance(build_kernel(Constant(1.0), None, 2.0), RegularKernel)


def test_pushforward_reflection_and_norm():
    kern = CriticalKernel(-1.0, 0.0, 1, 1.0, (0.0, 0.0, 0.0))
    x = np.linspace(-8, 8, 4001)
    psi = np.exp(-(x - 1.0) ** 2 / 2 + 0.3j * x) * PI ** -0.25
    out = apply_critical_kernel(kern, (x, psi), x)
    assert np.allclose(out, -1j * psi[::-1], atol=1e-12)
    assert np.trapezoid(np.abs(out) ** 2, x) == pytest.approx(np.trapezoid(np.abs(psi) ** 2, x), rel=1e-12)


def test_pushforward_translation():
    kern = CriticalKernel(1.0, 2.0, 2, 1.0, (0.0, 0.0, 0.0))
    g = initial_state(SlitSetup(0.0, 0.5))
    x = np.linspace(-4, 6, 2001)
    out = apply_critical_kernel(kern, g, x)
    assert np.allclose(np.abs(out), np.abs(g(x - 2.0)), atol=1e-14)


def test_pushforward_norm_with_stretching():
    kern = CriticalKernel(2.5, -0.4, 1, 0.7, (0.3, -0.2, 0.1))
    g = initial_state(SlitSetup(0.2, 0.6, 1.5, 0.7))
    x = np.linspace(-12, 12, 20001)
    out = apply_critical_kernel(kern, g, x)
    assert np.trapezoid(np.abs(out) ** 2, x) == pytest.approx(1.0, abs=1e-10)
    # closed form and pointwise pushforward agree
    closed = apply_critical_gaussian(kern, initial_state(SlitSetup(0.2, 0.6, 1.5, 0.7)).coefficients())
    assert np.allclose(np.exp(closed[0] * x * x + closed[1] * x + closed[2]), out, atol=1e-12)


def test_pushforward_support_is_image_of_support():
    kern = CriticalKernel(-2.0, 1.0, 1, 1.0, (0.0, 0.0, 0.0))
    a = np.linspace(-1, 1, 201)
    b = np.linspace(-6, 6, 1201)
    out = apply_critical_kernel(kern, (a, np.ones_like(a)), b)
    lo, hi = -2.0 * 1 + 1.0, -2.0 * -1 + 1.0
    assert np.all(out[(b < lo - 1e-9) | (b > hi + 1e-9)] == 0)
    assert np.all(out[(b > lo + 1e-9) & (b < hi - 1e-9)] != 0)


def test_regular_gaussian_matches_quadrature():
    kern = RegularKernel(_form(1.0, 1.1, Constant(0.4)), 0, 0.9)
    coeffs = initial_state(SlitSetup(0.5, 0.6, 2.0, 0.9)).coefficients()
    x = np.linspace(-8, 9, 40001)
    g = np.exp(coeffs[0] * x * x + coeffs[1] * x + coeffs[2])
    out = apply_regular_gaussian(kern, coeffs)
    for b in (-1.0, 0.2, 1.3):
        num = np.trapezoid(kern(x, b) * g, x)
        assert np.exp(out[0] * b * b + out[1] * b + out[2]) == pytest.approx(num, abs=1e-9)


def test_forced_reference():
    assert forced_ho_reference(1.0, lambda t: 0 * t, PI, 0.7) == (0.0, 0.0)
    omega, f = 1.5, 0.9
    for n in (1, 2):
        T = n * PI / omega
        s_T, act = forced_ho_reference(omega, lambda t: np.full_like(t, f), T, 0.4)
        assert s_T == pytest.approx((1 - (-1) ** n) * f / omega**2, abs=1e-10)
        assert act == pytest.approx(f * f * T / (2 * omega**2), abs=1e-10)
    with pytest.warns(CausticWarning):
        forced_ho_reference(1.0, lambda t: 0 * t, 2.0, 0.0)


def test_sin_drive_action_against_trajectory():
    from caustica.classical import solve_trajectory
    from caustica.timefun import FunctionProfile

    pair = solve_fundamental(Constant(1.0), FunctionProfile(lambda t: -np.sin(t)), PI)
    _, act = forced_ho_reference(1.0, np.sin, PI, 0.0)
    assert solve_trajectory(pair, 0.0, 0.0).action == pytest.approx(act, abs=1e-9)


@pytest.mark.parametrize("lam, T, mu", [(0.0, 1.0, None), (1.0, PI / 2, None), (1.0, 2.5, Constant(-0.5))])
def test_unitarity(lam, T, mu):
    pair = solve_fundamental(Constant(lam), mu, T)
    kern = RegularKernel(action_coefficients(pair), caustic_report(pair).morse_index, 1.0)
    assert unitarity_deviation(kern, [-0.8, 0.0, 0.5], 0.25) <= 1e-3


@pytest.mark.parametrize("wt", [PI - 0.1, PI + 0.1])
def test_morse_phase_across_caustic_against_oracle(wt):
    # absolute phase of the evolved packet, including e^{-i pi m/2}, agrees with CN
    setup = SlitSetup(0.8, 0.6)
    lam, T = Constant(1.0), wt
    pair = solve_fundamental(lam, None, T)
    rep = caustic_report(pair)
    fin = evolve(setup, action_coefficients(pair), rep.morse_index)
    _, c, s = envelope(pair, setup)
    lo, hi = envelope_box(c, s)
    out = propagate(GridState.from_function(initial_state(setup), lo, hi), lam, None, 0.0, T)
    overlap = np.trapezoid(np.conj(fin(out.x)) * out.psi, out.x)
    assert abs(overlap - 1.0) <= 1e-3
    assert rep.morse_index == (1 if wt > PI else 0)
