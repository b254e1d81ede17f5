"""Exact propagators for quadratic Lagrangians, including on caustics.

L = xdot^2/2 - lam(t) x^2/2 - mu(t) x.  The package computes Jacobi fields
and caustic invariants, the fluctuation spectrum, regular and critical
kernels, the Gaussian slit experiment, and a Crank-Nicolson oracle to check
all of it against.
"""
from ._core import BACKEND
from .classical import (
    ActionQuadraticForm,
    CausticReport,
    ClassicalTrajectory,
    FundamentalPair,
    action_coefficients,
    caustic_report,
    solve_fundamental,
    solve_trajectory,
)
from .kernel import CriticalKernel, RegularKernel, build_kernel, critical_kernel, regular_kernel
from .slit import SlitSetup, evolve, evolve_critical, initial_state, optimal_slit, susceptibility
from .spectral import morse_crosscheck, sturm_liouville_spectrum
from .timefun import Constant, PiecewiseConstant, Polynomial, Tabulated, parse_profile

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ActionQuadraticForm",
    "CausticReport",
    "ClassicalTrajectory",
    "Constant",
    "CriticalKernel",
    "FundamentalPair",
    "PiecewiseConstant",
    "Polynomial",
    "RegularKernel",
    "SlitSetup",
    "Tabulated",
    "action_coefficients",
    "build_kernel",
    "caustic_report",
    "critical_kernel",
    "evolve",
    "evolve_critical",
    "initial_state",
    "morse_crosscheck",
    "optimal_slit",
    "parse_profile",
    "regular_kernel",
    "solve_fundamental",
    "solve_trajectory",
    "sturm_liouville_spectrum",
    "susceptibility",
]
