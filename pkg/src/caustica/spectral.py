"""Dirichlet spectrum of the fluctuation operator -[d^2/dt^2 + lam(t)].

Second-order central differences on N interior points give a symmetric
tridiagonal matrix; eigenvalues carry an O(h^2) discretization error.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .classical import EPS_CAUSTIC, DEFAULT_STEPS, caustic_report, solve_fundamental
from .timefun import CoefficientProfile


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectrumReport:
    grid_points: int
    eigenvalues: np.ndarray
    negative_count: int
    zero_count: int
    eps_zero: float
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def index(self) -> int:
        """Extended index: number of modes with E_n <= 0."""
        return self.negative_count + self.zero_count

    def to_dict(self) -> dict:
        return {
            "grid_points": self.grid_points,
            "eigenvalues": [float(e) for e in self.eigenvalues],
            "negative_count": self.negative_count,
            "zero_count": self.zero_count,
            "index": self.index,
            "eps_zero": self.eps_zero,
        }


def _operator(lam: CoefficientProfile, T: float, N: int):
    h = T / (N + 1)
    t = h * np.arange(1, N + 1)
    lv = lam.eval(t)
    if not np.all(np.isfinite(lv)):
        # lam must be bounded above for the spectrum to be bounded below
        raise ValueError("lambda is not finite on the grid (spectrum unbounded below)")
    diag = 2.0 / h**2 - lv
    off = np.full(N - 1, -1.0 / h**2)
    return h, diag, off, lv


def zero_tolerance(h: float, lam_sup: float) -> float:
    """Zero-mode classification threshold tied to the O(h^2) error."""
    return max(1e-6, 10.0 * h * h * lam_sup)


def sturm_liouville_spectrum(lam: CoefficientProfile, n_max: int, N: int,
                             T: float | None = None, eigenvectors: bool = False) -> SpectrumReport:
    """Lowest ``n_max`` Dirichlet eigenvalues on ``N`` interior points.

    Eigenvectors, when requested, are normalized with quadrature weight h
    so that ``h * sum(u_n u_m) = delta_nm``.  The negative/zero counts are
    taken over the whole discrete spectrum, not just the reported part.
    """
    T = lam.horizon if T is None else float(T)
    if N < 64:
        raise ValueError("N must be at least 64")
    if not 1 <= n_max <= N // 4:
        raise ValueError("n_max must lie in [1, N/4]")
    h, diag, off, lv = _operator(lam, T, N)
    eps_zero = zero_tolerance(h, float(np.max(np.abs(lv))))
    try:
        if eigenvectors:
            w, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_max - 1))
            vecs = vecs / np.sqrt(h)
        else:
            w = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                                 select_range=(0, n_max - 1))
            vecs = None
        nonpos = eigh_tridiagonal(diag, off, eigvals_only=True, select="v",
                                  select_range=(-np.inf, eps_zero))
    except LinAlgError as exc:
        raise EigensolverError(f"tridiagonal eigensolver failed: {exc}") from exc
    neg = int(np.sum(nonpos < -eps_zero))
    zero = int(np.sum(np.abs(nonpos) <= eps_zero))
    return SpectrumReport(N, np.asarray(w), neg, zero, eps_zero, vecs)


@dataclass(frozen=True)
class MorseCheck:
    agrees: bool
    spectral_index: int
    classical_index: int
    critical: bool
    min_abs_eigenvalue: float
    eps_zero: float

    def __bool__(self) -> bool:
        return self.agrees


def morse_crosscheck(lam: CoefficientProfile, T: float | None = None, N: int = 1024,
                     n_steps: int = DEFAULT_STEPS, eps_caustic: float = EPS_CAUSTIC) -> MorseCheck:
    """Compare the number of modes with E_n <= 0 to the zero count of J on (0, T]."""
    T = lam.horizon if T is None else float(T)
    spec = sturm_liouville_spectrum(lam, n_max=min(N // 4, 8), N=N, T=T)
    pair = solve_fundamental(lam, T=T, n_steps=n_steps, check_convergence=False)
    rep = caustic_report(pair, eps_caustic)
    _, diag, off, _ = _operator(lam, T, N)
    # eigenvalue closest to zero, from a window around the origin
    near = eigh_tridiagonal(diag, off, eigvals_only=True, select="v",
                            select_range=(-np.inf, max(1.0, spec.eps_zero)))
    if near.size == 0:
        near = spec.eigenvalues[:1]
    min_abs = float(np.min(np.abs(near)))
    return MorseCheck(spec.index == rep.morse_index, spec.index, rep.morse_index,
                      rep.critical, min_abs, spec.eps_zero)
