"""Pure-Python/numpy implementations of the hot loops.

Same signatures and results as the Cython module ``_ext``; used when the
extension is not built or ``CAUSTICA_PURE=1``.
"""
import numpy as np
from scipy.linalg.lapack import zgttrf as gttrf, zgttrs as gttrs


def rk4_linear(lam_s, lam_m, lam_e, mu_s, mu_m, mu_e, h, y0):
    """Classical RK4 for three copies of q'' = -lam(t) q - c mu(t).

    The state is ``(u, u', v, v', s, s')``; only ``s`` feels the source
    (c = 1).  Stage coefficients are supplied per step: value at the step
    start (right limit), the midpoint, and the step end (left limit).

    For a linear system one RK4 step is an affine map of ``(q, q')``.  The
    per-step maps are built at once as 3x3 homogeneous matrices and
    composed by a parallel prefix scan, so no Python loop runs per step.

    Returns an ``(n + 1, 6)`` array of states on the step grid.
    """
    lam = [np.asarray(a, float) for a in (lam_s, lam_m, lam_e)]
    mu = [np.asarray(a, float) for a in (mu_s, mu_m, mu_e)]
    n = lam[1].size
    y0 = np.asarray(y0, float)
    out = np.empty((n + 1, 6))
    out[0] = y0
    if n == 0:
        return out
    eye = np.broadcast_to(np.eye(3), (n, 3, 3))

    def rhs(lm, m):
        # (q, q', 1) -> (q', -lam q - mu, 0)
        mat = np.zeros((n, 3, 3))
        mat[:, 0, 1] = 1.0
        mat[:, 1, 0] = -lm
        mat[:, 1, 2] = -m
        return mat

    m0, m1, m2 = (rhs(lm, m) for lm, m in zip(lam, mu))
    k1 = m0
    k2 = m1 @ (eye + 0.5 * h * k1)
    k3 = m1 @ (eye + 0.5 * h * k2)
    k4 = m2 @ (eye + h * k3)
    acc = eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    d = 1
    while d < n:
        acc[d:] = acc[d:] @ acc[:-d]
        d *= 2
    # homogeneous columns for u, v (no source); affine column for s
    u0 = np.array([y0[0], y0[1], 0.0])
    v0 = np.array([y0[2], y0[3], 0.0])
    s0 = np.array([y0[4], y0[5], 1.0])
    out[1:, 0:2] = (acc @ u0)[:, :2]
    out[1:, 2:4] = (acc @ v0)[:, :2]
    out[1:, 4:6] = (acc @ s0)[:, :2]
    return out


def cn_propagate(psi, x, lam_mid, mu_mid, dt, hbar, dx):
    """Crank-Nicolson steps for H = -hbar^2/2 d2/dx2 + lam x^2/2 + mu x.

    One step per entry of ``lam_mid``/``mu_mid`` (coefficients at the step
    midpoint).  Dirichlet zero outside the grid.  Returns the new array.
    The LAPACK tridiagonal factorization is reused while the potential
    does not change between steps.
    """
    psi = np.array(psi, dtype=complex)
    x = np.asarray(x, float)
    n = psi.size
    g = 1j * dt / (2.0 * hbar)
    kin = hbar * hbar / (dx * dx)
    off = -0.25j * dt * hbar / (dx * dx)
    offs = np.full(n - 1, off, dtype=complex)
    x2 = 0.5 * x * x
    key = None
    for lam, mu in zip(np.asarray(lam_mid, float), np.asarray(mu_mid, float)):
        if (lam, mu) != key:
            diag = g * (kin + lam * x2 + mu * x)
            dl, d, du, du2, ipiv, info = gttrf(offs, 1.0 + diag, offs)
            if info:
                raise np.linalg.LinAlgError(f"zgttrf failed (info={info})")
            key = (lam, mu)
        rhs = (1.0 - diag) * psi
        rhs[1:] -= off * psi[:-1]
        rhs[:-1] -= off * psi[1:]
        psi, info = gttrs(dl, d, du, du2, ipiv, rhs)
        if info:
            raise np.linalg.LinAlgError(f"zgttrs failed (info={info})")
    return psi
