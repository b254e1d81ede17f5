# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: RK4 stepping of the Jacobi/special solutions and
Crank-Nicolson propagation with an in-place Thomas solve."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def rk4_linear(const double[::1] lam_s, const double[::1] lam_m, const double[::1] lam_e,
               const double[::1] mu_s, const double[::1] mu_m, const double[::1] mu_e,
               double h, y0):
    cdef Py_ssize_t n = lam_m.shape[0]
    cdef Py_ssize_t i, j
    out_arr = np.empty((n + 1, 6))
    cdef double[:, ::1] out = out_arr
    cdef double y[6]
    cdef double k1[6], k2[6], k3[6], k4[6], tmp[6]
    cdef double hh = 0.5 * h, h6 = h / 6.0
    cdef double l0, l1, l2, m0, m1, m2
    for j in range(6):
        y[j] = y0[j]
        out[0, j] = y[j]
    for i in range(n):
        l0 = lam_s[i]; l1 = lam_m[i]; l2 = lam_e[i]
        m0 = mu_s[i]; m1 = mu_m[i]; m2 = mu_e[i]
        _deriv(y, l0, m0, k1)
        for j in range(6):
            tmp[j] = y[j] + hh * k1[j]
        _deriv(tmp, l1, m1, k2)
        for j in range(6):
            tmp[j] = y[j] + hh * k2[j]
        _deriv(tmp, l1, m1, k3)
        for j in range(6):
            tmp[j] = y[j] + h * k3[j]
        _deriv(tmp, l2, m2, k4)
        for j in range(6):
            y[j] += h6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            out[i + 1, j] = y[j]
    return out_arr


cdef inline void _deriv(double* y, double lam, double mu, double* dy) nogil:
    dy[0] = y[1]
    dy[1] = -lam * y[0]
    dy[2] = y[3]
    dy[3] = -lam * y[2]
    dy[4] = y[5]
    dy[5] = -lam * y[4] - mu


def cn_propagate(psi_in, const double[::1] x, const double[::1] lam_mid,
                 const double[::1] mu_mid, double dt, double hbar, double dx):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t nsteps = lam_mid.shape[0]
    cdef Py_ssize_t j, k
    psi_arr = np.array(psi_in, dtype=np.complex128)
    if psi_arr.shape[0] != n:
        raise ValueError("psi and x differ in length")
    cdef double complex[::1] psi = psi_arr
    cdef double complex[::1] rhs = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] cp = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] inv_m = np.empty(n, dtype=np.complex128)
    cdef double[::1] dg = np.empty(n)
    cdef double[::1] xx = np.empty(n)
    # diag of H dt/2hbar is purely imaginary: i * dg[j]
    cdef double g = dt / (2.0 * hbar)
    cdef double kin = hbar * hbar / (dx * dx)
    cdef double complex off = -0.25j * dt * hbar / (dx * dx)
    cdef double complex prev, nxt
    cdef double lam, mu
    cdef double lam_prev = 0.0, mu_prev = 0.0
    cdef bint factored = False
    for j in range(n):
        xx[j] = 0.5 * x[j] * x[j]
    with nogil:
        for k in range(nsteps):
            lam = lam_mid[k]
            mu = mu_mid[k]
            if not factored or lam != lam_prev or mu != mu_prev:
                # LU of (1 + iH dt/2hbar); reused while the potential is unchanged
                for j in range(n):
                    dg[j] = g * (kin + lam * xx[j] + mu * x[j])
                inv_m[0] = 1.0 / (1.0 + 1j * dg[0])
                cp[0] = off * inv_m[0]
                for j in range(1, n):
                    inv_m[j] = 1.0 / (1.0 + 1j * dg[j] - off * cp[j - 1])
                    cp[j] = off * inv_m[j]
                lam_prev = lam
                mu_prev = mu
                factored = True
            # rhs = (1 - iH dt/2hbar) psi, then forward substitution
            prev = 0.0
            for j in range(n):
                nxt = psi[j + 1] if j + 1 < n else 0.0
                rhs[j] = (1.0 - 1j * dg[j]) * psi[j] - off * (prev + nxt)
                prev = psi[j]
            rhs[0] = rhs[0] * inv_m[0]
            for j in range(1, n):
                rhs[j] = (rhs[j] - off * rhs[j - 1]) * inv_m[j]
            psi[n - 1] = rhs[n - 1]
            for j in range(n - 2, -1, -1):
                psi[j] = rhs[j] - cp[j] * psi[j + 1]
    return psi_arr
