# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: explicit PDE marching and Monte Carlo stepping.

These mirror the numpy fallbacks in nlaffine.backends operation for
operation; keep the arithmetic in sync when editing either side.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fmax, fmin, sqrt

cnp.import_array()


def explicit_march(double[::1] v0, double[::1] x,
                   double[::1] bl, double[::1] bh,
                   double[::1] al, double[::1] ah,
                   double dt, Py_ssize_t n_sub, double dx,
                   bint is_sup, bint discount,
                   int bc_mode, double bc_lo, double bc_hi):
    cdef Py_ssize_t n = v0.shape[0]
    cdef cnp.ndarray[double, ndim=1] buf_a = np.array(v0, dtype=np.float64, copy=True)
    cdef cnp.ndarray[double, ndim=1] buf_b = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] blp_arr = np.maximum(bl, 0.0)
    cdef cnp.ndarray[double, ndim=1] blm_arr = np.minimum(bl, 0.0)
    cdef cnp.ndarray[double, ndim=1] bhp_arr = np.maximum(bh, 0.0)
    cdef cnp.ndarray[double, ndim=1] bhm_arr = np.minimum(bh, 0.0)
    cdef cnp.ndarray[double, ndim=1] inv_denom_arr = (
        1.0 / (1.0 + dt * np.asarray(x)) if discount else np.empty(0)
    )
    cdef double[::1] v = buf_a
    cdef double[::1] out = buf_b
    cdef double[::1] blp = blp_arr
    cdef double[::1] blm = blm_arr
    cdef double[::1] bhp = bhp_arr
    cdef double[::1] bhm = bhm_arr
    cdef double[::1] inv_denom = inv_denom_arr
    cdef double[::1] tmp
    cdef Py_ssize_t step, j
    cdef double inv_dx = 1.0 / dx
    cdef double inv_dx2 = inv_dx * inv_dx
    cdef double dp, dm, d2, g_lo, g_hi, c_lo, c_hi, drift, diff, p0, pn, d0, dn
    cdef bint swapped = False

    with nogil:
        for step in range(n_sub):
            for j in range(1, n - 1):
                dp = (v[j + 1] - v[j]) * inv_dx
                dm = (v[j] - v[j - 1]) * inv_dx
                d2 = (v[j + 1] - 2.0 * v[j] + v[j - 1]) * inv_dx2
                g_lo = blp[j] * dp + blm[j] * dm
                g_hi = bhp[j] * dp + bhm[j] * dm
                c_lo = al[j] * d2
                c_hi = ah[j] * d2
                if is_sup:
                    drift = fmax(g_lo, g_hi)
                    diff = 0.5 * fmax(c_lo, c_hi)
                else:
                    drift = fmin(g_lo, g_hi)
                    diff = 0.5 * fmin(c_lo, c_hi)
                out[j] = v[j] + dt * (drift + diff)
            if bc_mode == 1:
                out[0] = bc_lo
                out[n - 1] = bc_hi
            else:
                p0 = (v[1] - v[0]) * inv_dx
                pn = (v[n - 1] - v[n - 2]) * inv_dx
                if is_sup:
                    d0 = fmax(bl[0] * p0, bh[0] * p0)
                    dn = fmax(bl[n - 1] * pn, bh[n - 1] * pn)
                else:
                    d0 = fmin(bl[0] * p0, bh[0] * p0)
                    dn = fmin(bl[n - 1] * pn, bh[n - 1] * pn)
                out[0] = v[0] + dt * d0
                out[n - 1] = v[n - 1] + dt * dn
            if discount:
                for j in range(n):
                    out[j] = out[j] * inv_denom[j]
            tmp = v
            v = out
            out = tmp
            swapped = not swapped

    return buf_b if swapped else buf_a


def mc_march(double[::1] xs, double[:, ::1] z,
             double b0, double b1, double a0, double a1,
             double dt, double sqdt, Py_ssize_t n_pairs,
             integ_obj, mins_obj):
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t n_steps = z.shape[0]
    cdef bint with_integ = integ_obj is not None
    cdef bint with_mins = mins_obj is not None
    cdef double[::1] integ = integ_obj if with_integ else None
    cdef double[::1] mins = mins_obj if with_mins else None
    cdef Py_ssize_t k, i
    cdef double zz, var, xn, xcur

    with nogil:
        for k in range(n_steps):
            for i in range(n):
                if n_pairs > 0 and i >= n_pairs:
                    zz = -z[k, i - n_pairs]
                else:
                    zz = z[k, i]
                xcur = xs[i]
                var = fmax(a0 + a1 * fmax(xcur, 0.0), 0.0)
                xn = xcur + (b0 + b1 * xcur) * dt + sqrt(var) * sqdt * zz
                if with_integ:
                    integ[i] = integ[i] + 0.5 * (xcur + xn) * dt
                if with_mins:
                    mins[i] = fmin(mins[i], xn)
                xs[i] = xn
