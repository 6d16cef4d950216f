# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Faddeeva/erf evaluation and Huygens-Fresnel sums.

The pure-Python twin in ``_kernels_py`` implements the same algorithms and
the same public signatures; ``_backend`` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport parallel, prange
from libc.stdlib cimport abort, free, malloc
from libc.math cimport sqrt, exp, sin, cos, fabs, floor, isfinite, INFINITY, NAN

cnp.import_array()

cdef double INV_SQRT_PI = 0.56418958354775628695
cdef double TWO_INV_SQRT_PI = 1.1283791670955125739
# Switchover between the Maclaurin series and the continued fraction.
cdef double CF_MIN_IMAG = 1.5
cdef double CF_MIN_ABS2 = 64.0

BACKEND_NAME = "compiled"


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex cexp_(double complex z) noexcept nogil:
    cdef double m = exp(z.real)
    return m * cos(z.imag) + 1j * (m * sin(z.imag))


cdef double complex erf_maclaurin(double complex u) noexcept nogil:
    # erf(u) = 2/sqrt(pi) sum (-1)^n u^(2n+1) / (n! (2n+1))
    cdef double complex u2 = -u * u
    cdef double complex term = u
    cdef double complex acc = u
    cdef double complex piece
    cdef double nmin = cabs2(u)
    cdef int n
    for n in range(1, 2000):
        term = term * u2 / n
        piece = term / (2 * n + 1)
        acc = acc + piece
        if n > nmin and cabs2(piece) < 1.0e-36 * cabs2(acc):
            break
    return TWO_INV_SQRT_PI * acc


cdef double complex w_continued_fraction(double complex z, int nterms) noexcept nogil:
    # Laplace continued fraction, evaluated from the tail.
    cdef double complex t = 0.0
    cdef int n
    for n in range(nterms, 0, -1):
        t = (0.5 * n) / (z - t)
    return 1j * INV_SQRT_PI / (z - t)


cdef inline int cf_terms(double complex z) noexcept nogil:
    cdef double r2 = cabs2(z)
    if r2 >= 1024.0:
        return 12
    if r2 >= 256.0:
        return 24
    if r2 >= 64.0:
        return 48
    return 80


cdef double complex w_upper(double complex z) noexcept nogil:
    # Faddeeva function for Im z >= 0.
    if z.imag >= CF_MIN_IMAG or cabs2(z) >= CF_MIN_ABS2:
        return w_continued_fraction(z, cf_terms(z))
    return cexp_(-z * z) * (1.0 - erf_maclaurin(-1j * z))


cdef double complex faddeeva_c(double complex z) noexcept nogil:
    cdef double complex e
    if z.imag >= 0.0:
        return w_upper(z)
    # w(z) = 2 exp(-z^2) - w(-z); NaN marks overflow for the caller.
    e = -z * z
    if e.real > 709.0:
        return NAN + 1j * NAN
    return 2.0 * cexp_(e) - w_upper(-z)


cdef double complex erf_c(double complex z) noexcept nogil:
    cdef double complex e
    cdef double complex r
    if z.real < 0.0:
        return -erf_c(-z)
    if z.real <= CF_MIN_IMAG and cabs2(z) < CF_MIN_ABS2:
        return erf_maclaurin(z)
    e = -z * z
    if e.real > 709.0:
        return NAN + 1j * NAN
    if e.real < -745.0:
        # exp(-z^2) underflows: saturate at 1.
        return 1.0 + 0j
    r = 1.0 - cexp_(e) * w_upper(1j * z)
    return r


def faddeeva_scalar(double complex z):
    return faddeeva_c(z)


def erf_scalar(double complex z):
    return erf_c(z)


def faddeeva_array(z):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty_like(zz)
    cdef double complex[::1] zv = zz
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(zv.shape[0]):
            ov[i] = faddeeva_c(zv[i])
    return out.reshape(np.shape(z))


def erf_array(z):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty_like(zz)
    cdef double complex[::1] zv = zz
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(zv.shape[0]):
            ov[i] = erf_c(zv[i])
    return out.reshape(np.shape(z))


cdef extern from "_hf_row.h" nogil:
    void hf_sincos(double ph, double* s, double* c)
    void hf_row_exact(const double* a, const double* ys, Py_ssize_t ny, double x, double xp,
                      double yp, double zp, double dp, double k, double* tr, double* ti)
    void hf_row_expanded(const double* a, const double* ys, Py_ssize_t ny, double x, double xp,
                         double yp, double zp, double dp, double k, double* tr, double* ti)


# Largest phase the polynomial sincos accepts; beyond it libm is used.
cdef double REDUCED_MAX = 1.0e8


cdef void row_terms_libm(const double* a, const double* ys, Py_ssize_t ny, double x,
                         double xp, double yp, double zp, double dp, double k, int mode,
                         double* tr, double* ti) noexcept nogil:
    cdef Py_ssize_t j
    cdef double y, dx, dy, r2, delta, amp, sp, ph, s, c
    for j in range(ny):
        y = ys[j]
        if mode == 0:
            dx = x - xp
            dy = y - yp
            r2 = dx * dx + dy * dy + zp * zp
            delta = (x * x + y * y - 2.0 * (x * xp + y * yp)) / (sqrt(r2) + dp)
            amp = zp / r2
        else:
            sp = x * xp + y * yp
            delta = (0.5 * (x * x + y * y) - sp - 0.5 * sp * sp / (dp * dp)) / dp
            amp = zp / (dp * dp)
        ph = k * delta
        s = sin(ph)
        c = cos(ph)
        tr[j] = (a[2 * j] * c - a[2 * j + 1] * s) * amp
        ti[j] = (a[2 * j] * s + a[2 * j + 1] * c) * amp


cdef double complex hf_point(const double complex[:, ::1] A, const double[::1] xs,
                             const double[::1] ys, double xp, double yp, double zp,
                             double k, int mode, double* tr, double* ti) noexcept nogil:
    """One observation point; ``tr``/``ti`` are scratch rows of length ny.

    Row terms are summed over four interleaved lanes (column j in lane
    j mod 4) and row totals with Kahan compensation. The order is fixed, so
    results are reproducible bit for bit.
    """
    cdef Py_ssize_t i, j
    cdef Py_ssize_t nx = xs.shape[0]
    cdef Py_ssize_t ny = ys.shape[0]
    cdef double dp = sqrt(xp * xp + yp * yp + zp * zp)
    cdef double x, y, rr, ri, yk, tk, corner = 0.0
    cdef double r0, r1, r2_, r3, i0, i1, i2, i3
    cdef double sr = 0.0, si = 0.0, cr = 0.0, ci = 0.0
    cdef const double* row
    cdef bint fast
    # |r_op - d_p| <= |r_o| bounds every phase of this point
    for i in range(2):
        x = xs[0] if i == 0 else xs[nx - 1]
        for j in range(2):
            y = ys[0] if j == 0 else ys[ny - 1]
            corner = max(corner, sqrt(x * x + y * y))
    fast = fabs(k) * corner < REDUCED_MAX
    for i in range(nx):
        x = xs[i]
        row = <const double*> &A[i, 0]
        if not fast:
            row_terms_libm(row, &ys[0], ny, x, xp, yp, zp, dp, k, mode, tr, ti)
        elif mode == 0:
            hf_row_exact(row, &ys[0], ny, x, xp, yp, zp, dp, k, tr, ti)
        else:
            hf_row_expanded(row, &ys[0], ny, x, xp, yp, zp, dp, k, tr, ti)
        r0 = r1 = r2_ = r3 = 0.0
        i0 = i1 = i2 = i3 = 0.0
        j = 0
        while j + 4 <= ny:
            r0 += tr[j]
            r1 += tr[j + 1]
            r2_ += tr[j + 2]
            r3 += tr[j + 3]
            i0 += ti[j]
            i1 += ti[j + 1]
            i2 += ti[j + 2]
            i3 += ti[j + 3]
            j += 4
        while j < ny:
            r0 += tr[j]
            i0 += ti[j]
            j += 1
        rr = (r0 + r1) + (r2_ + r3)
        ri = (i0 + i1) + (i2 + i3)
        yk = rr - cr
        tk = sr + yk
        cr = (tk - sr) - yk
        sr = tk
        yk = ri - ci
        tk = si + yk
        ci = (tk - si) - yk
        si = tk
    return sr + 1j * si


def hf_field(A, xs, ys, obs, double k, int mode=0, int num_threads=1):
    """Sum A[i,j] exp(jk(|r_op|-d_p)) z_p/|r_op|^2 for each observation point.

    ``obs`` holds global observation coordinates, one row per point.
    ``mode`` 0 evaluates |r_op| exactly, 1 uses the second-order expansion.
    Each point is summed serially in a fixed order, so results do not
    depend on ``num_threads``.
    """
    cdef const double complex[:, ::1] Av = np.ascontiguousarray(A, dtype=np.complex128)
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef const double[:, ::1] ov = np.ascontiguousarray(obs, dtype=np.float64).reshape(-1, 3)
    cdef Py_ssize_t m = ov.shape[0]
    out = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] outv = out
    cdef Py_ssize_t p
    cdef Py_ssize_t ny = yv.shape[0]
    cdef double* scratch
    if Av.shape[0] != xv.shape[0] or Av.shape[1] != yv.shape[0]:
        raise ValueError("amplitude grid shape does not match the axes")
    if xv.shape[0] == 0 or ny == 0:
        out[:] = 0.0
        return out
    if num_threads < 1:
        num_threads = 1
    with nogil, parallel(num_threads=num_threads):
        scratch = <double*> malloc(2 * ny * sizeof(double))
        if scratch == NULL:
            abort()
        for p in prange(m, schedule="static"):
            outv[p] = hf_point(Av, xv, yv, ov[p, 0], ov[p, 1], ov[p, 2], k, mode,
                               scratch, scratch + ny)
        free(scratch)
    return out
