"""Pure-Python/numpy twin of the compiled kernels.

Same algorithms and signatures as ``_kernels.pyx``. Used when the extension
is not built, or when ``IRSFSO_BACKEND=python`` is set.
"""

import cmath
import math

import numpy as np

BACKEND_NAME = "python"

INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
TWO_INV_SQRT_PI = 2.0 / math.sqrt(math.pi)
CF_MIN_IMAG = 1.5
CF_MIN_ABS2 = 64.0


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


def _erf_maclaurin(u):
    u2 = -u * u
    term = u
    acc = u
    nmin = _abs2(u)
    for n in range(1, 2000):
        term = term * u2 / n
        piece = term / (2 * n + 1)
        acc = acc + piece
        if n > nmin and _abs2(piece) < 1.0e-36 * _abs2(acc):
            break
    return TWO_INV_SQRT_PI * acc


def _cf_terms(r2):
    if r2 >= 1024.0:
        return 12
    if r2 >= 256.0:
        return 24
    if r2 >= 64.0:
        return 48
    return 80


def _w_cf(z, nterms):
    t = 0.0
    for n in range(nterms, 0, -1):
        t = (0.5 * n) / (z - t)
    return 1j * INV_SQRT_PI / (z - t)


def _w_upper(z):
    if z.imag >= CF_MIN_IMAG or _abs2(z) >= CF_MIN_ABS2:
        return _w_cf(z, _cf_terms(_abs2(z)))
    return cmath.exp(-z * z) * (1.0 - _erf_maclaurin(-1j * z))


def faddeeva_scalar(z):
    z = complex(z)
    if z.imag >= 0.0:
        return _w_upper(z)
    e = -z * z
    if e.real > 709.0:
        return complex(math.nan, math.nan)
    return 2.0 * cmath.exp(e) - _w_upper(-z)


def erf_scalar(z):
    z = complex(z)
    if z.real < 0.0:
        return -erf_scalar(-z)
    if z.real <= CF_MIN_IMAG and _abs2(z) < CF_MIN_ABS2:
        return _erf_maclaurin(z)
    e = -z * z
    if e.real > 709.0:
        return complex(math.nan, math.nan)
    if e.real < -745.0:
        return 1.0 + 0j
    return 1.0 - cmath.exp(e) * _w_upper(1j * z)


# Vectorized versions: same branch logic applied with masks.

def _erf_maclaurin_v(u):
    u2 = -u * u
    term = u.copy()
    acc = u.copy()
    nmin = np.abs(u) ** 2
    active = np.ones(u.shape, dtype=bool)
    for n in range(1, 2000):
        if not active.any():
            break
        term[active] = term[active] * u2[active] / n
        piece = term[active] / (2 * n + 1)
        acc[active] += piece
        done = (n > nmin[active]) & (np.abs(piece) ** 2 < 1.0e-36 * np.abs(acc[active]) ** 2)
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return TWO_INV_SQRT_PI * acc


def _w_cf_v(z, nterms):
    t = np.zeros_like(z)
    for n in range(nterms, 0, -1):
        t = (0.5 * n) / (z - t)
    return 1j * INV_SQRT_PI / (z - t)


def _w_upper_v(z):
    out = np.empty_like(z)
    r2 = np.abs(z) ** 2
    cf = (z.imag >= CF_MIN_IMAG) | (r2 >= CF_MIN_ABS2)
    for lo, hi, nterms in ((1024.0, np.inf, 12), (256.0, 1024.0, 24),
                           (64.0, 256.0, 48), (-1.0, 64.0, 80)):
        sel = cf & (r2 >= lo) & (r2 < hi)
        if sel.any():
            out[sel] = _w_cf_v(z[sel], nterms)
    ser = ~cf
    if ser.any():
        zs = z[ser]
        out[ser] = np.exp(-zs * zs) * (1.0 - _erf_maclaurin_v(-1j * zs))
    return out


def faddeeva_array(z):
    shape = np.shape(z)
    zz = np.asarray(z, dtype=np.complex128).ravel()
    out = np.empty_like(zz)
    up = zz.imag >= 0.0
    if up.any():
        out[up] = _w_upper_v(zz[up])
    lo = ~up
    if lo.any():
        zl = zz[lo]
        e = -zl * zl
        big = e.real > 709.0
        with np.errstate(over="ignore", invalid="ignore"):
            val = 2.0 * np.exp(e) - _w_upper_v(-zl)
        val[big] = complex(math.nan, math.nan)
        out[lo] = val
    return out.reshape(shape)


def erf_array(z):
    shape = np.shape(z)
    zz = np.asarray(z, dtype=np.complex128).ravel()
    flip = zz.real < 0.0
    zp = np.where(flip, -zz, zz)
    out = np.empty_like(zp)
    ser = (zp.real <= CF_MIN_IMAG) & (np.abs(zp) ** 2 < CF_MIN_ABS2)
    if ser.any():
        out[ser] = _erf_maclaurin_v(zp[ser])
    rest = ~ser
    if rest.any():
        zr = zp[rest]
        e = -zr * zr
        val = np.empty_like(zr)
        over = e.real > 709.0
        under = e.real < -745.0
        mid = ~(over | under)
        val[over] = complex(math.nan, math.nan)
        val[under] = 1.0
        if mid.any():
            val[mid] = 1.0 - np.exp(e[mid]) * _w_upper_v(1j * zr[mid])
        out[rest] = val
    out[flip] = -out[flip]
    return out.reshape(shape)


def hf_field(A, xs, ys, obs, k, mode=0, num_threads=1):
    """Sum A[i,j] exp(jk(|r_op|-d_p)) z_p/|r_op|^2 for each observation point.

    Row blocks are reduced in a fixed order with numpy's pairwise summation,
    so the result is deterministic; ``num_threads`` is accepted for signature
    parity and ignored.
    """
    A = np.ascontiguousarray(A, dtype=np.complex128)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    obs = np.ascontiguousarray(obs, dtype=np.float64).reshape(-1, 3)
    if A.shape != (xs.size, ys.size):
        raise ValueError("amplitude grid shape does not match the axes")
    out = np.empty(obs.shape[0], dtype=np.complex128)
    block = max(1, 2_000_000 // max(ys.size, 1))
    y = ys[None, :]
    for p, (xp, yp, zp) in enumerate(obs):
        dp = math.sqrt(xp * xp + yp * yp + zp * zp)
        acc = []
        for i0 in range(0, xs.size, block):
            x = xs[i0:i0 + block, None]
            if mode == 0:
                r2 = (x - xp) ** 2 + (y - yp) ** 2 + zp * zp
                delta = (x * x + y * y - 2.0 * (x * xp + y * yp)) / (np.sqrt(r2) + dp)
                amp = zp / r2
            else:
                sp = x * xp + y * yp
                delta = (0.5 * (x * x + y * y) - sp - 0.5 * sp * sp / dp**2) / dp
                amp = zp / dp**2
            term = A[i0:i0 + block] * np.exp(1j * (k * delta)) * amp
            acc.append(term.sum())
        out[p] = np.sum(np.array(acc))
    return out
