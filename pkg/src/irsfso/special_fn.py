"""Error functions of complex argument, erfi, erfcx and log-Gamma.

The complex kernels (Faddeeva function and erf) live in the compiled
extension with a numpy twin; see ``_backend``. Every function either returns
a finite value or raises: overflow is reported as
:class:`~irsfso.errors.ArgumentOverflowError`, Gamma poles as
:class:`~irsfso.errors.PoleError`.

Algorithm
---------
``w(z)`` in the upper half plane uses the Laplace continued fraction when
``Im z >= 1.5`` or ``|z| >= 8`` and ``exp(-z^2) (1 - erf(-iz))`` with the
Maclaurin series of erf otherwise. The lower half plane follows from
``w(z) = 2 exp(-z^2) - w(-z)``. ``erf`` reduces to ``Re z >= 0`` by oddness
and uses the series for ``Re z <= 1.5, |z| < 8`` and ``1 - exp(-z^2) w(iz)``
elsewhere. Cancellation in the series is bounded by ``exp(2 (Re z)^2)``
(about 90x at the switchover), which keeps the relative error near 1e-14.
"""

import math

import numpy as np

from ._backend import kernels
from .errors import ArgumentOverflowError, PoleError

__all__ = [
    "faddeeva",
    "erf_complex",
    "erf_real",
    "erfi_real",
    "erfcx_real",
    "scaled_erf_difference",
    "log_erf_window",
    "ln_gamma",
    "gamma_sign",
]


def _finish(out, z, name):
    if np.ndim(out) == 0:
        if not (math.isfinite(out.real) and math.isfinite(out.imag)):
            raise ArgumentOverflowError(f"{name}({z!r}) is not representable in double precision")
        return out
    if not np.all(np.isfinite(out)):
        bad = np.asarray(z).ravel()[~np.isfinite(np.asarray(out).ravel())][0]
        raise ArgumentOverflowError(f"{name}({bad!r}) is not representable in double precision")
    return out


def faddeeva(z):
    """Faddeeva function ``w(z) = exp(-z^2) erfc(-iz)``.

    Accepts a scalar or an array; arrays keep their shape.

    Raises
    ------
    ArgumentOverflowError
        In the lower half plane when ``exp(-z^2)`` overflows.
    """
    if np.ndim(z) == 0:
        return _finish(kernels.faddeeva_scalar(complex(z)), z, "w")
    return _finish(kernels.faddeeva_array(np.asarray(z, dtype=np.complex128)), z, "w")


def erf_complex(z):
    """Error function of a complex argument.

    Parameters
    ----------
    z : complex or array_like of complex

    Returns
    -------
    complex or ndarray
        ``erf(z)``, relative error near 1e-14 for ``|z| <= 10``. Saturates
        to +-1 along the real axis.

    Raises
    ------
    ArgumentOverflowError
        When ``|exp(-z^2)|`` exceeds the double range (roughly
        ``(Im z)^2 - (Re z)^2 > 709``).
    """
    if np.ndim(z) == 0:
        return _finish(kernels.erf_scalar(complex(z)), z, "erf")
    return _finish(kernels.erf_array(np.asarray(z, dtype=np.complex128)), z, "erf")


def erf_real(x):
    """Error function of a real argument (``math.erf``, vectorized over arrays)."""
    if np.ndim(x) == 0:
        return math.erf(float(x))
    return np.vectorize(math.erf, otypes=[float])(np.asarray(x, dtype=float))


def erfi_real(x):
    """Imaginary error function ``erfi(x) = -i erf(ix)``.

    Raises
    ------
    ArgumentOverflowError
        For ``|x|`` above about 26.6, where erfi exceeds the double range.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.abs(x_arr) > 26.6):
        raise ArgumentOverflowError(f"erfi({x!r}) overflows double precision")
    val = erf_complex(1j * x_arr if x_arr.ndim else 1j * float(x_arr))
    out = (-1j * val).real
    return float(out) if np.ndim(x) == 0 else out


def erfcx_real(x):
    """Scaled complementary error function ``exp(x^2) erfc(x)`` for real x."""
    if np.ndim(x) == 0:
        return faddeeva(1j * float(x)).real
    return faddeeva(1j * np.asarray(x, dtype=float)).real


def scaled_erf_difference(a, q):
    """``exp(q^2) [erf(a + q) - erf(q - a)]`` without intermediate overflow.

    This is the window factor of a truncated Gaussian integral: a Gaussian
    ``exp(-b t^2 + 2 q sqrt(b) t)``-type integrand over a finite interval
    collapses to it. Direct evaluation overflows once ``|q|`` reaches a few
    tens; here both erf terms are rewritten through the Faddeeva function,
    choosing for each term the half plane in which ``w`` stays bounded.

    Parameters
    ----------
    a, q : complex or array_like of complex
        Broadcast against each other.

    Returns
    -------
    complex or ndarray
    """
    a = np.asarray(a, dtype=np.complex128)
    q = np.asarray(q, dtype=np.complex128)
    a, q = np.broadcast_arrays(a, q)
    u1 = a + q
    u2 = q - a
    s1 = np.where(u1.real >= 0.0, 1.0, -1.0)
    s2 = np.where(u2.real >= 0.0, 1.0, -1.0)
    w1 = faddeeva(1j * s1 * u1)
    w2 = faddeeva(1j * s2 * u2)
    with np.errstate(over="raise", invalid="raise"):
        try:
            lead = np.where(s1 != s2, (s1 - s2) * np.exp(np.where(s1 != s2, q * q, 0.0)), 0.0)
            out = (lead
                   - s1 * np.exp(-a * a - 2.0 * a * q) * w1
                   + s2 * np.exp(-a * a + 2.0 * a * q) * w2)
        except FloatingPointError as exc:
            raise ArgumentOverflowError("scaled erf difference overflows") from exc
    return out[()] if out.ndim == 0 else out


def log_erf_window(a, q):
    """``log(exp(q^2) [erf(q + a) - erf(q - a)])`` for real ``a > 0`` and real q.

    The value is even in q. For ``|q| > a`` both erf terms sit on the same
    side of zero and the difference is formed from erfcx values, so the
    result stays finite when ``q^2`` alone would overflow.
    """
    a = float(a)
    q = abs(float(q))
    if a <= 0.0:
        raise ValueError("window half-width must be positive")
    if q <= a:
        return q * q + math.log(math.erf(q + a) + math.erf(a - q))
    u1 = q + a
    u2 = q - a
    diff = erfcx_real(u2) - math.exp(-4.0 * a * q) * erfcx_real(u1)
    return 2.0 * a * q - a * a + math.log(diff)


def _check_pole(x):
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"Gamma function has a pole at {x!r}")


def ln_gamma(x):
    """``log|Gamma(x)|`` for real x away from the poles.

    Positive arguments from 0.5 up use ``math.lgamma``; below that the
    reflection formula ``Gamma(x) Gamma(1-x) = pi / sin(pi x)`` is applied
    explicitly so negative non-integer arguments are supported.

    Raises
    ------
    PoleError
        At ``x = 0, -1, -2, ...``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("ln_gamma needs a finite argument")
    _check_pole(x)
    if x >= 0.5:
        return math.lgamma(x)
    frac = x - round(x)
    return math.log(math.pi / abs(math.sin(math.pi * frac))) - math.lgamma(1.0 - x)


def gamma_sign(x):
    """Sign of ``Gamma(x)``: +1 for x > 0, alternating on negative intervals."""
    x = float(x)
    _check_pole(x)
    if x > 0.0:
        return 1
    return 1 if math.floor(-x) % 2 == 1 else -1
