"""Closed-form reflected field, steering gradients and validity distances.

The reflected field on the lens plane is a product of two truncated-Gaussian
integrals, one per IRS axis:

    E_r = C pi sin(theta_r) / (4 sqrt(b_x) sqrt(b_y)) * D(a_x, q_x) * D(a_y, q_y)

with ``a = sqrt(b) L / 2``, ``q = -j k (X - Phi) / (2 sqrt(b))`` and
``D(a, q) = exp(q^2) [erf(a + q) - erf(q - a)]``, evaluated by
:func:`~irsfso.special_fn.scaled_erf_difference` so that large ``|q|``
cannot overflow.

Two coefficients differ from the commonly printed form; both were settled
against the Huygens-Fresnel quadrature in :mod:`irsfso.oracle`:

* ``b_x`` carries ``1 - cos^2(phi_r) cos^2(theta_r)``, the second-order
  Taylor term of ``|r_op|``. The ``1 + ...`` variant misses the quadrature
  by 20-100 % as soon as ``cos(theta_r) != 0``.
* The footprint offset enters ``X`` and ``Y`` as ``- 2 bhat x0`` and
  ``- 2 bhat y0``; the ``+`` variant is off by several percent for
  ``x0 != 0`` while ``-`` agrees to 1e-8.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .beam import rayleigh_range
from .errors import ConfigurationError, RegimeError
from .geometry import SphericalPose
from .scenario import IrsConfig
from .special_fn import scaled_erf_difference

__all__ = [
    "IrsConfig",
    "AnalyticCoefficients",
    "ValidityReport",
    "REGIME_MARGIN",
    "default_phase_gradients",
    "analytic_coeffs",
    "reflected_field_analytic",
    "mirror_field_far",
    "anomalous_mirror_field_far",
    "mirror_beam_width",
    "validity_distances",
]

#: Factor by which "much greater than" conditions must hold.
REGIME_MARGIN = 20.0


def default_phase_gradients(p_i: SphericalPose, p_r: SphericalPose):
    """Linear phase gradients that steer the incident beam onto the lens.

    ``Phi_x = cos(theta_i) cos(phi_i) + cos(theta_r) cos(phi_r)`` and
    ``Phi_y = cos(theta_i) sin(phi_i) - cos(theta_r) sin(phi_r)``. The
    ``y`` component uses the sign of the lens-frame direction cosine so that
    ``(Phi_x, Phi_y)`` cancels ``(varphi_x, varphi_y)`` exactly, for
    out-of-plane lenses too.
    """
    ci, cr = math.cos(p_i.theta), math.cos(p_r.theta)
    phi_x = ci * math.cos(p_i.phi) + cr * math.cos(p_r.phi)
    phi_y = ci * math.sin(p_i.phi) - cr * math.sin(p_r.phi)
    return phi_x, phi_y


@dataclass(frozen=True)
class AnalyticCoefficients:
    """Constants of the closed-form field for one scenario.

    ``X(xr, yr)`` and ``Y(xr, yr)`` assemble the steering arguments; every
    other field is a scalar. ``b_x`` and ``b_y`` have positive real part.
    """

    k: float
    d_r: float
    L_x: float
    L_y: float
    x0: float
    y0: float
    sin_theta_r: float
    d_tilde: float
    w_tilde: float
    R_tilde: float
    nu: complex
    b_x: complex
    b_y: complex
    bhat_x: complex
    bhat_y: complex
    c1: float
    c2: float
    c3: float
    c4: float
    varphi_x: float
    varphi_y: float
    Phi_x: float
    Phi_y: float
    C: complex

    @property
    def sqrt_bx(self):
        return np.sqrt(self.b_x)

    @property
    def sqrt_by(self):
        return np.sqrt(self.b_y)

    def X(self, xr, yr):
        return self.varphi_x + self.c1 * xr + self.c2 * yr - 2.0 * self.bhat_x * self.x0

    def Y(self, xr, yr):
        return self.varphi_y + self.c3 * xr + self.c4 * yr - 2.0 * self.bhat_y * self.y0


@dataclass(frozen=True)
class ValidityReport:
    """Far-field and near-field distances and the regime of ``d_r``.

    ``regime`` is ``"far"`` when ``d_r >= d_f``, ``"intermediate"`` when
    ``d_r >= 20 d_n`` and ``"near"`` otherwise. ``theorem_valid`` applies the
    full closed-form precondition ``d_r >= 20 max(a0, L_x, L_y, d_n)``.
    """

    d_f: float
    d_n: float
    x_e: float
    y_e: float
    w_x: float
    w_y: float
    convention: str
    d_r: float
    regime: str
    theorem_valid: bool

    def as_dict(self):
        return dict(self.__dict__)


def validity_distances(scenario, convention="half_width"):
    """Far-field distance ``d_f`` and near-field bound ``d_n``.

    ``d_f = (x_e^2 + y_e^2) / (8 lambda)`` and
    ``d_n = ((x_e^2 + y_e^2)^2 / (8 lambda))^(1/3)``, where the extents are
    ``min(L/2, w)`` under ``half_width`` and ``min(L, 2 w)`` under
    ``full_width`` (``w`` being the footprint width along that axis).

    Parameters
    ----------
    scenario : Scenario
    convention : {"half_width", "full_width"}

    Returns
    -------
    ValidityReport
    """
    g = scenario.incident()
    Lx, Ly = scenario.irs.Lx, scenario.irs.Ly
    if convention in ("half_width", "half"):
        convention = "half_width"
        x_e, y_e = min(Lx / 2.0, g.w_x), min(Ly / 2.0, g.w_y)
    elif convention in ("full_width", "full"):
        convention = "full_width"
        x_e, y_e = min(Lx, 2.0 * g.w_x), min(Ly, 2.0 * g.w_y)
    else:
        raise ConfigurationError(f"unknown extent convention {convention!r}")
    lam = scenario.beam.wavelength
    s = x_e ** 2 + y_e ** 2
    d_f = s / (8.0 * lam)
    d_n = (s * s / (8.0 * lam)) ** (1.0 / 3.0)
    if not d_n < d_f:
        raise ConfigurationError("extent below 8 wavelengths: d_n >= d_f")
    d_r = scenario.lens.d
    if d_r >= d_f:
        regime = "far"
    elif d_r >= REGIME_MARGIN * d_n:
        regime = "intermediate"
    else:
        regime = "near"
    limit = REGIME_MARGIN * max(scenario.lens_radius, Lx, Ly, d_n)
    return ValidityReport(d_f, d_n, x_e, y_e, g.w_x, g.w_y, convention, d_r, regime, d_r >= limit)


def analytic_coeffs(scenario):
    """All constants of the closed-form field.

    Raises
    ------
    ConfigurationError
        If ``Re(b_x)`` or ``Re(b_y)`` is not positive.
    """
    b = scenario.beam
    k = b.k
    g = scenario.incident()
    ti = scenario.source.theta
    dr, tr, pr = scenario.lens.d, scenario.lens.theta, scenario.lens.phi
    x0, y0 = scenario.footprint.x0, scenario.footprint.y0
    Phi_x, Phi_y = scenario.phase_gradients()

    nu = 1.0 / g.w ** 2 + 1j * k / (2.0 * g.R)
    st2 = math.sin(ti) ** 2
    ctr2 = math.cos(tr) ** 2
    b_x = nu * st2 - 1j * k / (2.0 * dr) * (1.0 - math.cos(pr) ** 2 * ctr2)
    b_y = nu - 1j * k / (2.0 * dr) * (1.0 - math.sin(pr) ** 2 * ctr2)
    if not (b_x.real > 0.0 and b_y.real > 0.0):
        raise ConfigurationError("Re(b_x) and Re(b_y) must be positive; geometry out of regime")

    c1 = math.cos(pr) * math.sin(tr) / dr
    c2 = math.sin(pr) / dr
    c3 = -math.sin(pr) * math.sin(tr) / dr
    c4 = math.cos(pr) / dr
    varphi_x = math.cos(ti) + math.cos(tr) * math.cos(pr)
    varphi_y = -math.cos(tr) * math.sin(pr)

    z0 = rayleigh_range(b)
    # large propagation phases are reduced before exponentiation
    prop = math.fmod(k * (dr - g.d_tilde), 2.0 * math.pi)
    lin = math.fmod(k * x0 * math.cos(ti), 2.0 * math.pi)
    expo = 1j * (prop + lin + math.atan(g.d_tilde / z0)) - nu * st2 * x0 ** 2 - nu * y0 ** 2
    C = b.E0 * b.w0 / (1j * b.wavelength * g.w * dr) * np.exp(expo)

    return AnalyticCoefficients(
        k=k, d_r=dr, L_x=scenario.irs.Lx, L_y=scenario.irs.Ly, x0=x0, y0=y0,
        sin_theta_r=math.sin(tr), d_tilde=g.d_tilde, w_tilde=g.w, R_tilde=g.R,
        nu=complex(nu), b_x=complex(b_x), b_y=complex(b_y),
        bhat_x=complex(-1j * b_x / k), bhat_y=complex(-1j * b_y / k),
        c1=c1, c2=c2, c3=c3, c4=c4, varphi_x=varphi_x, varphi_y=varphi_y,
        Phi_x=float(Phi_x), Phi_y=float(Phi_y), C=complex(C),
    )


def check_regime(scenario, convention="half_width"):
    """Raise :class:`RegimeError` unless the closed form applies.

    Also warns when the source is closer than 20 IRS side lengths.
    """
    rep = validity_distances(scenario, convention)
    if not rep.theorem_valid:
        raise RegimeError(
            f"d_r = {rep.d_r:g} m is below {REGIME_MARGIN:g} x max(a0, Lx, Ly, d_n) "
            f"(d_n = {rep.d_n:.3g} m); the closed form does not apply", rep)
    if scenario.source.d < REGIME_MARGIN * max(scenario.irs.Lx, scenario.irs.Ly):
        warnings.warn("source closer than 20 IRS side lengths; incident-field "
                      "expansion loses accuracy", stacklevel=3)
    return rep


def _lens_xy(r_r):
    r_r = np.asarray(r_r, dtype=float)
    if r_r.shape[-1] not in (2, 3):
        raise ValueError("lens-plane points need 2 or 3 components in the last axis")
    return r_r[..., 0], r_r[..., 1]


def reflected_field_analytic(r_r, scenario, *, coeffs=None, check=True):
    """Closed-form reflected field at lens-plane points.

    Parameters
    ----------
    r_r : array_like, shape (..., 2) or (..., 3)
        Lens-frame coordinates ``(x_r, y_r[, 0])`` in metres.
    scenario : Scenario
    coeffs : AnalyticCoefficients, optional
        Precomputed constants for ``scenario``.
    check : bool
        Enforce the regime precondition (raises :class:`RegimeError`).

    Returns
    -------
    complex or ndarray of complex
    """
    if check:
        check_regime(scenario)
    c = coeffs if coeffs is not None else analytic_coeffs(scenario)
    xr, yr = _lens_xy(r_r)
    sbx, sby = c.sqrt_bx, c.sqrt_by
    qx = -1j * c.k * (c.X(xr, yr) - c.Phi_x) / (2.0 * sbx)
    qy = -1j * c.k * (c.Y(xr, yr) - c.Phi_y) / (2.0 * sby)
    dx = scaled_erf_difference(sbx * c.L_x / 2.0, qx)
    dy = scaled_erf_difference(sby * c.L_y / 2.0, qy)
    out = c.C * math.pi * c.sin_theta_r / (4.0 * sbx * sby) * dx * dy
    return complex(out) if np.ndim(out) == 0 else out


def mirror_beam_width(scenario):
    """``w_eq = 2 d_r / (k w(d_tilde))``, the far-field mirror beam width."""
    g = scenario.incident()
    return 2.0 * scenario.lens.d / (scenario.k * g.w)


def _require(cond, message):
    if not cond:
        raise ConfigurationError(message)


def mirror_field_far(r_r, scenario, *, coeffs=None):
    """Far-field field of a conventional mirror: a circular Gaussian.

    ``E = C pi w(d_tilde)^2 exp(-(x_r^2 + y_r^2) / w_eq^2)``. Requires zero
    phase gradients, ``theta_i = theta_r``, ``phi_r = pi`` and a centred
    footprint; the large-mirror, flat-wavefront and ``d_r >> d_f``
    conditions are the caller's responsibility.
    """
    c = coeffs if coeffs is not None else analytic_coeffs(scenario)
    tol = 1e-9
    _require(abs(c.Phi_x) < tol and abs(c.Phi_y) < tol, "mirror limit needs zero phase gradients")
    _require(abs(scenario.source.theta - scenario.lens.theta) < tol, "mirror limit needs theta_i = theta_r")
    _require(abs(math.cos(scenario.lens.phi) + 1.0) < tol, "mirror limit needs phi_r = pi")
    _require(c.x0 == 0.0 and c.y0 == 0.0, "mirror limit needs a centred footprint")
    xr, yr = _lens_xy(r_r)
    w_eq = mirror_beam_width(scenario)
    out = c.C * math.pi * c.w_tilde ** 2 * np.exp(-(xr ** 2 + yr ** 2) / w_eq ** 2)
    return complex(out) if np.ndim(out) == 0 else out


def anomalous_mirror_field_far(r_r, scenario, *, coeffs=None):
    """Far-field field of a steering IRS: an elliptical Gaussian.

    ``E = C pi |sin(theta_r)| w^2 / |sin(theta_i)| *
    exp(-k^2 w^2 / (4 d_r^2) (sin^2(theta_r) x_r^2 / sin^2(theta_i) + y_r^2))``
    with ``w = w(d_tilde)``. Requires the steering-default gradients and a
    centred footprint.
    """
    c = coeffs if coeffs is not None else analytic_coeffs(scenario)
    tol = 1e-9
    _require(abs(c.Phi_x - c.varphi_x) < tol and abs(c.Phi_y - c.varphi_y) < tol,
             "anomalous-mirror limit needs the steering-default phase gradients")
    _require(c.x0 == 0.0 and c.y0 == 0.0, "anomalous-mirror limit needs a centred footprint")
    xr, yr = _lens_xy(r_r)
    si = abs(math.sin(scenario.source.theta))
    sr = abs(c.sin_theta_r)
    a = c.k ** 2 * c.w_tilde ** 2 / (4.0 * c.d_r ** 2)
    out = (c.C * math.pi * sr * c.w_tilde ** 2 / si
           * np.exp(-a * (sr ** 2 * xr ** 2 / si ** 2 + yr ** 2)))
    return complex(out) if np.ndim(out) == 0 else out
