"""Lens-collected channel gain, atmospheric loss and link budget.

The closed-form field is squared and integrated over a square of side
``sqrt(pi) a0`` (same area as the lens disc). The slowly varying erf window
of the field is frozen at the lens corner ``x_r = y_r = a0`` into the
constant ``C2``, which leaves a bivariate Gaussian:

    |E|^2 / (2 eta) ~ C_h exp(-rho_x x^2 - rho_y y^2 - rho_xy x y
                              - varrho_x x - varrho_y y)

The x integral is done analytically. The remaining y integral is done by
adaptive quadrature (general orientation) or in closed form when the lens
lies in the incidence plane (``rho_xy = varrho_y = 0``).

Everything is carried in log space: ``C_h`` underflows for realistic
geometries long before the gain itself does.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .analytic import (ValidityReport, analytic_coeffs, anomalous_mirror_field_far,
                       check_regime, validity_distances)
from .errors import ConfigurationError, ConvergenceError
from .oracle import QuadratureSpec, channel_gain_oracle, transmit_power
from .special_fn import log_erf_window, scaled_erf_difference

__all__ = [
    "GainCoefficients",
    "LinkBudget",
    "GAIN_MODELS",
    "gain_coeffs",
    "channel_gain_out_of_plane",
    "channel_gain_in_plane",
    "channel_gain_far_field",
    "channel_gain",
    "atmospheric_loss",
    "end_to_end_gain",
    "link_budget",
]

GAIN_MODELS = ("theorem2", "inplane", "farfield", "oracle")

#: Lens-size parameter above which the frozen erf window is inaccurate.
ZETA_WARN = 0.3


@dataclass(frozen=True)
class GainCoefficients:
    """Constants of the lens-integrated gain for one scenario.

    ``log_C_h`` is the natural log of the power-density prefactor in W/m^2;
    ``C_h`` exponentiates it and may underflow to 0. ``zeta`` is the lens
    radius measured against the field's transverse scale,
    ``a0 k / (2 d_r sqrt|b|)``; the frozen-window approximation needs it
    small.
    """

    epsilon: float
    tilde_b_x: float
    tilde_b_y: float
    rho_x: float
    rho_y: float
    rho_xy: float
    varrho_x: float
    varrho_y: float
    varpi_x: complex
    varpi_y: complex
    log_abs_C2: float
    log_C_h: float
    rho_1: float
    rho_2: float
    zeta: float
    P_tx: float

    @property
    def C_h(self):
        return math.exp(self.log_C_h)

    @property
    def abs_C2(self):
        return math.exp(self.log_abs_C2)


@dataclass(frozen=True)
class LinkBudget:
    """Link budget at one lens position.

    ``P_rx = h_p h_irs P_tx`` is the mean received power (unit-mean fading)
    and ``gamma = (h_p h_irs)^2 sigma_s2 / sigma_n2``.
    """

    h_p: float
    h_irs: float
    P_rx: float
    gamma: float
    regime: ValidityReport
    model: str


def gain_coeffs(scenario):
    """All constants of the lens-integrated gain.

    Raises
    ------
    ConfigurationError
        Propagated from :func:`~irsfso.analytic.analytic_coeffs`.
    """
    c = analytic_coeffs(scenario)
    k, dr = c.k, c.d_r
    b = scenario.beam
    a0 = scenario.lens_radius
    bx, by = c.b_x, c.b_y
    tbx = abs(bx) ** 2 / bx.real
    tby = abs(by) ** 2 / by.real
    dx = c.varphi_x - c.Phi_x
    dy = c.varphi_y - c.Phi_y
    rho_x = k * k / 2.0 * (c.c1 ** 2 / tbx + c.c3 ** 2 / tby)
    rho_y = k * k / 2.0 * (c.c2 ** 2 / tbx + c.c4 ** 2 / tby)
    rho_xy = k * k * (c.c1 * c.c2 / tbx + c.c3 * c.c4 / tby)
    varrho_x = k * k * (c.c1 * dx / tbx + c.c3 * dy / tby)
    varrho_y = k * k * (c.c2 * dx / tbx + c.c4 * dy / tby)
    eps = math.sqrt(math.pi) * a0 / 2.0

    # erf(sqrt(b) L + varpi) - erf(varpi) = exp(-q^2) D(sqrt(b) L / 2, q),
    # with q = varpi + sqrt(b) L / 2 the window centre at the lens corner.
    log_c2 = 0.0
    varpi = []
    for sb, L, delta, bhat, off, cc in (
            (np.sqrt(bx), c.L_x, dx, c.bhat_x, c.x0, c.c1 + c.c2),
            (np.sqrt(by), c.L_y, dy, c.bhat_y, c.y0, c.c3 + c.c4)):
        q = -1j * k / (2.0 * sb) * (delta - 2.0 * bhat * off + cc * a0)
        varpi.append(complex(q - sb * L / 2.0))
        D = scaled_erf_difference(sb * L / 2.0, q)
        if D == 0:
            log_c2 = -math.inf
        else:
            log_c2 += -(q * q).real + math.log(abs(D))

    log_pref = (2.0 * math.log(math.pi) + 2.0 * math.log(b.E0) + 2.0 * math.log(b.w0)
                + 2.0 * math.log(abs(c.sin_theta_r))
                - math.log(32.0 * scenario.medium.eta) - math.log(abs(bx)) - math.log(abs(by))
                - 2.0 * math.log(b.wavelength) - 2.0 * math.log(c.w_tilde) - 2.0 * math.log(dr))
    st2 = math.sin(scenario.source.theta) ** 2
    log_ch = (log_pref + 2.0 * log_c2
              - 2.0 * c.nu.real * (st2 * c.x0 ** 2 + c.y0 ** 2)
              - k * k / 2.0 * (dx * dx / tbx + dy * dy / tby))
    zeta = a0 * k / (2.0 * dr) * max(1.0 / math.sqrt(abs(bx)), 1.0 / math.sqrt(abs(by)))
    return GainCoefficients(
        epsilon=eps, tilde_b_x=tbx, tilde_b_y=tby,
        rho_x=rho_x, rho_y=rho_y, rho_xy=rho_xy, varrho_x=varrho_x, varrho_y=varrho_y,
        varpi_x=varpi[0], varpi_y=varpi[1], log_abs_C2=log_c2, log_C_h=log_ch,
        rho_1=varrho_y + eps * rho_xy, rho_2=varrho_y - eps * rho_xy,
        zeta=zeta, P_tx=transmit_power(scenario),
    )


def _prepare(scenario, check):
    if check:
        check_regime(scenario)
    g = gain_coeffs(scenario)
    if g.zeta > ZETA_WARN:
        warnings.warn(f"lens radius is large against the field scale (zeta = {g.zeta:.2g}); "
                      "the frozen erf window loses accuracy", stacklevel=3)
    return g


def channel_gain_out_of_plane(scenario, quad_tolerance=1e-9, *, check=True):
    """Gain for a lens at an arbitrary position.

    The inner (x) integral is closed form; the outer integral over
    ``y in [-epsilon, epsilon]`` uses adaptive Gauss-Kronrod quadrature.

    Parameters
    ----------
    scenario : Scenario
    quad_tolerance : float
        Relative tolerance of the outer quadrature.
    check : bool
        Enforce the closed-form regime (raises :class:`RegimeError`).

    Returns
    -------
    float
        Collected fraction of the transmitted power.

    Raises
    ------
    ConvergenceError
        If the quadrature misses ``quad_tolerance``.
    """
    if scenario.lens_radius == 0.0:
        return 0.0
    g = _prepare(scenario, check)
    if g.log_C_h == -math.inf:
        return 0.0
    sx = math.sqrt(g.rho_x)
    a = sx * g.epsilon

    def log_f(y):
        return (g.log_C_h - g.rho_y * y * y - g.varrho_y * y
                + log_erf_window(a, (g.rho_xy * y + g.varrho_x) / (2.0 * sx)))

    # scale by the integrand peak so the quadrature sees O(1) values
    ys = np.linspace(-g.epsilon, g.epsilon, 65)
    shift = max(log_f(y) for y in ys)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(lambda y: math.exp(log_f(y) - shift), -g.epsilon, g.epsilon,
                                      epsabs=0.0, epsrel=quad_tolerance, limit=200)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"gain quadrature did not reach rtol {quad_tolerance:g}: {exc}") from exc
    if not err <= max(quad_tolerance, 1e-14) * abs(val) * 10.0:
        raise ConvergenceError(f"gain quadrature error estimate {err:.3g} above tolerance")
    log_h = shift + math.log(val) + 0.5 * math.log(math.pi) - math.log(2.0 * sx)
    return math.exp(log_h) / g.P_tx


def channel_gain_in_plane(scenario, *, check=True):
    """Closed-form gain for a lens in the incidence plane (``phi_r = pi``).

    Raises
    ------
    ConfigurationError
        If the lens azimuth is not ``pi``.
    """
    if abs(math.cos(scenario.lens.phi) + 1.0) > 1e-12:
        raise ConfigurationError("in-plane gain needs phi_r = pi - phi_i = pi")
    if scenario.lens_radius == 0.0:
        return 0.0
    g = _prepare(scenario, check)
    if g.log_C_h == -math.inf:
        return 0.0
    sx, sy = math.sqrt(g.rho_x), math.sqrt(g.rho_y)
    log_h = (g.log_C_h + math.log(math.pi) - math.log(4.0 * sx * sy)
             + log_erf_window(sx * g.epsilon, g.varrho_x / (2.0 * sx))
             + log_erf_window(sy * g.epsilon, g.varrho_y / (2.0 * sy)))
    return math.exp(log_h) / g.P_tx


def channel_gain_far_field(scenario):
    """Gain predicted by the far-field (elliptical Gaussian) beam model.

    The far-field intensity ``I0 exp(-p x^2 - q y^2)`` is integrated
    exactly over the lens disc: the radial integral is closed form and the
    angular one is done by quadrature. No regime check is made; the model
    is meant to be compared against the others at any distance.
    """
    a0 = scenario.lens_radius
    if a0 == 0.0:
        return 0.0
    c = analytic_coeffs(scenario)
    E0 = anomalous_mirror_field_far(np.zeros(2), scenario, coeffs=c)
    I0 = abs(E0) ** 2 / (2.0 * scenario.medium.eta)
    si = abs(math.sin(scenario.source.theta))
    sr = abs(c.sin_theta_r)
    s = c.k ** 2 * c.w_tilde ** 2 / (2.0 * c.d_r ** 2)
    p, qy = s * sr ** 2 / si ** 2, s

    def ang(t):
        m = p * math.cos(t) ** 2 + qy * math.sin(t) ** 2
        return -math.expm1(-m * a0 * a0) / (2.0 * m)

    val, _ = integrate.quad(ang, 0.0, 2.0 * math.pi, epsabs=0.0, epsrel=1e-12, limit=200)
    return I0 * val / transmit_power(scenario)


def channel_gain(scenario, model="theorem2", *, tol=1e-9, quadrature=None):
    """Dispatch to one of :data:`GAIN_MODELS`."""
    if model == "theorem2":
        return channel_gain_out_of_plane(scenario, tol)
    if model == "inplane":
        return channel_gain_in_plane(scenario)
    if model == "farfield":
        return channel_gain_far_field(scenario)
    if model == "oracle":
        return channel_gain_oracle(scenario, quadrature or QuadratureSpec())
    raise ConfigurationError(f"unknown gain model {model!r}; choose from {', '.join(GAIN_MODELS)}")


def atmospheric_loss(kappa, d_i, d_r):
    """``10^(-kappa (d_i + d_r) / 10)`` with ``kappa`` in dB/m."""
    if kappa < 0.0:
        raise ConfigurationError("attenuation must be non-negative")
    return 10.0 ** (-kappa * (d_i + d_r) / 10.0)


def end_to_end_gain(h_p, h_irs, h_a):
    """Product ``h_p h_irs h_a``."""
    for name, v in (("h_p", h_p), ("h_irs", h_irs), ("h_a", h_a)):
        if np.any(np.asarray(v) < 0):
            raise ConfigurationError(f"{name} must be non-negative")
    return h_p * h_irs * h_a


def link_budget(scenario, model="theorem2", *, tol=1e-9, quadrature=None, convention="half_width"):
    """Atmospheric loss, geometric gain, received power and SNR term.

    Returns
    -------
    LinkBudget
    """
    h_p = atmospheric_loss(scenario.medium.kappa, scenario.source.d, scenario.lens.d)
    h_irs = channel_gain(scenario, model, tol=tol, quadrature=quadrature)
    return LinkBudget(
        h_p=h_p,
        h_irs=h_irs,
        P_rx=h_p * h_irs * transmit_power(scenario),
        gamma=scenario.noise.gamma(h_p, h_irs),
        regime=validity_distances(scenario, convention),
        model=model,
    )
