"""Gaussian-beam primitives and the incident field on the IRS plane.

Fields carry ``exp(-j phi)`` with ``phi = k z + k rho^2 / (2 R(z)) - atan(z/z0)``.
The diffraction kernel downstream uses ``exp(+j k r)``; the two conventions
are kept as they are written in the model so every closed form composes.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .geometry import FootprintCenter, SphericalPose

__all__ = [
    "BeamParams",
    "IncidentGeometry",
    "rayleigh_range",
    "beam_width",
    "curvature_radius",
    "gaussian_field",
    "incident_geometry",
    "incident_field_on_irs",
]

MIN_INCIDENCE = 1e-3  # rad; below this the footprint width diverges


@dataclass(frozen=True)
class BeamParams:
    """Gaussian beam at its waist.

    Attributes
    ----------
    wavelength : float
        Metres.
    w0 : float
        Waist radius (1/e field), metres. Must be at least 10 wavelengths;
        a warning is issued below 100.
    E0 : float
        Peak field at the waist, V/m.
    """

    wavelength: float = 1550e-9
    w0: float = 2.5e-3
    E0: float = 1000.0

    def __post_init__(self):
        for name in ("wavelength", "w0", "E0"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0.0:
                raise ConfigurationError(f"{name} must be positive, got {v!r}")
        if self.w0 < 10.0 * self.wavelength:
            raise ConfigurationError("waist below 10 wavelengths: paraxial model invalid")
        if self.w0 < 100.0 * self.wavelength:
            warnings.warn("waist below 100 wavelengths: paraxial accuracy degraded",
                          stacklevel=3)

    @property
    def k(self):
        return 2.0 * math.pi / self.wavelength


def rayleigh_range(b):
    """``z0 = pi w0^2 / lambda``."""
    return math.pi * b.w0 ** 2 / b.wavelength


def beam_width(z, b):
    """``w(z) = w0 sqrt(1 + (z/z0)^2)``."""
    z0 = rayleigh_range(b)
    return b.w0 * np.sqrt(1.0 + (np.asarray(z, dtype=float) / z0) ** 2)


def curvature_radius(z, b):
    """``R(z) = z (1 + (z0/z)^2)``; ``inf`` at the waist."""
    z0 = rayleigh_range(b)
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        r = np.where(z == 0.0, np.inf, z * (1.0 + (z0 / np.where(z == 0.0, 1.0, z)) ** 2))
    return float(r) if r.ndim == 0 else r


def gaussian_field(r_i, b):
    """Complex field of the beam in its own frame.

    Parameters
    ----------
    r_i : array_like, shape (..., 3)
        Source-frame coordinates, ``z_i > 0``.
    b : BeamParams

    Returns
    -------
    complex or ndarray of complex
    """
    r_i = np.asarray(r_i, dtype=float)
    x, y, z = r_i[..., 0], r_i[..., 1], r_i[..., 2]
    z0 = rayleigh_range(b)
    w = beam_width(z, b)
    rho2 = x * x + y * y
    with np.errstate(divide="ignore"):
        inv_r = np.where(z == 0.0, 0.0, z / (z * z + z0 * z0))
    phase = b.k * z + b.k * rho2 * inv_r / 2.0 - np.arctan(z / z0)
    out = b.E0 * b.w0 / w * np.exp(-rho2 / w ** 2) * np.exp(-1j * phase)
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class IncidentGeometry:
    """Source pose, footprint centre and the derived footprint quantities.

    Attributes
    ----------
    pose : SphericalPose
    footprint : FootprintCenter
    d_tilde : float
        ``d_i - x0 cos(theta_i)``, distance used for width, curvature and
        Gouy phase.
    w : float
        ``w(d_tilde)``.
    R : float
        ``R(d_tilde)``.
    w_x, w_y : float
        Elliptical footprint widths ``w / sin(theta_i)`` and ``w``.
    """

    pose: SphericalPose
    footprint: FootprintCenter
    d_tilde: float
    w: float
    R: float
    w_x: float
    w_y: float

    def d_hat(self, x):
        """Propagation distance ``d_i + (x - x0) cos(theta_i)`` to IRS point x."""
        return self.pose.d + (np.asarray(x, dtype=float) - self.footprint.x0) * math.cos(self.pose.theta)


def incident_geometry(p_i, r0, b):
    """Footprint quantities for a source at ``p_i`` aimed at ``r0``.

    Raises
    ------
    ConfigurationError
        For grazing incidence (``theta_i < 1e-3``) or a footprint centre
        that places ``d_tilde`` at or behind the source.
    """
    if p_i.theta < MIN_INCIDENCE or p_i.theta > math.pi - MIN_INCIDENCE:
        raise ConfigurationError("incidence elevation too close to grazing; footprint diverges")
    if p_i.phi != 0.0:
        raise ConfigurationError("source azimuth must be 0")
    d_tilde = p_i.d - r0.x0 * math.cos(p_i.theta)
    if d_tilde <= 0.0:
        raise ConfigurationError("footprint centre lies behind the source (d_tilde <= 0)")
    w = float(beam_width(d_tilde, b))
    return IncidentGeometry(
        pose=p_i,
        footprint=r0,
        d_tilde=d_tilde,
        w=w,
        R=float(curvature_radius(d_tilde, b)),
        w_x=w / math.sin(p_i.theta),
        w_y=w,
    )


def incident_field_on_irs(x, y, g, b, reference_distance=0.0):
    """Incident field at IRS-plane points ``(x, y, 0)``.

    The distance enters the propagation phase through ``d_hat`` and the
    width, curvature and Gouy terms through ``d_tilde``; transverse offsets
    are ``x_hat = sin(theta_i)(x - x0)`` and ``y_hat = y - y0``.

    Parameters
    ----------
    x, y : array_like
        Global IRS-plane coordinates, broadcast together.
    g : IncidentGeometry
    b : BeamParams
    reference_distance : float, optional
        Subtracted from ``d_hat`` before multiplying by k. Callers that
        only need relative phases pass ``d_i`` to keep the phase small.

    Returns
    -------
    ndarray of complex
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    st = math.sin(g.pose.theta)
    xh = st * (x - g.footprint.x0)
    yh = y - g.footprint.y0
    rho2 = xh * xh + yh * yh
    z0 = rayleigh_range(b)
    phase = (b.k * (g.d_hat(x) - reference_distance) + b.k * rho2 / (2.0 * g.R)
             - math.atan(g.d_tilde / z0))
    out = b.E0 * b.w0 / g.w * np.exp(-rho2 / g.w ** 2 - 1j * phase)
    return complex(out) if np.ndim(out) == 0 else out
