"""Rotations and frame transforms between the IRS, source and lens frames.

The global frame has the IRS in the ``z = 0`` plane. Poses are spherical:
``theta`` is the elevation measured from the IRS plane, so ``theta = pi/2``
points along the surface normal, and ``phi`` is the azimuth from the x axis.

Source frame
    ``r_i = R_y(pi/2 - theta_i) (r - r0) + (0, 0, d_i)``. The footprint
    centre lands at ``(0, 0, d_i)`` and an IRS point ``(x, y, 0)`` has
    ``z_i = d_i + (x - x0) cos(theta_i)``, the propagation distance used by
    the incident-field expression.

Lens frame
    ``r_p = r0 + M(theta_r, phi_r) (r_r + (0, 0, d_r))`` where ``M`` is the
    transpose of ``R_y(pi/2 - theta_r) R_z(-phi_r)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "SphericalPose",
    "FootprintCenter",
    "rotation_z",
    "rotation_y",
    "source_rotation",
    "lens_rotation",
    "global_to_ls_frame",
    "ls_frame_to_global",
    "lens_frame_to_global",
    "global_to_lens_frame",
]


@dataclass(frozen=True)
class SphericalPose:
    """Position relative to the footprint centre.

    Attributes
    ----------
    d : float
        Distance in metres, > 0.
    theta : float
        Elevation from the IRS plane in radians, in (0, pi).
    phi : float
        Azimuth in radians.
    """

    d: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.d) or self.d <= 0.0:
            raise ConfigurationError(f"pose distance must be positive, got {self.d!r}")
        if not (0.0 < self.theta < np.pi):
            raise ConfigurationError(f"pose elevation must lie in (0, pi), got {self.theta!r}")
        if not np.isfinite(self.phi):
            raise ConfigurationError("pose azimuth must be finite")


@dataclass(frozen=True)
class FootprintCenter:
    """Centre ``(x0, y0)`` of the beam footprint on the IRS plane, metres."""

    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.x0) and np.isfinite(self.y0)):
            raise ConfigurationError("footprint centre must be finite")

    @property
    def vector(self):
        return np.array([self.x0, self.y0, 0.0])


def rotation_z(phi):
    """Counter-clockwise rotation by ``phi`` about z: [[c, s, 0], [-s, c, 0], [0, 0, 1]]."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_y(phi):
    """Counter-clockwise rotation by ``phi`` about y: [[c, 0, -s], [0, 1, 0], [s, 0, c]]."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def _require_zero_azimuth(pose):
    if pose.phi != 0.0:
        raise ConfigurationError(
            "source azimuth must be 0; the incident-field model is derived for "
            f"phi_i = 0 (got {pose.phi!r}); rotate the scene instead")


def source_rotation(theta_i):
    """Rotation taking global offsets to source-frame axes."""
    return rotation_y(np.pi / 2.0 - theta_i)


def lens_rotation(theta_r, phi_r):
    """Matrix ``M`` whose columns are the lens-frame axes in global coordinates."""
    ct, st = np.cos(theta_r), np.sin(theta_r)
    cp, sp = np.cos(phi_r), np.sin(phi_r)
    return np.array([
        [cp * st, sp, cp * ct],
        [-sp * st, cp, -sp * ct],
        [-ct, 0.0, st],
    ])


def global_to_ls_frame(r, p_i, r0):
    """Map global points to the laser-source frame.

    Parameters
    ----------
    r : array_like, shape (..., 3)
    p_i : SphericalPose
        Source pose; its azimuth must be 0.
    r0 : FootprintCenter

    Returns
    -------
    ndarray, shape (..., 3)
    """
    _require_zero_azimuth(p_i)
    rot = source_rotation(p_i.theta)
    rel = np.asarray(r, dtype=float) - r0.vector
    return rel @ rot.T + np.array([0.0, 0.0, p_i.d])


def ls_frame_to_global(r_i, p_i, r0):
    """Inverse of :func:`global_to_ls_frame`."""
    _require_zero_azimuth(p_i)
    rot = source_rotation(p_i.theta)
    rel = np.asarray(r_i, dtype=float) - np.array([0.0, 0.0, p_i.d])
    return rel @ rot + r0.vector


def lens_frame_to_global(r_r, p_r, r0):
    """Global coordinates of lens-plane points.

    Parameters
    ----------
    r_r : array_like, shape (..., 3)
        Points in the lens frame; the lens plane is ``z_r = 0``.
    p_r : SphericalPose
    r0 : FootprintCenter

    Returns
    -------
    ndarray, shape (..., 3)
    """
    m = lens_rotation(p_r.theta, p_r.phi)
    loc = np.asarray(r_r, dtype=float) + np.array([0.0, 0.0, p_r.d])
    return loc @ m.T + r0.vector


def global_to_lens_frame(r, p_r, r0):
    """Inverse of :func:`lens_frame_to_global`."""
    m = lens_rotation(p_r.theta, p_r.phi)
    rel = np.asarray(r, dtype=float) - r0.vector
    return rel @ m - np.array([0.0, 0.0, p_r.d])
