"""Brute-force Huygens-Fresnel evaluation of the reflected field and gain.

The reflected field at a global point ``r_p`` is the surface integral

    E(r_p) = 1/(j lambda) * integral E_i(x, y) exp(j k (Phi_x x + Phi_y y))
             exp(j k |r_op|) / |r_op| * z_p / |r_op| dx dy

over the IRS rectangle, evaluated with composite Simpson rules in both
axes. The constant phase ``k (d_p - d_i)`` is pulled out of the sum so the
kernel only sees the small residual ``|r_op| - d_p``.

Grid sizes come from a phase-step rule: adjacent samples may differ in
total integrand phase by at most ``max_phase_step`` and the footprint must
be resolved by at least eight samples per beam radius.
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .beam import incident_field_on_irs
from .errors import ConfigurationError, ResolutionError
from .geometry import lens_frame_to_global

__all__ = [
    "QuadratureSpec",
    "FieldProfile",
    "transmit_power",
    "power_density",
    "phase_gradient_bound",
    "resolve_irs_grid",
    "reflected_field_hf",
    "reflected_field_hf_lens",
    "received_power_oracle",
    "channel_gain_oracle",
]

#: Beyond this lens distance the ``auto`` phase mode uses the expansion.
EXPANDED_ABOVE = 100.0
#: Samples per axis above which a grid is refused as impractical.
MAX_AXIS_SAMPLES = 40_001
#: Total IRS samples above which a grid is refused (about 1.6 GB of weights).
MAX_GRID_SAMPLES = 100_000_000
_SCAN = 33


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretisation of the diffraction integral and of the lens aperture.

    Attributes
    ----------
    irs_grid : (int, int) or None
        Simpson samples along x and y (odd). ``None`` sizes the grid from
        the phase-step rule; explicit grids are checked against it.
    lens_grid : (int, int)
        ``(n_radial, n_angular)`` nodes of the polar aperture rule:
        Gauss-Legendre in radius, uniform in angle.
    phase_mode : {"auto", "exact", "expanded"}
        ``exact`` evaluates ``|r_op|`` directly; ``expanded`` keeps terms up
        to second order in the IRS coordinates. ``auto`` picks ``expanded``
        for ``d_r > 100 m``.
    max_phase_step : float
        Largest phase change between neighbouring samples, rad.
    num_threads : int or None
        Worker threads of the compiled kernel. Results do not depend on it.
    """

    irs_grid: tuple | None = None
    lens_grid: tuple = (21, 21)
    phase_mode: str = "auto"
    max_phase_step: float = math.pi / 8
    num_threads: int | None = None

    def __post_init__(self):
        if self.phase_mode not in ("auto", "exact", "expanded"):
            raise ConfigurationError(f"unknown phase mode {self.phase_mode!r}")
        if not (0.0 < self.max_phase_step <= math.pi / 2):
            raise ConfigurationError("max_phase_step must lie in (0, pi/2]")
        if self.irs_grid is not None:
            nx, ny = self.irs_grid
            if nx < 3 or ny < 3 or nx % 2 == 0 or ny % 2 == 0:
                raise ConfigurationError("IRS grid counts must be odd and at least 3")
        nr, nt = self.lens_grid
        if nr < 1 or nt < 1:
            raise ConfigurationError("lens grid counts must be positive")
        if self.num_threads is not None and self.num_threads < 1:
            raise ConfigurationError("num_threads must be positive")

    def threads(self):
        if self.num_threads is not None:
            return int(self.num_threads)
        return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)

    def mode_for(self, scenario):
        if self.phase_mode == "auto":
            return "expanded" if scenario.lens.d > EXPANDED_ABOVE else "exact"
        return self.phase_mode


@dataclass(frozen=True)
class FieldProfile:
    """Complex field samples along one lens-plane axis."""

    plane: str
    axis: str
    coords: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords)
        if c.size > 1 and not np.all(np.diff(c) > 0):
            raise ValueError("profile coordinates must be strictly increasing")


def transmit_power(scenario):
    """Total beam power ``pi E0^2 w0^2 / (4 eta)``, W."""
    b = scenario.beam
    return math.pi * b.E0 ** 2 * b.w0 ** 2 / (4.0 * scenario.medium.eta)


def power_density(E, eta):
    """``|E|^2 / (2 eta)``, W/m^2."""
    return np.abs(E) ** 2 / (2.0 * eta)


def _simpson_weights(n, h):
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def phase_gradient_bound(scenario, r_p):
    """Largest ``|d psi/dx|`` and ``|d psi/dy|`` over the IRS, rad/m.

    ``psi`` is the total integrand phase: propagation to ``r_p``, incident
    beam phase and IRS gradient. Evaluated on a 33 x 33 scan of the IRS for
    every observation point.
    """
    r_p = np.asarray(r_p, dtype=float).reshape(-1, 3)
    g = scenario.incident()
    k = scenario.k
    Lx, Ly = scenario.irs.Lx, scenario.irs.Ly
    Phi_x, Phi_y = scenario.phase_gradients()
    ti = scenario.source.theta
    x = np.linspace(-Lx / 2, Lx / 2, _SCAN)[:, None, None]
    y = np.linspace(-Ly / 2, Ly / 2, _SCAN)[None, :, None]
    xp, yp, zp = r_p[:, 0], r_p[:, 1], r_p[:, 2]
    rop = np.sqrt((x - xp) ** 2 + (y - yp) ** 2 + zp ** 2)
    inv_R = 0.0 if math.isinf(g.R) else 1.0 / g.R
    gx = k * np.abs((x - xp) / rop + Phi_x - math.cos(ti)
                    - math.sin(ti) ** 2 * (x - g.footprint.x0) * inv_R)
    gy = k * np.abs((y - yp) / rop + Phi_y - (y - g.footprint.y0) * inv_R)
    return float(gx.max()), float(gy.max())


def resolve_irs_grid(scenario, r_p, q):
    """Simpson sample counts meeting the phase-step and footprint rules.

    Raises
    ------
    ResolutionError
        When an explicit ``q.irs_grid`` is coarser than required, or the
        required grid exceeds ``MAX_AXIS_SAMPLES`` per axis.
    """
    gx, gy = phase_gradient_bound(scenario, r_p)
    g = scenario.incident()
    Lx, Ly = scenario.irs.Lx, scenario.irs.Ly
    hx = min(q.max_phase_step / gx if gx > 0 else math.inf, g.w_x / 8.0)
    hy = min(q.max_phase_step / gy if gy > 0 else math.inf, g.w_y / 8.0)
    need = []
    for L, h in ((Lx, hx), (Ly, hy)):
        n = max(3, int(math.ceil(L / h)) + 1)
        need.append(n + 1 if n % 2 == 0 else n)
    if q.irs_grid is None:
        if max(need) > MAX_AXIS_SAMPLES or need[0] * need[1] > MAX_GRID_SAMPLES:
            raise ResolutionError(
                f"phase-step rule needs {need[0]} x {need[1]} IRS samples, above the "
                f"{MAX_AXIS_SAMPLES} per-axis or {MAX_GRID_SAMPLES} total limit")
        return tuple(need)
    nx, ny = q.irs_grid
    if nx < need[0] or ny < need[1]:
        raise ResolutionError(
            f"IRS grid {nx} x {ny} under-resolves the integrand phase; at least "
            f"{need[0]} x {need[1]} samples are needed for steps below {q.max_phase_step:.3g} rad")
    return (int(nx), int(ny))


def _surface_amplitudes(scenario, n):
    b = scenario.beam
    g = scenario.incident()
    Lx, Ly = scenario.irs.Lx, scenario.irs.Ly
    Phi_x, Phi_y = scenario.phase_gradients()
    xs = np.linspace(-Lx / 2, Lx / 2, n[0])
    ys = np.linspace(-Ly / 2, Ly / 2, n[1])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Ei = incident_field_on_irs(X, Y, g, b, reference_distance=scenario.source.d)
    A = Ei * np.exp(1j * b.k * (Phi_x * X + Phi_y * Y))
    A *= np.outer(_simpson_weights(n[0], xs[1] - xs[0]), _simpson_weights(n[1], ys[1] - ys[0]))
    return A, xs, ys


def reflected_field_hf(r_p, scenario, q=None):
    """Reflected field at global points by direct quadrature.

    Parameters
    ----------
    r_p : array_like, shape (3,) or (m, 3)
        Observation points in the global frame, ``z_p > 0``.
    scenario : Scenario
    q : QuadratureSpec, optional

    Returns
    -------
    complex or ndarray of complex, shape (m,)

    Raises
    ------
    ResolutionError
        For a grid that under-resolves the integrand.
    """
    q = q or QuadratureSpec()
    pts = np.asarray(r_p, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, 3)
    if np.any(pts[:, 2] <= 0.0):
        raise ConfigurationError("observation points must lie in front of the IRS (z > 0)")
    n = resolve_irs_grid(scenario, pts, q)
    A, xs, ys = _surface_amplitudes(scenario, n)
    k = scenario.k
    mode = 0 if q.mode_for(scenario) == "exact" else 1
    s = kernels.hf_field(A, xs, ys, pts, k, mode, q.threads())
    dp = np.sqrt(np.sum(pts ** 2, axis=1))
    lam = scenario.beam.wavelength
    # exp(j k (d_p - d_i)), reduced modulo 2 pi before exponentiation
    phase = np.fmod(k * (dp - scenario.source.d), 2.0 * math.pi)
    out = np.exp(1j * phase) * s / (1j * lam)
    return complex(out[0]) if single else out


def reflected_field_hf_lens(r_r, scenario, q=None):
    """:func:`reflected_field_hf` at lens-frame points ``(x_r, y_r[, 0])``."""
    r_r = np.asarray(r_r, dtype=float)
    if r_r.shape[-1] == 2:
        r_r = np.concatenate([r_r, np.zeros(r_r.shape[:-1] + (1,))], axis=-1)
    glob = lens_frame_to_global(r_r, scenario.lens, scenario.footprint)
    return reflected_field_hf(glob, scenario, q)


def _aperture_rule(a0, lens_grid):
    nr, nt = lens_grid
    t, wt = np.polynomial.legendre.leggauss(nr)
    r = 0.5 * a0 * (t + 1.0)
    wr = 0.5 * a0 * wt * r
    th = 2.0 * math.pi * np.arange(nt) / nt
    R, T = np.meshgrid(r, th, indexing="ij")
    pts = np.stack([R * np.cos(T), R * np.sin(T)], axis=-1).reshape(-1, 2)
    w = np.repeat(wr * (2.0 * math.pi / nt), nt)
    return pts, w


def received_power_oracle(scenario, q=None):
    """Power through the circular lens aperture, W.

    Polar rule on the disc of radius ``scenario.lens_radius``: Gauss-Legendre
    in radius, equispaced (spectrally accurate for periodic integrands) in
    angle.
    """
    q = q or QuadratureSpec()
    a0 = scenario.lens_radius
    if a0 == 0.0:
        return 0.0
    pts, w = _aperture_rule(a0, q.lens_grid)
    E = reflected_field_hf_lens(pts, scenario, q)
    return float(np.sum(w * power_density(E, scenario.medium.eta)))


def channel_gain_oracle(scenario, q=None):
    """Fraction of the transmitted power collected by the lens.

    :func:`received_power_oracle` divided by :func:`transmit_power`.
    """
    return received_power_oracle(scenario, q) / transmit_power(scenario)
