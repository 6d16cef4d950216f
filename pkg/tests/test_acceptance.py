"""Acceptance criteria of the channel model, one PASS/FAIL line each.

Tolerances are the published acceptance bounds; nothing here is relaxed
to make a criterion pass. The lines are printed at the end of the pytest
run ("acceptance criteria" section).
"""

import math
import os
import subprocess
import sys
import time
import warnings

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from _oracles import erf_taylor
from conftest import collimated_scenario, scaled_scenario
from irsfso import default_scenario
from irsfso.analytic import (anomalous_mirror_field_far, mirror_beam_width, mirror_field_far,
                             reflected_field_analytic, validity_distances)
from irsfso.fading_ber import ber_monte_carlo, ber_series
from irsfso.gain import (atmospheric_loss, channel_gain, channel_gain_in_plane,
                         channel_gain_out_of_plane)
from irsfso.oracle import QuadratureSpec, power_density, reflected_field_hf_lens
from irsfso.special_fn import erf_complex, ln_gamma

SWEEP = np.linspace(1000.0, 10000.0, 19)
#: Oracle gain over SWEEP (21 x 21 lens rule, phase-step grids), frozen once.
SWEEP_ORACLE_GAIN = [
    0.044406383137178415, 0.0033192885070587427, 0.0018094060832385247, 0.0013353907721402054,
    0.001057505756517689, 0.0009253217587385308, 0.0009836869488840869, 0.001247354722580755,
    0.0010921031124974123, 0.001312619881086178, 0.0031538684125793377, 0.004371717274615928,
    0.004065029631680169, 0.002838853984708821, 0.0016310817421382043, 0.0008413244635329879,
    0.00043440991963653817, 0.00026479190057340774, 0.00021368673474390974,
]


def _profile(s, axis, coords):
    pts = np.zeros((coords.size, 2))
    pts[:, axis] = coords
    eta = s.medium.eta
    ana = power_density(reflected_field_analytic(pts, s), eta)
    ora = power_density(reflected_field_hf_lens(pts, s), eta)
    return ana, ora


def _widths(s, axis):
    """Fitted and directly read 1/e^2 intensity radii on [-1, 1] m (401 points).

    The fit is a Gaussian least-squares fit; its covariance is not used.
    """
    x = np.linspace(-1.0, 1.0, 401)
    pts = np.zeros((x.size, 2))
    pts[:, axis] = x
    intensity = np.abs(reflected_field_analytic(pts, s)) ** 2
    intensity /= intensity.max()
    g = lambda t, a, mu, w: a * np.exp(-2.0 * (t - mu) ** 2 / w ** 2)  # noqa: E731
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OptimizeWarning)
        p, _ = curve_fit(g, x, intensity, p0=(1.0, 0.0, 0.3))
    inside = x[intensity >= math.exp(-2)]
    return abs(p[2]), (inside.max() - inside.min()) / 2


def test_c1_lens_plane_profiles(verdict):
    s = default_scenario()
    x = np.linspace(-1.0, 1.0, 41)
    t0 = time.perf_counter()
    checks = []
    widths = {}
    for axis, name, published in ((0, "x_r", 0.20), (1, "y_r", 0.76)):
        ana, ora = _profile(s, axis, x)
        err = float(np.max(np.abs(ana - ora) / ora))
        checks.append((f"{name} profile max rel err {err:.2e} < 1e-2", err < 1e-2))
        widths[name] = (_widths(s, axis), published)
    elapsed = time.perf_counter() - t0
    for name, ((w, direct), published) in widths.items():
        checks.append((f"{name} fitted width {w:.3f} m (1/e^2 crossing {direct:.3f} m) "
                       f"vs {published:.2f} m +-5%", abs(w / published - 1) <= 0.05))
    checks.append((f"runtime {elapsed:.1f} s <= 600 s", elapsed <= 600))

    # smoke version: the link scaled down 100x in distance (2 cm IRS, 10 m / 20 m
    # legs); +-3 cm reaches 1e-4 of the peak, as +-1 m does at full scale
    t0 = time.perf_counter()
    sc = scaled_scenario()
    xs = np.linspace(-0.03, 0.03, 41)
    worst = max(float(np.max(np.abs(a - o) / o)) for a, o in (_profile(sc, ax, xs) for ax in (0, 1)))
    smoke = time.perf_counter() - t0
    checks.append((f"scaled smoke max rel err {worst:.2e} < 1e-2 in {smoke:.2f} s < 5 s",
                   worst < 1e-2 and smoke < 5.0))
    verdict("C1 lens-plane profiles and widths", checks)


def test_c2_validity_distances(verdict):
    s = default_scenario()
    half = validity_distances(s, "half_width")
    full = validity_distances(s, "full_width")
    verdict("C2 validity distances", [
        (f"d_n(half) = {half.d_n:.3f} m vs 9.4 +- 0.1", abs(half.d_n - 9.4) <= 0.1),
        (f"d_f(full) = {full.d_f / 1e3:.3f} km vs 32.7 +- 0.2", abs(full.d_f - 32.7e3) <= 0.2e3),
        (f"d_f(half) = {half.d_f / 1e3:.3f} km vs 7.95", abs(half.d_f - 7.95e3) <= 5.0),
    ])


def _far_gap(s, far_fn):
    s = s.with_lens_distance(100.0 * validity_distances(s, "half_width").d_f)
    w = mirror_beam_width(s)
    si, sr = math.sin(s.source.theta), math.sin(s.lens.theta)
    X, Y = np.meshgrid(np.linspace(-2 * w * si / sr, 2 * w * si / sr, 41), np.linspace(-2 * w, 2 * w, 41))
    P = np.stack([X, Y], axis=-1)
    a = np.abs(reflected_field_analytic(P, s))
    f = np.abs(far_fn(P, s))
    core = a >= a.max() * math.exp(-1)
    return float(np.max(np.abs(a - f)) / a.max()), float(np.max(np.abs(a - f)[core] / a[core]))


def test_c3_far_field_limits(verdict):
    checks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for label, s, fn in (
                ("mirror", collimated_scenario(math.pi / 3, math.pi / 3), mirror_field_far),
                ("anomalous", collimated_scenario(math.pi / 4, math.pi / 3), anomalous_mirror_field_far)):
            gap, core = _far_gap(s, fn)
            checks.append((f"{label}: max |d|E||/max|E| = {gap:.3%} <= 0.5% (inside 1/e: {core:.3%})",
                           gap <= 5e-3))
    verdict("C3 far-field limits at 100 d_f", checks)


def test_c4_gain_consistency(verdict):
    sc = scaled_scenario()
    ref = default_scenario()
    t_sc, o_sc = channel_gain_out_of_plane(sc), channel_gain(sc, "oracle")
    t_ref = channel_gain_out_of_plane(ref)
    o_ref = channel_gain(ref, "oracle", quadrature=QuadratureSpec(lens_grid=(21, 21)))
    ip = [abs(channel_gain_in_plane(s) / channel_gain_out_of_plane(s) - 1) for s in (sc, ref)]
    verdict("C4 gain consistency", [
        (f"scaled: closed form / oracle - 1 = {t_sc / o_sc - 1:+.2%}", abs(t_sc / o_sc - 1) < 0.02),
        (f"reference (21x21 lens): {t_ref / o_ref - 1:+.2%}", abs(t_ref / o_ref - 1) < 0.02),
        (f"in-plane vs out-of-plane max rel {max(ip):.1e} < 1e-6", max(ip) < 1e-6),
    ])


def test_c5_ber_sweep_shape(verdict):
    s = default_scenario()
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for d in SWEEP:
            sd = s.with_lens_distance(float(d))
            h_p = atmospheric_loss(sd.medium.kappa, sd.source.d, sd.lens.d)
            h_t = channel_gain(sd, "theorem2")
            h_f = channel_gain(sd, "farfield")
            h_o = channel_gain(sd, "oracle")
            pe = [ber_series(sd.noise.gamma(h_p, h), sd.turbulence).value for h in (h_t, h_o)]
            rows.append((h_t, h_f, h_o, pe[0], pe[1]))
    h_t, h_f, h_o, pe_t, pe_o = map(np.array, zip(*rows))
    d_f = validity_distances(s, "full_width").d_f
    ratio = h_f / h_t
    drift = float(np.max(np.abs(h_o / np.array(SWEEP_ORACLE_GAIN) - 1)))
    verdict("C5 BER versus d_r", [
        ("BER non-decreasing (closed form)", bool(np.all(np.diff(pe_t) >= 0))),
        ("BER non-decreasing (oracle)", bool(np.all(np.diff(pe_o) >= 0))),
        (f"far-field / closed-form gain >= {ratio.min():.0f}x at all d_r <= {SWEEP[-1] / d_f:.2f} d_f",
         bool(np.all(ratio > 10.0)) and SWEEP[-1] < d_f),
        (f"oracle gains reproduce frozen values (max drift {drift:.1e} < 1e-6)", drift < 1e-6),
        (f"closed form vs oracle gain gap up to {np.max(np.abs(h_t / h_o - 1)):.0%} (reported)", True),
    ])


def test_c6_series_against_monte_carlo(verdict):
    from irsfso import GammaGammaParams
    p = GammaGammaParams(2.1, 2.0)
    checks = []
    t0 = time.perf_counter()
    for g in (1e8, 1e9, 1e10, 1e11, 1e12):
        s = ber_series(g, p).value
        mc = ber_monte_carlo(g, p, 10 ** 7, seed=2024)
        z = abs(s - mc.estimate) / mc.std_error
        checks.append((f"gamma={g:.0e}: {z:.2f} sigma", z <= 3.0))
    elapsed = time.perf_counter() - t0
    checks.append((f"runtime {elapsed:.1f} s < 60 s", elapsed < 60.0))
    verdict("C6 BER series vs Monte Carlo (1e7 samples)", checks)


def test_c7_special_functions(verdict):
    rng = np.random.default_rng(20)
    z = 6.0 * np.sqrt(rng.uniform(size=200)) * np.exp(2j * np.pi * rng.uniform(size=200))
    ref = np.array([erf_taylor(complex(v)) for v in z])
    err = float(np.max(np.abs(erf_complex(z) - ref) / np.abs(ref)))
    xs = rng.uniform(0.5, 10.0, 200)
    rec = max(abs(ln_gamma(x + 1) - math.log(x) - ln_gamma(x)) / max(1.0, abs(ln_gamma(x + 1))) for x in xs)
    xr = rng.uniform(-9.9, 9.9, 200)
    xr = xr[np.abs(xr - np.round(xr)) > 1e-3]
    refl = max(abs(ln_gamma(x) + ln_gamma(1 - x) - math.log(math.pi / abs(math.sin(math.pi * x))))
               / max(1.0, abs(ln_gamma(x))) for x in xr)
    verdict("C7 special functions", [
        (f"erf 200-point grid |z|<=6 max rel err {err:.1e} <= 1e-12", err <= 1e-12),
        (f"ln_gamma recurrence {rec:.1e} <= 1e-10", rec <= 1e-10),
        (f"ln_gamma reflection {refl:.1e} <= 1e-10", refl <= 1e-10),
    ])


def _cli(args, tmp, name):
    out = os.path.join(tmp, name)
    subprocess.run([sys.executable, "-m", "irsfso", *args, "--out", out], check=True,
                   capture_output=True)
    with open(out, "rb") as fh:
        return fh.read()


def test_c8_cli_determinism(verdict, tmp_path):
    runs = {
        "validate": ["validate"],
        "field-profile": ["field-profile", "--n", "21", "--model", "analytic", "oracle"],
        "gain": ["gain", "--model", "theorem2", "inplane", "farfield", "oracle"],
        "gain-sweep": ["gain-sweep", "--n", "6", "--model", "theorem2", "oracle"],
        "ber-sweep": ["ber-sweep", "--n", "6", "--mc-samples", "200000"],
    }
    checks = []
    for verb, args in runs.items():
        outs = [_cli(args + ["--threads", t], str(tmp_path), f"{verb}-{i}-{t}")
                for i, t in enumerate(("1", "1", "4"))]
        checks.append((verb, outs[0] == outs[1] == outs[2]))
    verdict("C8 CLI bit-identical across runs and --threads", checks)
