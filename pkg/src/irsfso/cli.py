"""Command-line front end.

Every verb reads an optional scenario document (YAML or JSON; a CSV written
by this tool is accepted too, its embedded scenario is reused) and writes
CSV whose first line is ``# {json}`` metadata: tool version, verb, result
affecting arguments and the fully resolved scenario.

Exit status: 0 success, 2 usage, 3 schema or configuration, 4 regime,
5 convergence or resolution.
"""

import argparse
import io
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import yaml

from . import __version__
from ._backend import BACKEND
from .analytic import (anomalous_mirror_field_far, check_regime, mirror_field_far,
                       reflected_field_analytic, validity_distances)
from .errors import (ConfigurationError, ConvergenceError, IrsFsoError, PoleError,
                     RegimeError, SchemaError)
from .fading_ber import ber_monte_carlo, ber_series
from .gain import GAIN_MODELS, atmospheric_loss, channel_gain, gain_coeffs
from .oracle import QuadratureSpec, power_density, reflected_field_hf_lens, transmit_power
from .scenario import default_scenario, scenario_from_mapping, scenario_to_mapping

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_REGIME, EXIT_CONVERGENCE = 0, 2, 3, 4, 5

FIELD_MODELS = ("analytic", "oracle", "farfield-mirror", "farfield-anomalous")

#: Arguments that change how, not what, is computed; kept out of headers.
_EXECUTION_ONLY = {"threads", "out", "func", "scenario", "verb", "parser"}


# ---------------------------------------------------------------- scenario io

def load_scenario(path):
    """Scenario from a YAML/JSON document or a CSV written by this tool."""
    if path is None:
        return default_scenario()
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if first.startswith("# {"):
        meta = json.loads(first[2:])
        return scenario_from_mapping(meta["scenario"])
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError(f"{path}: not valid YAML/JSON ({exc})") from exc
    return scenario_from_mapping(doc)


def _fmt(v):
    if isinstance(v, str):
        return v
    return repr(float(v))


def write_table(out, meta, columns, rows):
    """CSV with a ``# {json}`` header line; floats written round-trip exact."""
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _meta(args, scenario):
    opts = {k: v for k, v in vars(args).items() if k not in _EXECUTION_ONLY}
    return {
        "tool": "irsfso",
        "version": __version__,
        "verb": args.verb,
        "args": opts,
        "scenario": scenario_to_mapping(scenario),
    }


def _quadrature(args):
    return QuadratureSpec(lens_grid=tuple(args.lens_grid), num_threads=args.threads)


def _ordered_map(fn, items, threads):
    """Evaluate ``fn`` over ``items``; results come back in input order."""
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _grid(args, start, stop, n):
    if n < 1:
        args.parser.error("need at least one sample")
    if not (math.isfinite(start) and math.isfinite(stop)) or stop < start:
        args.parser.error("range must be finite with START <= STOP")
    if n == 1:
        return np.array([0.5 * (start + stop)])
    if stop == start:
        args.parser.error("empty range: START equals STOP with more than one sample")
    return np.linspace(start, stop, n)


# ---------------------------------------------------------------- verbs

def cmd_validate(args):
    s = load_scenario(args.scenario)
    g = s.incident()
    half = validity_distances(s, "half_width")
    full = validity_distances(s, "full_width")
    chosen = half if args.convention == "half" else full
    report = {
        "d_r": s.lens.d,
        "footprint_w_x": g.w_x,
        "footprint_w_y": g.w_y,
        "d_n_half_width": half.d_n,
        "d_f_half_width": half.d_f,
        "d_n_full_width": full.d_n,
        "d_f_full_width": full.d_f,
        "convention": chosen.convention,
        "regime": chosen.regime,
        "closed_form_valid": chosen.theorem_valid,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"meta": _meta(args, s), "report": report}, fh, indent=2, sort_keys=True)
    lines = [
        f"footprint widths   w_x = {g.w_x:.4g} m, w_y = {g.w_y:.4g} m",
        f"half-width extents d_n = {half.d_n:.4g} m, d_f = {half.d_f / 1e3:.4g} km",
        f"full-width extents d_n = {full.d_n:.4g} m, d_f = {full.d_f / 1e3:.4g} km",
        f"lens distance      d_r = {s.lens.d:.6g} m",
        f"regime ({chosen.convention}): {chosen.regime}",
        "closed-form field: " + ("valid" if chosen.theorem_valid
                                 else "INVALID (d_r below 20 x max(a0, Lx, Ly, d_n))"),
    ]
    print("\n".join(lines))
    return EXIT_OK


def _profile_column(model, pts, s, args):
    eta = s.medium.eta
    if model == "analytic":
        E = reflected_field_analytic(pts, s)
    elif model == "oracle":
        E = reflected_field_hf_lens(pts, s, _quadrature(args))
    elif model == "farfield-mirror":
        E = mirror_field_far(pts, s)
    else:
        E = anomalous_mirror_field_far(pts, s)
    return power_density(np.atleast_1d(E), eta)


def cmd_field_profile(args):
    s = load_scenario(args.scenario)
    t = _grid(args, args.range[0], args.range[1], args.n)
    pts = np.zeros((t.size, 2))
    pts[:, 0 if args.axis == "xr" else 1] = t
    cols = [_profile_column(m, pts, s, args) for m in args.model]
    names = [args.axis + "_m"] + ["I_" + m.replace("-", "_") + "_W_m2" for m in args.model]
    rows = [[t[i]] + [c[i] for c in cols] for i in range(t.size)]
    write_table(args.out, _meta(args, s), names, rows)
    return EXIT_OK


def _gain_row(s, model, args):
    return channel_gain(s, model, tol=args.tol, quadrature=_quadrature(args))


def cmd_gain(args):
    s = load_scenario(args.scenario)
    if any(m in ("theorem2", "inplane", "oracle") for m in args.model):
        check_regime(s)
    P_tx = transmit_power(s)
    h_p = atmospheric_loss(s.medium.kappa, s.source.d, s.lens.d)
    zeta = gain_coeffs(s).zeta
    rows = []
    for m in args.model:
        h = _gain_row(s, m, args)
        rows.append([m, h, h * P_tx, h_p, zeta])
    write_table(args.out, _meta(args, s), ["model", "h_irs", "P_collected_W", "h_p", "zeta"], rows)
    return EXIT_OK


def _sweep_points(args):
    return _grid(args, args.dr_range[0], args.dr_range[1], args.n)


def _sweep_eval(s, d_r, args, with_ber):
    sd = s.with_lens_distance(float(d_r))
    h_p = atmospheric_loss(sd.medium.kappa, sd.source.d, sd.lens.d)
    row = [d_r, h_p]
    for m in args.model:
        h = _gain_row(sd, m, args)
        row.append(h)
        if with_ber:
            gamma = sd.noise.gamma(h_p, h)
            row.extend([gamma, ber_series(gamma, sd.turbulence, tol=args.tol).value])
            if args.mc_samples:
                est = ber_monte_carlo(gamma, sd.turbulence, args.mc_samples, seed=args.seed)
                row.extend([est.estimate, est.std_error])
    return row


def _sweep(args, with_ber):
    s = load_scenario(args.scenario)
    d = _sweep_points(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = _ordered_map(lambda x: _sweep_eval(s, x, args, with_ber), list(d), args.threads)
    names = ["d_r_m", "h_p"]
    for m in args.model:
        names.append("h_irs_" + m)
        if with_ber:
            names += ["gamma_" + m, "Pe_" + m]
            if args.mc_samples:
                names += ["Pe_mc_" + m, "Pe_mc_se_" + m]
    write_table(args.out, _meta(args, s), names, rows)
    return EXIT_OK


def cmd_gain_sweep(args):
    return _sweep(args, with_ber=False)


def cmd_ber_sweep(args):
    return _sweep(args, with_ber=True)


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="irsfso", description="IRS-assisted FSO channel model.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("scenario", nargs="?", default=None,
                        help="YAML/JSON scenario or a CSV from a previous run (default: reference link)")
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")
        sp.add_argument("--tol", type=float, default=1e-9, help="relative tolerance of series and quadrature")
        sp.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo columns")
        sp.add_argument("--lens-grid", type=int, nargs=2, default=[21, 21], metavar=("NR", "NT"),
                        help="radial x angular nodes of the oracle aperture rule")
        sp.set_defaults(parser=sp)
        return sp

    v = common(sub.add_parser("validate", help="validity distances and regime of d_r"))
    v.add_argument("--convention", choices=("half", "full"), default="half")
    v.set_defaults(func=cmd_validate)

    f = common(sub.add_parser("field-profile", help="power density along a lens axis"))
    f.add_argument("--axis", choices=("xr", "yr"), default="xr")
    f.add_argument("--range", type=float, nargs=2, default=[-1.0, 1.0], metavar=("START", "STOP"))
    f.add_argument("--n", type=int, default=41)
    f.add_argument("--model", nargs="+", choices=FIELD_MODELS, default=["analytic"])
    f.set_defaults(func=cmd_field_profile)

    g = common(sub.add_parser("gain", help="geometric channel gain"))
    g.add_argument("--model", nargs="+", choices=GAIN_MODELS, default=["theorem2"])
    g.set_defaults(func=cmd_gain)

    for name, fn, helptext in (("gain-sweep", cmd_gain_sweep, "gain versus lens distance"),
                               ("ber-sweep", cmd_ber_sweep, "average BER versus lens distance")):
        sp = common(sub.add_parser(name, help=helptext))
        sp.add_argument("--dr-range", type=float, nargs=2, default=[1000.0, 10000.0],
                        metavar=("START", "STOP"))
        sp.add_argument("--n", type=int, default=10)
        sp.add_argument("--model", nargs="+", choices=GAIN_MODELS, default=["theorem2", "farfield"])
        if name == "ber-sweep":
            sp.add_argument("--mc-samples", type=int, default=0,
                            help="also estimate the BER by Monte Carlo with this many samples")
        sp.set_defaults(func=fn, mc_samples=0)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    if not (args.tol > 0.0):
        parser.error("--tol must be positive")
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RegimeError as exc:
        print(f"regime error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (ConvergenceError, PoleError) as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ConfigurationError, IrsFsoError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
