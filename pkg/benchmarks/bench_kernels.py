"""Compiled versus pure-Python kernels.

Times the diffraction sum and the Faddeeva function on both backends and
checks that they agree. Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from irsfso import _kernels_py

try:
    from irsfso import _kernels as compiled
except ImportError:  # extension not built
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def diffraction_case(n_irs, n_obs):
    k = 2 * math.pi / 1550e-9
    xs = np.linspace(-0.25, 0.25, n_irs)
    ys = np.linspace(-0.25, 0.25, n_irs)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    A = np.exp(-(X ** 2 + Y ** 2) / 0.04 - 1j * 3.0 * X)
    obs = np.column_stack([np.linspace(-1, 1, n_obs), np.zeros(n_obs), np.full(n_obs, 2000.0)])
    return A, xs, ys, obs, k


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n-irs", type=int, default=801)
    ap.add_argument("--n-obs", type=int, default=16)
    ap.add_argument("--n-erf", type=int, default=200_000)
    args = ap.parse_args()

    backends = [("python", _kernels_py)] + ([("compiled", compiled)] if compiled else [])
    if compiled is None:
        print("compiled extension not available; timing the fallback only")

    case = diffraction_case(args.n_irs, args.n_obs)
    rng = np.random.default_rng(1)
    z = rng.uniform(-6, 6, args.n_erf) + 1j * rng.uniform(-6, 6, args.n_erf)

    terms = args.n_irs ** 2 * args.n_obs
    print(f"diffraction sum: {args.n_irs}x{args.n_irs} IRS samples, {args.n_obs} points "
          f"({terms / 1e6:.1f} M terms)")
    results = {}
    for name, mod in backends:
        t, out = best_of(lambda: mod.hf_field(*case, 0, 1), args.repeat)
        results[name] = out
        print(f"  {name:9s} {t * 1e3:9.1f} ms  {terms / t / 1e6:8.1f} M terms/s")
    if len(results) == 2:
        rel = np.max(np.abs(results["python"] - results["compiled"]) / np.abs(results["python"]))
        print(f"  max relative difference {rel:.2e}")

    print(f"Faddeeva function: {args.n_erf} points in |Re z|, |Im z| <= 6")
    results = {}
    for name, mod in backends:
        t, out = best_of(lambda: mod.faddeeva_array(z), args.repeat)
        results[name] = out
        print(f"  {name:9s} {t * 1e3:9.1f} ms  {args.n_erf / t / 1e6:8.2f} M evals/s")
    if len(results) == 2:
        rel = np.max(np.abs(results["python"] - results["compiled"]) / np.abs(results["python"]))
        print(f"  max relative difference {rel:.2e}")


if __name__ == "__main__":
    main()
