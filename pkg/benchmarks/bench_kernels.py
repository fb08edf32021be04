"""Compare the Cython kernels with the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is timed on
both backends with identical inputs; the largest relative difference between
backends is printed next to the timings.
"""
import argparse
import time

import numpy as np

from bergman import _backend
from bergman.berezin import condition_profile
from bergman.examples import preset


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(degree, nodes):
    rng = np.random.default_rng(0)
    z = 0.93 * np.exp(0.7j)
    coeffs = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    pts = 0.99 * np.sqrt(rng.random(nodes)) * np.exp(2j * np.pi * rng.random(nodes))
    S = preset("hankel-wbar").operator(degree)
    return {
        f"mobius_columns(N={degree}, all columns)": lambda: _backend.mobius_columns(z, degree, degree + 1),
        f"horner(N={degree}, {nodes} points)": lambda: _backend.horner(coeffs, pts),
        f"condition_profile(N={degree})": lambda: condition_profile(S, z, tail_tol=1.0).cond_d,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree", type=int, default=512)
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    try:
        _backend.use_backend("cython")
    except ImportError:
        print("Cython extension not built; only the numpy backend is available")
        return 1
    print(f"{'kernel':<44s} {'cython [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, fn in cases(args.degree, args.nodes).items():
        _backend.use_backend("cython")
        tc, oc = best_of(fn, args.repeat)
        _backend.use_backend("python")
        tp, op = best_of(fn, args.repeat)
        diff = np.max(np.abs(oc - op)) / max(np.max(np.abs(op)), 1e-300)
        print(f"{name:<44s} {tc:11.4f} {tp:11.4f} {tp / tc:8.1f} {diff:13.2e}")
    _backend.use_backend("cython")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
