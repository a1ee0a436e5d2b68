"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Each kernel runs on identical inputs in both backends; results are checked
for agreement before timings are reported.
"""

import argparse
import math
import time

import numpy as np

from swipt_re import _kernels_py

try:
    from swipt_re import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(quick):
    rng = np.random.default_rng(0)
    a = np.sort(rng.uniform(0.5, 5.0, 4))[::-1]
    b = np.sort(rng.uniform(0.5, 5.0, 4))[::-1]
    q = 0.7 * b[0]
    lam_ub = math.log1p(a.max()) * 4 / (b[0] - q)
    radius = 1.01 * math.hypot(lam_ub, 4 * a.max() + lam_ub * b[0])
    ell_args = (a, b, 1.0, q, 1e-9, 5000, 1.0 / (2 * b[0]), 1.0, radius)

    steps = 200 if quick else 1000
    grid_args = (a[:3], b[:3], 1.0, 0.6 * b[0], steps)

    k = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    k = k.conj().T @ k
    j = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    j = j.conj().T @ j
    q_bloch = 0.5 * float(np.linalg.eigvalsh(j).max())
    bloch_args = (k, j, 1.0, q_bloch, (0.0, 0.0, 0.0), 1.0, 21 if quick else 41, True)
    return [
        ("spectral_dual_ellipsoid", ell_args),
        ("simplex_grid_search", grid_args),
        ("bloch_grid_search", bloch_args),
    ]


def first_float(out):
    return float(out[0]) if isinstance(out, tuple) else float(out)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--quick", action="store_true", help="smaller grids")
    args = parser.parse_args(argv)
    if _kernels is None:
        parser.error("compiled extension not built; run `pip install -e . --no-build-isolation`")

    print(f"{'kernel':<26}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for name, call_args in cases(args.quick):
        t_py, out_py = best_of(lambda: getattr(_kernels_py, name)(*call_args), args.repeat)
        t_c, out_c = best_of(lambda: getattr(_kernels, name)(*call_args), args.repeat)
        if not math.isclose(first_float(out_py), first_float(out_c), rel_tol=1e-9, abs_tol=1e-12):
            raise SystemExit(f"{name}: backends disagree ({out_py!r} vs {out_c!r})")
        print(f"{name:<26}{t_py:>12.4f}{t_c:>14.4f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
