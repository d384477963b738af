"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--steps 200000] [--pixels 1000000]

Each kernel is also checked for bit-identical output across the two backends.
"""

import argparse
import time

import numpy as np

from stochquant import _fallback

try:
    from stochquant import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeat=3):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_sq(impl, pts, palette, idx, rho, r):
    def run():
        pal = palette.copy()
        impl.sq_iterate(pts, pal, idx, rho, r)
        return pal

    return best_of(run)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000, help="SQ iterations per timing")
    ap.add_argument("--pixels", type=int, default=1_000_000, help="pixels for the assignment kernel")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")

    rng = np.random.default_rng(args.seed)
    pts = rng.random((args.pixels, 3))
    idx = rng.integers(0, args.pixels, args.steps).astype(np.int64)

    print(f"{'kernel':<22}{'K':>4}{'python [s]':>13}{'cython [s]':>13}{'speedup':>10}  identical")
    for K in (4, 12, 36):
        palette = rng.random((K, 3))
        tp, a = bench_sq(_fallback, pts, palette, idx, 0.001, 3.0)
        tc, b = bench_sq(_kernels, pts, palette, idx, 0.001, 3.0)
        print(f"{'sq_iterate':<22}{K:>4}{tp:>13.4f}{tc:>13.4f}{tp / tc:>10.1f}  {a.tobytes() == b.tobytes()}")
    for K in (4, 12, 36):
        palette = rng.random((K, 3))
        tp, (la, sa) = best_of(lambda: _fallback.assign_nearest(pts, palette))
        tc, (lb, sb) = best_of(lambda: _kernels.assign_nearest(pts, palette))
        same = np.array_equal(la, lb) and sa.tobytes() == sb.tobytes()
        print(f"{'assign_nearest':<22}{K:>4}{tp:>13.4f}{tc:>13.4f}{tp / tc:>10.1f}  {same}")


if __name__ == "__main__":
    main()
