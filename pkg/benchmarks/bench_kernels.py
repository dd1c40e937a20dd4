"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--sizes 200 1000 4000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from coarse_nash import _kernels as K


def _case(rng, m, n):
    pts = np.exp(rng.uniform(-2, 2, size=(m, n)))
    logs = np.log(pts)
    W = np.full((1, n), 1.0 / n)
    scores = K.sorted_scores(logs, W)
    order = np.lexsort(pts.T[::-1])
    return pts, pts[order], logs, scores


def _kernels(case):
    pts, sorted_pts, logs, scores = case
    grid = pts * 0.9
    return {
        "dominated_by": lambda b: K.dominated_by(logs, scores, logs, scores, K.MODE_THRESHOLD, 0.05, 1e-9, backend=b),
        "pruned_mask": lambda b: K.pruned_mask(sorted_pts, 1e-12, backend=b),
        "hull_contains": lambda b: K.hull_contains(grid, pts, 1e-12, backend=b),
        "hull_distance": lambda b: K.hull_distance(grid, pts, backend=b),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 4000])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        raise SystemExit("numba unavailable; nothing to compare")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<14} {'m':>6} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for m in args.sizes:
        for name, fn in _kernels(_case(rng, m, args.n)).items():
            a, b = fn("numpy"), fn("numba")
            if not np.array_equal(a, b) and not np.allclose(a, b, rtol=0, atol=1e-12):
                raise SystemExit(f"{name}: backends disagree at m={m}")
            t_np = min(timeit.repeat(lambda: fn("numpy"), number=1, repeat=args.repeat)) * 1e3
            t_nb = min(timeit.repeat(lambda: fn("numba"), number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<14} {m:>6} {t_np:>10.2f} {t_nb:>10.2f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
