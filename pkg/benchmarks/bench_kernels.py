#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

The numba path avoids the (n, k) expansion temporaries and fuses the
distance loop; the numpy path is the always-available reference selected
with RDR_KERNELS=numpy. Run:

    python benchmarks/bench_kernels.py [--n 20000] [--d 256] [--k 30]
"""

import argparse
import time

import numpy as np

from rdr._kernels import numpy_impl

try:
    from rdr._kernels import numba_impl
except ImportError:
    numba_impl = None


def timeit(fn, *args, repeats: int = 5) -> float:
    fn(*args)  # warm-up (and JIT compile on the numba path)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=20_000)
    parser.add_argument("--d", type=int, default=256)
    parser.add_argument("--k", type=int, default=30)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    x = rng.normal(size=(args.n, args.d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    centroids = x[rng.choice(args.n, size=args.k, replace=False)].copy()
    labels, _ = numpy_impl.assign_labels(x, centroids)

    cases = [
        ("assign_labels", (x, centroids)),
        ("centroid_sums", (x, labels, args.k)),
        ("inertia", (x, centroids, labels)),
    ]

    print(f"n={args.n} d={args.d} k={args.k} (best of {args.repeats})")
    header = f"{'kernel':<16}{'numpy':>12}{'numba':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call_args in cases:
        t_numpy = timeit(getattr(numpy_impl, name), *call_args, repeats=args.repeats)
        if numba_impl is None:
            print(f"{name:<16}{t_numpy * 1e3:>10.2f}ms{'n/a':>12}{'':>10}")
            continue
        t_numba = timeit(getattr(numba_impl, name), *call_args, repeats=args.repeats)
        print(
            f"{name:<16}{t_numpy * 1e3:>10.2f}ms{t_numba * 1e3:>10.2f}ms"
            f"{t_numpy / t_numba:>9.2f}x"
        )

    # agreement spot-check while we have both backends loaded
    if numba_impl is not None:
        la, da = numpy_impl.assign_labels(x, centroids)
        lb, db = numba_impl.assign_labels(x, centroids)
        assert np.array_equal(la, lb), "backends disagree on labels"
        assert np.allclose(da, db, rtol=1e-10), "backends disagree on distances"
        print("\nbackends agree on labels and distances")


if __name__ == "__main__":
    main()
