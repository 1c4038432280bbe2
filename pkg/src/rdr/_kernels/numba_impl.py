"""Numba-compiled versions of the hot kernels.

Kept loop-shaped so the JIT fuses the distance computation instead of
materialising the (n, k, d) broadcast the numpy path avoids by expansion.
fastmath stays off: summation order must be reproducible run to run.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def assign_labels(x, centroids):
    n, d = x.shape
    k = centroids.shape[0]
    # np.dot lowers to BLAS under the JIT; selection and the exact winner
    # distance are fused loops with no (n, k) temporaries beyond the dots
    dots = np.dot(x, centroids.T)
    c_sq = np.empty(k, dtype=np.float64)
    for c in range(k):
        acc = 0.0
        for j in range(d):
            acc += centroids[c, j] * centroids[c, j]
        c_sq[c] = acc
    labels = np.empty(n, dtype=np.int64)
    sqdists = np.empty(n, dtype=np.float64)
    for i in range(n):
        x_sq = 0.0
        for j in range(d):
            x_sq += x[i, j] * x[i, j]
        best = 0
        best_d = np.inf
        for c in range(k):
            v = x_sq + c_sq[c] - 2.0 * dots[i, c]
            if v < best_d:  # strict: ties keep the lowest index
                best_d = v
                best = c
        acc = 0.0
        for j in range(d):
            t = x[i, j] - centroids[best, j]
            acc += t * t
        labels[i] = best
        sqdists[i] = acc
    return labels, sqdists


@njit(cache=True)
def centroid_sums(x, labels, k):
    n, d = x.shape
    sums = np.zeros((k, d), dtype=np.float64)
    counts = np.zeros(k, dtype=np.int64)
    for i in range(n):
        c = labels[i]
        counts[c] += 1
        for j in range(d):
            sums[c, j] += x[i, j]
    return sums, counts


@njit(cache=True)
def inertia(x, centroids, labels):
    n, d = x.shape
    total = 0.0
    for i in range(n):
        c = labels[i]
        for j in range(d):
            t = x[i, j] - centroids[c, j]
            total += t * t
    return total
