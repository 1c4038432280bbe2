"""Pure-numpy reference implementations of the hot kernels.

Always available; selected by setting RDR_KERNELS=numpy or automatically
when numba is not importable.
"""

import numpy as np


def assign_labels(x: np.ndarray, centroids: np.ndarray):
    """Nearest-centroid assignment under squared Euclidean distance.

    Ties resolve to the lowest centroid index. Returns (labels, sqdists).
    """
    # ||x-c||^2 = ||x||^2 + ||c||^2 - 2 x.c picks the winner without the
    # (n, k, d) broadcast; the winning distance is then recomputed directly
    # so coincident points get an exact 0, not expansion rounding noise
    x_sq = np.einsum("ij,ij->i", x, x)
    c_sq = np.einsum("ij,ij->i", centroids, centroids)
    d2 = x_sq[:, None] + c_sq[None, :] - 2.0 * (x @ centroids.T)
    labels = np.argmin(d2, axis=1)
    diff = x - centroids[labels]
    sqdists = np.einsum("ij,ij->i", diff, diff)
    return labels.astype(np.int64), sqdists


def centroid_sums(x: np.ndarray, labels: np.ndarray, k: int):
    """Per-cluster coordinate sums and member counts."""
    d = x.shape[1]
    sums = np.zeros((k, d), dtype=np.float64)
    for j in range(d):
        sums[:, j] = np.bincount(labels, weights=x[:, j], minlength=k)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, counts


def inertia(x: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> float:
    """Sum of squared distances from each point to its assigned centroid."""
    diff = x - centroids[labels]
    return float(np.einsum("ij,ij->", diff, diff))
