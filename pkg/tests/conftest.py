"""Shared oracle implementations and fixture helpers.

Oracles are deliberately naive (brute force, direct sums, pair enumeration)
and independent of the library code paths they check.

The suite pins RDR_KERNELS=numpy before any rdr import: golden hashes are
recorded under that backend. The numba path is exercised directly by
tests/test_kernels.py, which imports both implementations side by side.
"""

import itertools
import math
import os
from collections import Counter

os.environ.setdefault("RDR_KERNELS", "numpy")

import numpy as np
import pytest


# --- independent metric oracles -------------------------------------------


def acc_oracle(pred: list[int], truth: list[int]) -> float:
    """Best accuracy over all injective cluster-to-class label maps."""
    p_vals, t_vals = sorted(set(pred)), sorted(set(truth))
    best = 0
    if len(p_vals) <= len(t_vals):
        for chosen in itertools.permutations(t_vals, len(p_vals)):
            mapping = dict(zip(p_vals, chosen))
            best = max(best, sum(1 for p, t in zip(pred, truth) if mapping[p] == t))
    else:
        for chosen in itertools.permutations(p_vals, len(t_vals)):
            mapping = dict(zip(t_vals, chosen))
            best = max(best, sum(1 for p, t in zip(pred, truth) if mapping[t] == p))
    return best / len(pred)


def nmi_oracle(pred: list[int], truth: list[int]) -> float:
    """Direct entropy sums, natural logs, geometric-mean normalization."""
    n = len(pred)
    cp, ct = Counter(pred), Counter(truth)
    joint = Counter(zip(pred, truth))
    h_p = -sum(c / n * math.log(c / n) for c in cp.values())
    h_t = -sum(c / n * math.log(c / n) for c in ct.values())
    if h_p == 0.0 and h_t == 0.0:
        return 1.0
    if h_p == 0.0 or h_t == 0.0:
        return 0.0
    mi = sum(
        c / n * math.log((c / n) / (cp[a] / n * ct[b] / n))
        for (a, b), c in joint.items()
    )
    return mi / math.sqrt(h_p * h_t)


def ari_oracle(pred: list[int], truth: list[int]) -> float:
    """O(n^2) pair enumeration."""
    n = len(pred)
    both = pred_only = truth_only = neither = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_p = pred[i] == pred[j]
            same_t = truth[i] == truth[j]
            if same_p and same_t:
                both += 1
            elif same_p:
                pred_only += 1
            elif same_t:
                truth_only += 1
            else:
                neither += 1
    total = both + pred_only + truth_only + neither
    a = both + pred_only
    b = both + truth_only
    expected = a * b / total
    max_index = (a + b) / 2
    if max_index == expected:
        return 1.0
    return (both - expected) / (max_index - expected)


def kmeans_oracle_2clusters(points: list[float]) -> tuple[float, set[float]]:
    """Exhaustive best 2-partition of 1-D points: (inertia, centroid set)."""
    n = len(points)
    best = (math.inf, set())
    for mask in range(1, 2 ** n - 1):
        a = [points[i] for i in range(n) if mask & (1 << i)]
        b = [points[i] for i in range(n) if not mask & (1 << i)]
        ca, cb = sum(a) / len(a), sum(b) / len(b)
        inertia = sum((x - ca) ** 2 for x in a) + sum((x - cb) ** 2 for x in b)
        if inertia < best[0]:
            best = (inertia, {ca, cb})
    return best


def ols_slope_oracle(xs, ys) -> float:
    """Closed form Sxy/Sxx."""
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / sxx


# --- gateway helpers --------------------------------------------------------


def make_replay(pairs):
    """ReplayProvider from {PromptRequest: response} pairs."""
    from rdr.llm_gateway import ReplayProvider, request_hash

    return ReplayProvider({request_hash(req): text for req, text in pairs.items()})


def make_gateway(provider, **kwargs):
    from rdr.llm_gateway import MODEL_TAGS, LlmGateway

    kwargs.setdefault("backoff_base", 0.0)
    return LlmGateway({tag: provider for tag in MODEL_TAGS}, **kwargs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
