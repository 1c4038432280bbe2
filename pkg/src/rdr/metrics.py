"""Clustering-quality metrics over labeled partitions.

Accuracy uses maximum-weight one-to-one matching between predicted clusters
and truth classes (rectangular contingency allowed). NMI normalises mutual
information by the geometric mean of the two entropies, natural logs. ARI is
the pair-counting Rand index adjusted for chance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ContractError


@dataclass(frozen=True)
class LabeledPartition:
    """A partition of items into integer classes 0..class_count-1."""

    labels: Mapping[Hashable, int]
    class_count: int = field(default=0)

    def __post_init__(self):
        if not self.labels:
            raise ContractError("partition labels must be nonempty")
        count = self.class_count or max(self.labels.values()) + 1
        object.__setattr__(self, "class_count", count)
        for item, lab in self.labels.items():
            if not (0 <= lab < count):
                raise ContractError(
                    f"label {lab} of item {item!r} outside [0, {count})"
                )

    @classmethod
    def from_sequence(
        cls, ids: Sequence[Hashable], labels: Iterable[int]
    ) -> "LabeledPartition":
        """Build from parallel id/label sequences, compacting label values."""
        labels = list(labels)
        if len(ids) != len(labels):
            raise ContractError("ids and labels must have equal length")
        uniq = {lab: i for i, lab in enumerate(sorted(set(labels)))}
        return cls({i: uniq[lab] for i, lab in zip(ids, labels)})


def _aligned(pred: LabeledPartition, truth: LabeledPartition):
    ids = set(pred.labels)
    if ids != set(truth.labels):
        raise ContractError("pred and truth must cover the same item ids")
    order = sorted(ids, key=repr)
    a = np.array([pred.labels[i] for i in order], dtype=np.int64)
    b = np.array([truth.labels[i] for i in order], dtype=np.int64)
    return a, b


def _contingency(a: np.ndarray, b: np.ndarray, r: int, c: int) -> np.ndarray:
    m = np.zeros((r, c), dtype=np.int64)
    np.add.at(m, (a, b), 1)
    return m


def accuracy_hungarian(pred: LabeledPartition, truth: LabeledPartition) -> float:
    """Fraction of items correct under the best cluster-to-class bijection."""
    a, b = _aligned(pred, truth)
    w = _contingency(a, b, pred.class_count, truth.class_count)
    rows, cols = linear_sum_assignment(w, maximize=True)
    return float(w[rows, cols].sum()) / a.size


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pred: LabeledPartition, truth: LabeledPartition) -> float:
    """Mutual information over the geometric mean of the two entropies.

    Both partitions trivial (zero entropy) -> 1.0; exactly one trivial -> 0.0.
    """
    a, b = _aligned(pred, truth)
    n = a.size
    m = _contingency(a, b, pred.class_count, truth.class_count)
    h_a = _entropy(m.sum(axis=1), n)
    h_b = _entropy(m.sum(axis=0), n)
    if h_a == 0.0 and h_b == 0.0:
        return 1.0
    if h_a == 0.0 or h_b == 0.0:
        return 0.0
    pa = m.sum(axis=1) / n
    pb = m.sum(axis=0) / n
    terms = []
    for i, j in zip(*np.nonzero(m)):
        pij = m[i, j] / n
        terms.append(pij * np.log(pij / (pa[i] * pb[j])))
    # summing in sorted order makes nmi(a, b) == nmi(b, a) bit-exact
    mi = float(sum(sorted(terms)))
    return float(min(1.0, max(0.0, mi / np.sqrt(h_a * h_b))))


def _comb2(x: np.ndarray | int):
    return x * (x - 1) / 2.0


def ari(pred: LabeledPartition, truth: LabeledPartition) -> float:
    """(RI - E[RI]) / (max RI - E[RI]) via the contingency pair counts.

    The denominator vanishes only when both partitions are all-singletons or
    both are one-cluster, i.e. identical; that case returns 1.0.
    """
    a, b = _aligned(pred, truth)
    n = a.size
    m = _contingency(a, b, pred.class_count, truth.class_count)
    sum_cells = float(_comb2(m).sum())
    sum_rows = float(_comb2(m.sum(axis=1)).sum())
    sum_cols = float(_comb2(m.sum(axis=0)).sum())
    total = float(_comb2(n))
    expected = sum_rows * sum_cols / total
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0
    return (sum_cells - expected) / (max_index - expected)
