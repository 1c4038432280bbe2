"""Numba and numpy kernel paths must agree on labels and distances."""

import numpy as np
import pytest

from rdr._kernels import numpy_impl

try:
    from rdr._kernels import numba_impl
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba unavailable")


@needs_numba
class TestBackendEquivalence:
    def test_assign_labels(self, rng):
        for _ in range(10):
            x = rng.normal(size=(rng.integers(5, 80), rng.integers(2, 10)))
            c = rng.normal(size=(rng.integers(1, 6), x.shape[1]))
            la, da = numpy_impl.assign_labels(x, c)
            lb, db = numba_impl.assign_labels(x, c)
            np.testing.assert_array_equal(la, lb)
            np.testing.assert_allclose(da, db, rtol=1e-10, atol=1e-12)

    def test_centroid_sums(self, rng):
        x = rng.normal(size=(50, 4))
        labels = rng.integers(0, 3, size=50)
        sa, ca = numpy_impl.centroid_sums(x, labels, 3)
        sb, cb = numba_impl.centroid_sums(x, labels.astype(np.int64), 3)
        np.testing.assert_array_equal(ca, cb)
        np.testing.assert_allclose(sa, sb, rtol=1e-12)

    def test_inertia(self, rng):
        x = rng.normal(size=(40, 3))
        c = rng.normal(size=(4, 3))
        labels, _ = numpy_impl.assign_labels(x, c)
        ia = numpy_impl.inertia(x, c, labels)
        ib = numba_impl.inertia(x, c, labels)
        assert ia == pytest.approx(ib, rel=1e-12)


class TestNumpyKernels:
    def test_tie_breaks_to_lowest_index(self):
        x = np.array([[0.0, 0.0]])
        c = np.array([[1.0, 0.0], [-1.0, 0.0]])  # equidistant
        labels, _ = numpy_impl.assign_labels(x, c)
        assert labels[0] == 0

    def test_assignment_is_argmin(self, rng):
        x = rng.normal(size=(30, 5))
        c = rng.normal(size=(4, 5))
        labels, dists = numpy_impl.assign_labels(x, c)
        full = ((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)
        np.testing.assert_array_equal(labels, full.argmin(axis=1))
        np.testing.assert_allclose(dists, full.min(axis=1), atol=1e-9)
