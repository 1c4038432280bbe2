"""Hot-kernel backend selection.

RDR_KERNELS=numpy forces the pure-numpy path, RDR_KERNELS=numba demands the
JIT path (ImportError if numba is missing). Unset: numba when importable,
numpy otherwise. The choice is made once at import; tests and benchmarks
that want a specific backend import numpy_impl / numba_impl directly.
"""

import os

from . import numpy_impl

_requested = os.environ.get("RDR_KERNELS", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(f"RDR_KERNELS must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numpy":
    _impl = numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl
        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _impl = numpy_impl
        BACKEND = "numpy"

assign_labels = _impl.assign_labels
centroid_sums = _impl.centroid_sums
inertia = _impl.inertia
