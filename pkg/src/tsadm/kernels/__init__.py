"""Hot numeric kernels with a selectable backend.

``TSADM_BACKEND=numba`` (default when numba imports) binds the JIT-compiled
loop versions; ``TSADM_BACKEND=numpy`` binds the vectorised numpy versions.
The choice is made once, at import time.
"""
import importlib
import logging
import os

from . import numpy_impl

logger = logging.getLogger(__name__)

_requested = os.environ.get("TSADM_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"TSADM_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

numba_impl = None
if _requested == "numba":
    try:
        numba_impl = importlib.import_module(f"{__name__}.numba_impl")
    except ImportError:  # pragma: no cover - numba is a declared dependency
        logger.warning("numba unavailable, falling back to numpy kernels")

BACKEND = "numba" if numba_impl is not None else "numpy"
_impl = numba_impl if numba_impl is not None else numpy_impl

interval_overlaps = _impl.interval_overlaps
soft_labels = _impl.soft_labels
weighted_curve_areas = _impl.weighted_curve_areas
lsf_counts = _impl.lsf_counts
nab_raw = _impl.nab_raw
rolling_median = _impl.rolling_median
nearest_distance_sum = _impl.nearest_distance_sum

KERNELS = (
    "interval_overlaps",
    "soft_labels",
    "weighted_curve_areas",
    "lsf_counts",
    "nab_raw",
    "rolling_median",
    "nearest_distance_sum",
)

__all__ = ["BACKEND", "KERNELS", "numpy_impl", "numba_impl", *KERNELS]
