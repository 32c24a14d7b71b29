"""Kernel backend selection.

The compiled extension ``tkmeans._core`` is preferred when importable; the
numpy implementation in ``tkmeans._core_numpy`` is the fallback.  Selection
happens once at import time and can be forced with the environment variable
``TKMEANS_KERNELS=cython|numpy`` or, programmatically (benchmarks, tests),
with :func:`set_backend`.
"""

import os

from . import _core_numpy

_BACKENDS = {"numpy": _core_numpy}
try:
    from . import _core

    _BACKENDS["cython"] = _core
except ImportError:
    _core = None

_impl = None
_name = None


def set_backend(name):
    """Select the kernel backend by name ('cython' or 'numpy')."""
    global _impl, _name
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {sorted(_BACKENDS)}"
        )
    _impl = _BACKENDS[name]
    _name = name


def backend_name():
    """Name of the currently selected backend."""
    return _name


def available_backends():
    return sorted(_BACKENDS)


_requested = os.environ.get("TKMEANS_KERNELS", "auto")
if _requested == "auto":
    set_backend("cython" if _core is not None else "numpy")
else:
    set_backend(_requested)


def assign_labels(zt, ct):
    return _impl.assign_labels(zt, ct)


def centroid_sums(zt, labels, k):
    return _impl.centroid_sums(zt, labels, k)


def group_mean_columns(m, labels, k):
    return _impl.group_mean_columns(m, labels, k)
