"""Kernel backend selection.

The compiled extension is used when it imports; setting ``NIRM_PURE_PYTHON=1``
forces the pure-Python kernels (useful for debugging and for benchmarking the
two against each other).
"""

import os

from nirm import _pykernels

if os.environ.get("NIRM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from nirm import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND

component_labels = _impl.component_labels
gcc_size = _impl.gcc_size
removal_gcc_curve = _impl.removal_gcc_curve
local_counts = _impl.local_counts
brandes = _impl.brandes
distance_sums = _impl.distance_sums
ball_surface = _impl.ball_surface
min_tas_search = _impl.min_tas_search


def available_backends():
    """Map backend name to module for every importable implementation."""
    out = {"python": _pykernels}
    try:
        from nirm import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
