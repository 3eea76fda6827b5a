"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Setting ``GBSHASH_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _wick_py

BACKEND = "python"
wick_sum = _wick_py.wick_sum

if os.environ.get("GBSHASH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _wick_ext
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        wick_sum = _wick_ext.wick_sum


def default_threads():
    """Worker count from ``GBSHASH_THREADS``, else the CPU count."""
    value = os.environ.get("GBSHASH_THREADS")
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1
