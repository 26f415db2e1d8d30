"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise the
pure-Python kernels are used. Setting ``SUSPENDED_SEARCH_PURE_PYTHON=1``
forces the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("SUSPENDED_SEARCH_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _pykernels

BACKEND = "cython" if kernels is not _pykernels else "python"


def compiled_kernels():
    """Return the compiled kernel module, or None if it is not built."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels
