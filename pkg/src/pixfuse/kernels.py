"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the NumPy
fallback.  Setting ``PIXFUSE_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _pykernels

if os.environ.get("PIXFUSE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

mamdani_table = _impl.mamdani_table
