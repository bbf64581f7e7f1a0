"""Running-bound kernels, compiled when available.

The Cython extension ``qsv._kernels`` is used if it imports; otherwise the
numpy implementation in ``qsv._kernels_py`` is. Set ``QSV_PURE_PYTHON=1`` to
force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("QSV_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

running_delta = _impl.running_delta
running_epsilon = _impl.running_epsilon
