"""Hot loops, compiled when the Cython extension is built.

``BACKEND`` is ``"cython"`` or ``"python"``. Setting the environment variable
``MORPHQEC_PURE_PYTHON=1`` forces the numpy fallback.
"""
from __future__ import annotations

import os

from . import _fallback

try:
    if os.environ.get("MORPHQEC_PURE_PYTHON"):
        raise ImportError("pure-python mode requested")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

weight_histogram = _impl.weight_histogram
sparse_parity = _impl.sparse_parity

__all__ = ["BACKEND", "weight_histogram", "sparse_parity"]
