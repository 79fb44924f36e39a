"""Backend selection for the numeric core.

Imports the compiled Cython module when present, otherwise the numpy
fallback.  ``LRFANOUT_PURE=1`` in the environment forces the fallback, which
is what the kernel benchmark and the backend-parity tests use.
"""
from __future__ import annotations

import os

if os.environ.get("LRFANOUT_PURE") == "1":
    from . import _core_py as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as _impl

COMPILED: bool = _impl.COMPILED

strength_sums_1d = _impl.strength_sums_1d
strength_sums_nd = _impl.strength_sums_nd
min_sqdist_nd = _impl.min_sqdist_nd
apply_ctrl_x = _impl.apply_ctrl_x
