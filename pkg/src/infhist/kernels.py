"""Backend selection for the batch prediction kernels.

The compiled extension is preferred when importable; setting
``INFHIST_PURE_PYTHON=1`` forces the numpy fallback.  Both backends are
kept bitwise-equivalent (see tests/test_kernels.py).
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_FORCE_PURE = os.environ.get("INFHIST_PURE_PYTHON", "") not in ("", "0")

if _compiled is not None and not _FORCE_PURE:
    BACKEND = "compiled"
    _impl = _compiled
else:
    BACKEND = "pure"
    _impl = _kernels_py

hist_eval = _impl.hist_eval
bump_adjust = _impl.bump_adjust


def backends():
    """Name -> module map of every importable backend (for benchmarks/tests)."""
    out = {"pure": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
