"""Kernel backend selection.

The compiled Cython core is preferred; the pure-numpy interpreter is the
drop-in fallback.  Set VCALC_PURE=1 to force the fallback (used by the
benchmark and by backend-equivalence tests).
"""

from __future__ import annotations

import os

if os.environ.get("VCALC_PURE"):
    from . import pure as _backend
else:
    try:
        from . import _core as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as _backend

eval_tape = _backend.eval_tape
sum_tape = _backend.sum_tape
BACKEND = _backend.BACKEND

__all__ = ["eval_tape", "sum_tape", "BACKEND"]
