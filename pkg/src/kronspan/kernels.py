"""Backend selection for the modular elimination kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module. Setting ``KRONSPAN_PURE_PYTHON=1`` forces
the fallback.
"""

from __future__ import annotations

import os

from kronspan import _pykernels

if os.environ.get("KRONSPAN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from kronspan import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

rref_mod_p = _impl.rref_mod_p
rank_mod_p = _impl.rank_mod_p
reduce_row_mod_p = _impl.reduce_row_mod_p

__all__ = ["BACKEND", "rref_mod_p", "rank_mod_p", "reduce_row_mod_p"]
