"""Numeric kernel dispatch: compiled extension when available, NumPy fallback
otherwise.  PINPOINT_KERNEL=pure|compiled forces a backend.
"""

from __future__ import annotations

import os

_requested = os.environ.get("PINPOINT_KERNEL", "").strip().lower()
if _requested not in ("", "pure", "compiled"):
    raise ImportError(f"PINPOINT_KERNEL must be 'pure' or 'compiled', got {_requested!r}")

if _requested == "pure":
    from . import pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import pure as _impl

        BACKEND = "pure"

posterior = _impl.posterior
eig_score = _impl.eig_score

__all__ = ["BACKEND", "posterior", "eig_score"]
