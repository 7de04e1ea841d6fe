"""Backend selection for the hot kernels.

The compiled extension is preferred when it imports; the NumPy fallback is
always available.  ``COAGFRAG_BACKEND=numpy`` (or ``cython``) pins the
choice explicitly, which the benchmark suite uses to compare both.
"""

from __future__ import annotations

import os

from . import _core_np

_requested = os.environ.get("COAGFRAG_BACKEND", "").strip().lower()

if _requested == "numpy":
    core = _core_np
elif _requested == "cython":
    from . import _core_cy as core  # type: ignore[no-redef]
elif _requested == "":
    try:
        from . import _core_cy as core  # type: ignore[no-redef]
    except ImportError:
        core = _core_np
else:
    raise ImportError(f"unknown COAGFRAG_BACKEND value {_requested!r}")

BACKEND: str = core.BACKEND_NAME
