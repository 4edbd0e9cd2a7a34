"""Kernel selection.

The compiled extension is used when it imports; set ``TREECAST_PURE_PYTHON=1``
to force the pure-Python kernels.
"""

from __future__ import annotations

import os

from . import _fallback

kernels = _fallback
if os.environ.get("TREECAST_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        kernels = _fallback

BACKEND = "compiled" if kernels is not _fallback else "python"


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
