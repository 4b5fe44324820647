"""Kernel selection: compiled extension if available, else pure Python.

Set SPOSS_PURE_PYTHON=1 to force the fallback (used by the benchmark and
by tests that compare the two implementations).
"""

from __future__ import annotations

import os

if os.environ.get("SPOSS_PURE_PYTHON"):
    from . import _kernels_py as kernels

    HAVE_EXT = False
else:
    try:
        from . import _ckernels as kernels  # type: ignore[no-redef]

        HAVE_EXT = True
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        HAVE_EXT = False

__all__ = ["kernels", "HAVE_EXT"]
