"""Kernel backend selection.

The per-step inference path (single-state forward passes and masked
argmaxes) dominates the interaction loop, so it is available as a compiled
extension. A pure-numpy fallback with the same interface is selected when
the extension is not built, or when PLAYMASK_PURE_PYTHON is set.
"""

import os

if os.environ.get("PLAYMASK_PURE_PYTHON"):
    from . import _slowdense as kernels
else:
    try:
        from . import _fastdense as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _slowdense as kernels  # type: ignore[no-redef]

BACKEND_NAME = kernels.NAME

__all__ = ["kernels", "BACKEND_NAME"]
