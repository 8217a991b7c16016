"""Kernel backend selection.

The hot inner loops (sketch counters, Gaussian statistics, ADWIN, Fenwick
order statistics) exist twice: a Cython extension (``_core``) and a pure
Python module (``_pure``) with identical semantics. The compiled backend
is preferred when importable; set ``MEMHEAT_PURE_KERNELS=1`` to force the
pure one (used by the backend benchmark and for debugging).
"""

import os

_force_pure = os.environ.get("MEMHEAT_PURE_KERNELS", "0") not in ("", "0")

if _force_pure:
    from . import _pure as _impl
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        from . import _pure as _impl
        BACKEND = "pure"

CmsKernel = _impl.CmsKernel
ClassGaussians = _impl.ClassGaussians
Adwin = _impl.Adwin
Fenwick = _impl.Fenwick
mix64 = _impl.mix64

CMS_OK = 0
CMS_OVERFLOW = 1
CMS_UNDERFLOW = 2

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15
