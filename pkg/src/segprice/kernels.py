"""Backend selection for the screening kernels.

The compiled extension is used when it imported cleanly; setting
``SEGPRICE_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("SEGPRICE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"
rent_floor_from = _impl.rent_floor_from
search_profiles = _impl.search_profiles

__all__ = ["BACKEND", "rent_floor_from", "search_profiles"]
