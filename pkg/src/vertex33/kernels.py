"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set ``VERTEX33_PURE=1``
to force the pure-Python implementation.
"""
import os

from . import _sector_py

BACKEND = "python"
build_sector_matrix = _sector_py.build_sector_matrix

if os.environ.get("VERTEX33_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _sector_ext
    except ImportError:
        pass
    else:
        build_sector_matrix = _sector_ext.build_sector_matrix
        BACKEND = "cython"

__all__ = ["BACKEND", "build_sector_matrix"]
