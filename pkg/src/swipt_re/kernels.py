"""Backend selection for the hot kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise,
or when ``SWIPT_RE_PURE_PYTHON`` is set to a non-empty value other than
``0``, the numpy implementation in ``_kernels_py`` is used.
"""

import os

from . import _kernels_py

if os.environ.get("SWIPT_RE_PURE_PYTHON", "0") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

spectral_dual_ellipsoid = _impl.spectral_dual_ellipsoid
simplex_grid_search = _impl.simplex_grid_search
bloch_grid_search = _impl.bloch_grid_search

__all__ = ["BACKEND", "spectral_dual_ellipsoid", "simplex_grid_search", "bloch_grid_search"]
