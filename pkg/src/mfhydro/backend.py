"""Selects the compiled MLS kernel when available.

The Cython extension covers the hot path (degree-1 tables, the only
degree the shock-tube runs use); everything else goes through the numpy
implementation.  Set MFHYDRO_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

from . import _mls_numpy

try:
    from . import _mls_core
except ImportError:  # pragma: no cover - build-dependent
    _mls_core = None

_FORCE_PURE = os.environ.get("MFHYDRO_PURE_PYTHON", "") not in ("", "0")

COMPILED_AVAILABLE = _mls_core is not None
USING_COMPILED = COMPILED_AVAILABLE and not _FORCE_PURE


def mls_table(x, h, degree, quad_y, quad_w):
    """Dense MLS table (values, gradients, volumes); see _mls_numpy."""
    if USING_COMPILED and degree == 1:
        return _mls_core.mls_table_deg1(x, h, quad_y, quad_w)
    return _mls_numpy.mls_table(x, h, degree, quad_y, quad_w)
