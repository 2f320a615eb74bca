"""Selects the compiled kernels when available, the numpy fallback otherwise.

Set ``TAILEX_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("TAILEX_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND: str = _impl.BACKEND
correction_factors = _impl.correction_factors
estimate_batch = _impl.estimate_batch
scan = _impl.scan
kml_weight_sum = _impl.kml_weight_sum


def available_backends() -> dict:
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
