"""Select the compiled kernels when available, else the pure-Python ones.

Set ``STOCHQUANT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import logging
import os

from stochquant import _fallback

log = logging.getLogger(__name__)

BACKEND = "python"
if os.environ.get("STOCHQUANT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from stochquant import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable, using pure-Python fallback")
        _impl = _fallback
else:
    _impl = _fallback

assign_nearest = _impl.assign_nearest
sq_iterate = _impl.sq_iterate
