"""Numba switch.

Set ``BLOCKFLOW_DISABLE_NUMBA=1`` to run every kernel through its pure
Python/numpy path. Numba being absent has the same effect.
"""

import logging
import os

logger = logging.getLogger(__name__)

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    logger.warning("numba not importable, kernels fall back to pure numpy")

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("BLOCKFLOW_DISABLE_NUMBA", "").lower() not in (
    "1",
    "true",
    "yes",
)


def compile_kernel(fn):
    """Return the jitted version of ``fn``, or ``fn`` itself without numba."""
    if not NUMBA_AVAILABLE:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
