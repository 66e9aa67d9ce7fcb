"""Numba switch for the hot kernels.

Set ``RESERVE_MATCH_NO_JIT=1`` to run every kernel as plain Python/numpy.
The undecorated function stays reachable as ``kernel.py_func`` either way,
so both paths can be compared in one process.
"""
import logging
import os

logger = logging.getLogger(__name__)

_DISABLED = os.environ.get("RESERVE_MATCH_NO_JIT", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError("disabled by RESERVE_MATCH_NO_JIT")
    import numba

    HAS_NUMBA = True
except ImportError as exc:
    logger.debug("numba unavailable (%s); kernels run interpreted", exc)
    numba = None
    HAS_NUMBA = False


def njit(func=None, **kwargs):
    """``numba.njit`` when enabled, otherwise an identity decorator."""

    def wrap(f):
        if HAS_NUMBA:
            return numba.njit(cache=True, **kwargs)(f)
        f.py_func = f
        return f

    return wrap if func is None else wrap(func)
