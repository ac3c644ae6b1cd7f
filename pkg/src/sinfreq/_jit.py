"""Optional numba acceleration.

Set ``SINFREQ_DISABLE_NUMBA=1`` to force the pure numpy/Python code paths.
"""
import os

_DISABLED = os.environ.get("SINFREQ_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(fn=None, **kwargs):
    """``numba.njit(cache=True)`` when acceleration is on, identity otherwise.

    The undecorated function stays reachable as ``.py_func`` in both modes.
    """

    def wrap(f):
        if USE_NUMBA:
            return numba.njit(cache=True, **kwargs)(f)
        f.py_func = f
        return f

    if fn is None:
        return wrap
    return wrap(fn)
