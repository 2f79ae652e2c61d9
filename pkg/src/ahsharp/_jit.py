"""JIT switch.

Set ``AHSHARP_DISABLE_JIT=1`` to run every kernel as plain Python/numpy,
which is handy under a debugger and is the reference path for the
benchmark.  Numba being absent has the same effect.
"""

import os

_DISABLED = os.environ.get("AHSHARP_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

JIT_ENABLED = HAVE_NUMBA and not _DISABLED


def njit(func=None, **kwargs):
    """``numba.njit`` when enabled, identity otherwise."""
    if not JIT_ENABLED:
        if func is not None:
            return func
        return lambda f: f
    kwargs.setdefault("cache", True)
    if func is not None:
        return _numba_njit(**kwargs)(func)
    return _numba_njit(**kwargs)
