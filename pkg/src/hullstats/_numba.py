"""Optional numba acceleration.

Set ``HULLSTATS_BACKEND=numpy`` to force the vectorized numpy/scipy kernels
even when numba is installed.  ``njit`` degrades to an identity decorator
when numba is unavailable.
"""

import os

_requested = os.environ.get("HULLSTATS_BACKEND", "numba").strip().lower()

try:
    if _requested == "numpy":
        raise ImportError("numba disabled by HULLSTATS_BACKEND")
    from numba import njit, prange  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def default_backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
