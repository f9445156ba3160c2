"""Backend selection for the hot numeric kernels.

Kernels in :mod:`mixqfi.kernels` exist twice: a loop version compiled with
numba and a vectorized pure-numpy version. The numba path is used when numba
imports cleanly and ``MIXQFI_DISABLE_NUMBA`` is unset (or ``0``). Setting the
variable to ``1`` before import forces the numpy path everywhere.
"""

import os

_FLAG = os.environ.get("MIXQFI_DISABLE_NUMBA", "0").strip().lower()

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG in ("", "0", "false", "no")


def njit(*args, **kws):
    """``numba.njit`` with caching, or a no-op decorator without numba."""
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kws.setdefault("cache", True)
    kws.setdefault("nogil", True)
    return numba.njit(*args, **kws)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
