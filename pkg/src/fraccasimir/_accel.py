"""Backend selection for the hot numeric kernels.

Kernels are compiled with numba when it is importable. Setting the
environment variable ``FRACCASIMIR_DISABLE_NUMBA=1`` routes every dispatch
through the vectorized numpy implementations instead.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None

HAVE_NUMBA = numba is not None

_flag = os.environ.get("FRACCASIMIR_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag in ("", "0", "false", "no", "off")


def njit(func):
    """Compile ``func`` in nopython mode, or return it untouched without numba."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
