"""Dispatch between the numba and numpy kernel backends."""
import numpy as np

from .._accel import USE_NUMBA
from . import _numba, _numpy
from ._common import n_cutoffs

__all__ = ["log_bessel_k_array", "bessel_nsum", "n_cutoffs", "get_backend"]


def get_backend(name=None):
    """Kernel module for ``name`` ("numba" or "numpy"); default follows the env flag."""
    if name is None:
        name = "numba" if USE_NUMBA else "numpy"
    if name == "numba":
        return _numba
    if name == "numpy":
        return _numpy
    raise ValueError(f"unknown backend {name!r}")


def log_bessel_k_array(nu, z, rel_tol, max_levels, backend=None):
    z = np.ascontiguousarray(z, dtype=np.float64)
    return get_backend(backend).log_bessel_k_array(float(nu), z, float(rel_tol), int(max_levels))


def bessel_nsum(nu, b, c, w, theta, n_max, rel_tol, max_levels, backend=None):
    b = np.ascontiguousarray(b, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    n_max = np.ascontiguousarray(n_max, dtype=np.int64)
    total, last, failed = get_backend(backend).bessel_nsum(
        float(nu), b, c, w, float(theta), n_max, float(rel_tol), int(max_levels)
    )
    return float(total), float(last), bool(failed)
