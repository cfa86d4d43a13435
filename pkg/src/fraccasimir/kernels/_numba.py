"""Loop kernels compiled with numba (plain Python when numba is absent)."""
import math

import numpy as np

from .._accel import njit
from ._common import LOG_CUT, MIN_NODES


@njit
def _exponent(t, nu, z):
    # nu*t - z*(cosh t - 1), with cosh t - 1 = 2 sinh^2(t/2)
    s = math.sinh(0.5 * t)
    return nu * t - 2.0 * z * s * s


@njit
def log_bessel_k_scalar(nu, z, rel_tol, max_levels):
    """ln K_nu(z) from the trapezoid rule on int_0^inf exp(-z cosh t) cosh(nu t) dt.

    The integrand decays double exponentially, so the equispaced rule is
    already a double-exponential quadrature; it is refined by step halving
    until two levels agree to ``rel_tol``. Returns nan on failure.
    """
    nu = abs(nu)
    if not z > 0.0:
        return math.nan
    t_pk = math.asinh(nu / z)
    g_pk = _exponent(t_pk, nu, z)
    target = g_pk - LOG_CUT
    # bracket the right-hand cut point, then Newton (monotone from the right)
    step = 1.0
    t = t_pk + step
    while _exponent(t, nu, z) > target:
        step *= 2.0
        t = t_pk + step
    for _ in range(100):
        f = _exponent(t, nu, z) - target
        fp = nu - z * math.sinh(t)
        dt = f / fp
        t -= dt
        if abs(dt) <= 1e-12 * (1.0 + t):
            break
    t_max = t
    width = 1.0 / math.sqrt(z * math.cosh(t_pk))
    if width > 1.0:
        width = 1.0
    n = MIN_NODES
    while t_max / n > width:
        n *= 2
    h = t_max / n
    acc = 0.5 * math.exp(-g_pk)  # t = 0 node, half weight
    for k in range(1, n + 1):
        tk = k * h
        acc += math.exp(_exponent(tk, nu, z) - g_pk) * 0.5 * (1.0 + math.exp(-2.0 * nu * tk))
    prev = h * acc
    for _ in range(max_levels):
        h *= 0.5
        for k in range(n):
            tk = (2 * k + 1) * h
            acc += math.exp(_exponent(tk, nu, z) - g_pk) * 0.5 * (1.0 + math.exp(-2.0 * nu * tk))
        n *= 2
        cur = h * acc
        if abs(cur - prev) <= rel_tol * abs(cur):
            return g_pk - z + math.log(cur)
        prev = cur
    return math.nan


@njit
def log_bessel_k_array(nu, z, rel_tol, max_levels):
    out = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        out[i] = log_bessel_k_scalar(nu, z[i], rel_tol, max_levels)
    return out


@njit
def bessel_nsum(nu, b, c, w, theta, n_max, rel_tol, max_levels):
    """sum_i w_i sum_{n=1}^{n_max_i} cos(n theta) (n c_i)^nu K_nu(n b_i).

    Returns (total, largest weighted last term, failure flag).
    """
    total = 0.0
    last = 0.0
    failed = False
    for i in range(b.shape[0]):
        acc = 0.0
        term = 0.0
        for n in range(1, n_max[i] + 1):
            ph = math.cos(n * theta) if theta != 0.0 else 1.0
            if ph == 0.0:
                continue
            lk = log_bessel_k_scalar(nu, n * b[i], rel_tol, max_levels)
            if math.isnan(lk):
                failed = True
                continue
            term = ph * math.exp(nu * math.log(n * c[i]) + lk)
            acc += term
        total += w[i] * acc
        mag = abs(w[i] * term)
        if mag > last:
            last = mag
    return total, last, failed
