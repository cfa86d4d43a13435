"""Vectorized numpy implementations of the hot kernels."""
import numpy as np

from ._common import LOG_CUT, MIN_NODES

_CHUNK = 4096


def _exponent(t, nu, z):
    s = np.sinh(0.5 * t)
    return nu * t - 2.0 * z * s * s


def _integrand(t, nu, z, g_pk):
    return np.exp(_exponent(t, nu, z) - g_pk) * 0.5 * (1.0 + np.exp(-2.0 * nu * t))


def _log_bessel_k_block(nu, z, rel_tol, max_levels):
    nu = abs(nu)
    t_pk = np.arcsinh(nu / z)
    g_pk = _exponent(t_pk, nu, z)
    target = g_pk - LOG_CUT
    step = np.ones_like(z)
    t = t_pk + step
    above = _exponent(t, nu, z) > target
    while np.any(above):
        step = np.where(above, 2.0 * step, step)
        t = t_pk + step
        above = _exponent(t, nu, z) > target
    for _ in range(100):
        f = _exponent(t, nu, z) - target
        fp = nu - z * np.sinh(t)
        dt = f / fp
        t = t - dt
        if np.all(np.abs(dt) <= 1e-12 * (1.0 + t)):
            break
    t_max = t
    width = np.minimum(1.0, 1.0 / np.sqrt(z * np.cosh(t_pk)))
    need = np.max(t_max / width)
    n = MIN_NODES
    while n < need:
        n *= 2
    # common node count, per-element interval: nodes t_max * k / n
    u = np.arange(1, n + 1) / n
    h = t_max / n
    col = lambda a: a[:, None]
    acc = 0.5 * np.exp(-g_pk) + _integrand(col(t_max) * u, nu, col(z), col(g_pk)).sum(axis=1)
    prev = h * acc
    out = np.full(z.shape, np.nan)
    active = np.ones(z.shape, dtype=bool)
    for _ in range(max_levels):
        h = 0.5 * h
        u = (2 * np.arange(n) + 1) / (2 * n)
        idx = np.nonzero(active)[0]
        tm = t_max[idx]
        acc[idx] += _integrand(col(tm) * u, nu, col(z[idx]), col(g_pk[idx])).sum(axis=1)
        n *= 2
        cur = h[idx] * acc[idx]
        done = np.abs(cur - prev[idx]) <= rel_tol * np.abs(cur)
        out[idx[done]] = g_pk[idx[done]] - z[idx[done]] + np.log(cur[done])
        prev[idx] = cur
        active[idx[done]] = False
        if not active.any():
            break
    return out


def log_bessel_k_array(nu, z, rel_tol, max_levels):
    z = np.asarray(z, dtype=np.float64)
    out = np.full(z.shape, np.nan)
    pos = z > 0
    zz = z[pos]
    res = np.empty(zz.shape)
    for s in range(0, zz.size, _CHUNK):
        res[s:s + _CHUNK] = _log_bessel_k_block(nu, zz[s:s + _CHUNK], rel_tol, max_levels)
    out[pos] = res
    return out


def bessel_nsum(nu, b, c, w, theta, n_max, rel_tol, max_levels):
    rows = np.repeat(np.arange(b.size), n_max)
    starts = np.concatenate(([0], np.cumsum(n_max)[:-1]))
    n = np.arange(rows.size) - np.repeat(starts, n_max) + 1
    ph = np.cos(n * theta) if theta != 0.0 else np.ones(n.size)
    keep = ph != 0.0
    rows, n, ph = rows[keep], n[keep], ph[keep]
    lk = log_bessel_k_array(nu, n * b[rows], rel_tol, max_levels)
    failed = bool(np.isnan(lk).any())
    terms = ph * np.exp(nu * np.log(n * c[rows]) + lk)
    terms = np.where(np.isnan(terms), 0.0, terms)
    per_row = np.bincount(rows, weights=terms, minlength=b.size)
    total = float(np.dot(w, per_row))
    last_idx = np.zeros(b.size, dtype=np.int64) - 1
    if rows.size:
        # last kept entry for every row
        last_idx[rows] = np.arange(rows.size)
    has = last_idx >= 0
    last = float(np.max(np.abs(w[has] * terms[last_idx[has]]))) if has.any() else 0.0
    return total, last, failed
