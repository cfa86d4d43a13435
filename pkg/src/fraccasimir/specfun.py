"""Real-argument special functions used by the physics modules.

``bessel_k`` and ``riemann_zeta`` are implemented here; ``log_gamma``,
``gamma`` and ``digamma`` delegate to :mod:`math` and :mod:`scipy.special`
behind the same domain checks.
"""
import math

import numpy as np
from scipy import special as _sp

from . import kernels
from .errors import ConvergenceError, DomainError, PoleError
from .series import DEFAULT_CONTROL

EULER_GAMMA = 0.57721566490153286061

# B_{2k} / (2k)!  for k = 1..12
_BERN_FACT = [
    1.0 / 6 / math.factorial(2),
    -1.0 / 30 / math.factorial(4),
    1.0 / 42 / math.factorial(6),
    -1.0 / 30 / math.factorial(8),
    5.0 / 66 / math.factorial(10),
    -691.0 / 2730 / math.factorial(12),
    7.0 / 6 / math.factorial(14),
    -3617.0 / 510 / math.factorial(16),
    43867.0 / 798 / math.factorial(18),
    -174611.0 / 330 / math.factorial(20),
    854513.0 / 138 / math.factorial(22),
    -236364091.0 / 2730 / math.factorial(24),
]


def _is_nonpositive_int(x):
    return x <= 0 and x == math.floor(x)


def sinpi(x):
    """sin(pi x) with exact zeros at the integers."""
    r = x - 2.0 * round(0.5 * x)  # exact; r in [-1, 1]
    if r == 0.0 or abs(r) == 1.0:
        return 0.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def gamma(x):
    """Gamma(x) for real x away from the poles 0, -1, -2, ..."""
    if _is_nonpositive_int(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x > 171.0:
        return math.inf
    return math.gamma(x)


def rgamma(x):
    """1/Gamma(x); zero at the poles of Gamma."""
    if _is_nonpositive_int(x):
        return 0.0
    if x > 171.0:
        return math.exp(-math.lgamma(x))
    return 1.0 / math.gamma(x)


def digamma(x):
    """psi(x) = Gamma'(x)/Gamma(x)."""
    if _is_nonpositive_int(x):
        raise PoleError(f"digamma has a pole at {x}")
    return float(_sp.digamma(x))


def log_bessel_k(nu, z, ctl=DEFAULT_CONTROL):
    """ln K_nu(z) for real order and positive argument (scalar or array)."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if np.any(~(z_arr > 0)):
        raise DomainError("bessel_k requires z > 0")
    out = kernels.log_bessel_k_array(nu, z_arr.ravel(), ctl.rel_tol, ctl.quadrature_levels)
    if np.isnan(out).any():
        bad = z_arr.ravel()[np.isnan(out)]
        raise ConvergenceError(
            f"K_{nu} quadrature did not converge in {ctl.quadrature_levels} halvings",
            {"nu": nu, "z": bad.tolist()[:10], "quadrature_levels": ctl.quadrature_levels},
        )
    out = out.reshape(z_arr.shape)
    return float(out[0]) if np.ndim(z) == 0 else out


def bessel_k(nu, z, ctl=DEFAULT_CONTROL):
    """Modified Bessel function of the second kind, K_nu(z).

    Evaluated from ``K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt`` by an
    adaptive trapezoid rule (double-exponential decay of the integrand).

    Parameters
    ----------
    nu : float
        Real order; ``K_nu = K_{-nu}``.
    z : float or array_like
        Positive argument(s).
    ctl : SeriesControl
        ``rel_tol`` and ``quadrature_levels`` are used.

    Returns
    -------
    float or numpy.ndarray
    """
    return np.exp(log_bessel_k(nu, z, ctl))


def _zeta_em(s, ctl=DEFAULT_CONTROL, s_minus_1=None):
    """Euler-Maclaurin evaluation of zeta(s), valid for real s > -20, s != 1.

    ``s_minus_1`` may carry ``s - 1`` exactly when ``s`` itself was rounded.
    """
    if s_minus_1 is None:
        s_minus_1 = s - 1.0
    n = 16
    while True:
        head = math.fsum(k ** -s for k in range(1, n))
        val = head + math.exp(-s_minus_1 * math.log(n)) / s_minus_1 + 0.5 * n ** -s
        poch = s  # rising factorial s (s+1) ... (s+2k-2)
        term = 0.0
        for k, bf in enumerate(_BERN_FACT, start=1):
            term = bf * poch * n ** (-s - 2 * k + 1)
            val += term
            poch *= (s + 2 * k - 1) * (s + 2 * k)
        if abs(term) <= ctl.rel_tol * 1e-2 * abs(val) or n >= 4096:
            break
        n *= 2
    if abs(term) > ctl.rel_tol * abs(val) + ctl.abs_tol:
        raise ConvergenceError(
            f"Euler-Maclaurin for zeta({s}) did not converge",
            {"n_head": n, "last_term": term, "partial_sum": val},
        )
    return val


def _zeta_reflect(s, ctl=DEFAULT_CONTROL):
    """zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)."""
    sn = sinpi(0.5 * s)
    if sn == 0.0:
        return 0.0
    log_mag = s * math.log(2.0) + (s - 1.0) * math.log(math.pi) + math.lgamma(1.0 - s)
    return sn * math.exp(log_mag) * _zeta_em(1.0 - s, ctl, s_minus_1=-s)


def riemann_zeta(s, ctl=DEFAULT_CONTROL):
    """Riemann zeta function on the real line.

    Euler-Maclaurin summation for ``s > 0.5``, the functional equation for
    ``s <= 0.5``. Raises :class:`PoleError` at ``s = 1``.
    """
    if s == 1.0:
        raise PoleError("riemann_zeta has a pole at s = 1")
    if s == 0.0:
        return -0.5
    if s > 0.5:
        return _zeta_em(s, ctl)
    return _zeta_reflect(s, ctl)


def zeta_deriv_neg_even(n):
    """zeta'(-2n) for integer n >= 1, via (-1)^n (2n)! zeta(2n+1) / (2 (2 pi)^(2n))."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return (-1) ** n * math.exp(math.lgamma(2 * n + 1) - 2 * n * math.log(2 * math.pi)) \
        * riemann_zeta(2.0 * n + 1.0) / 2.0


ZETA_DERIV_0 = -0.5 * math.log(2.0 * math.pi)
