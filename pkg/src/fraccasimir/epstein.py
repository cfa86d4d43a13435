"""Epstein zeta function over Z^p minus the origin.

    Z_p(s; a_1..a_p) = sum_{k != 0} (sum_i a_i^2 k_i^2)^(-s)

continued to all real ``s`` by peeling one axis at a time. With ``a`` the
peeled weight and ``Q(k')`` the quadratic form of the remaining axes,
Poisson resummation gives, for ``L_p(s) = Gamma(s) Z_p(s)``::

    L_p(s) = 2 a^(-2s) Gamma(s) zeta(2s)
             + sqrt(pi)/a * L_{p-1}(s - 1/2)
             + 4 sqrt(pi)/a * sum_{k' != 0} sum_{n >= 1}
                   (pi n / (a sqrt(Q)))^(s-1/2) K_{s-1/2}(2 pi n sqrt(Q) / a)

``L_p`` has poles only at ``s = 0`` and ``s = p/2``; the cancelling pair of
poles at ``s = 1/2`` (``p >= 2``) is resolved analytically.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import ConvergenceError, DomainError, PoleError
from .model import merge_degenerate
from .series import DEFAULT_CONTROL
from .specfun import EULER_GAMMA, gamma, riemann_zeta, rgamma

SQRT_PI = math.sqrt(math.pi)
POLE_ATOL = 1e-8
# half-width of the interpolation window around the removable point s = 1/2
_HALF_WINDOW = 1e-4


@dataclass(frozen=True)
class LatticeWeights:
    """Positive axis weights (a_1, ..., a_p) of the diagonal quadratic form."""

    weights: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise DomainError("need at least one lattice weight (p >= 1)")
        if any(not x > 0.0 for x in w):
            raise DomainError("lattice weights must be positive")
        object.__setattr__(self, "weights", w)

    @property
    def p(self):
        return len(self.weights)


def _as_weights(w):
    if isinstance(w, LatticeWeights):
        return w
    return LatticeWeights(tuple(np.atleast_1d(w)))


def gamma_zeta2(s):
    """Gamma(s) zeta(2s), finite everywhere except s = 0 and s = 1/2."""
    if s == 0.0 or s == 0.5:
        raise PoleError(f"Gamma(s) zeta(2s) has a pole at s = {s}")
    if s < 0 and s == math.floor(s):
        n = int(-s)
        # Gamma pole times trivial zero: (2n)! zeta(2n+1) / (n! (2 pi)^(2n))
        return math.exp(
            math.lgamma(2 * n + 1) - math.lgamma(n + 1) - 2 * n * math.log(2 * math.pi)
        ) * riemann_zeta(2.0 * n + 1.0)
    return gamma(s) * riemann_zeta(2.0 * s)


def _orthant_shells(weights, radius):
    """Distinct sqrt(Q) over k != 0 with Q <= radius^2, with multiplicities."""
    if radius <= 0:
        return np.empty(0), np.empty(0)
    sq = np.zeros(1)
    mult = np.ones(1)
    for w in weights:
        kmax = int(math.floor(radius / w))
        k = np.arange(0, kmax + 1)
        sq = (sq[:, None] + (w * k[None, :]) ** 2).ravel()
        mult = (mult[:, None] * np.where(k == 0, 1.0, 2.0)[None, :]).ravel()
        keep = sq <= radius**2 * (1 + 1e-12)
        sq, mult = sq[keep], mult[keep]
    nz = sq > 0
    return merge_degenerate(np.sqrt(sq[nz]), mult[nz])


def _bessel_block(s, a, rest, ctl):
    """sum_{k'} sum_n (pi n/(a sqrt Q))^nu K_nu(2 pi n sqrt Q / a), nu = s - 1/2."""
    nu = s - 0.5
    b_min = 2.0 * math.pi * min(rest) / a
    budget = ctl.log_cut + abs(nu)
    b_cut = max(b_min, abs(nu)) + budget
    b_cut += (len(rest) + 1) * math.log(2.0 + b_cut)
    root_q, mult = _orthant_shells(rest, a * b_cut / (2.0 * math.pi))
    if root_q.size == 0:
        return 0.0, {"rows": 0, "n_max": 0, "last_term": 0.0}
    b = 2.0 * math.pi * root_q / a
    c = math.pi / (a * root_q)
    n_max = kernels.n_cutoffs(nu, b, ctl.rel_tol)
    if n_max.max() > ctl.max_terms:
        raise ConvergenceError(
            "Epstein Bessel sum needs more terms than max_terms",
            {"n_max": int(n_max.max()), "max_terms": ctl.max_terms},
        )
    total, last, failed = kernels.bessel_nsum(
        nu, b, c, mult, 0.0, n_max, ctl.rel_tol, ctl.quadrature_levels
    )
    if failed:
        raise ConvergenceError("Bessel quadrature failed inside Epstein sum", {"nu": nu})
    diag = {"rows": int(root_q.size), "n_max": int(n_max.max()), "last_term": last,
            "b_cut": b_cut}
    return total, diag


def _lambda(s, weights, ctl, diag):
    p = len(weights)
    if abs(s - 0.5 * p) < POLE_ATOL:
        raise PoleError(f"Epstein zeta Z_{p} has a pole at s = {0.5 * p}")
    if s == 0.0:
        raise PoleError("Gamma(s) Z(s) has a pole at s = 0")
    a, rest = weights[0], weights[1:]
    if p == 1:
        return 2.0 * a ** (-2.0 * s) * gamma_zeta2(s)
    if abs(s - 0.5) < _HALF_WINDOW:
        return _lambda_near_half(s, weights, ctl, diag)
    head = 2.0 * a ** (-2.0 * s) * gamma_zeta2(s)
    lower = SQRT_PI / a * _lambda(s - 0.5, rest, ctl, diag)
    block, d = _bessel_block(s, a, rest, ctl)
    diag.setdefault("blocks", []).append(dict(d, p=p, s=s))
    tail = 4.0 * SQRT_PI / a * block
    val = head + lower + tail
    scale = abs(head) + abs(lower) + abs(tail)
    if 4.0 * SQRT_PI / a * d["last_term"] > ctl.rel_tol * scale + ctl.abs_tol:
        raise ConvergenceError("Epstein Bessel sum truncated too early", d)
    return val


def _lambda_half(weights, ctl, diag):
    # finite value of the cancelling poles of the zeta and L_{p-1} terms
    a, rest = weights[0], weights[1:]
    dz = _deriv0(rest, ctl, diag)
    block, d = _bessel_block(0.5, a, rest, ctl)
    diag.setdefault("blocks", []).append(dict(d, p=len(weights), s=0.5))
    return SQRT_PI / a * (2.0 * EULER_GAMMA - 2.0 * math.log(2.0 * a) + dz) \
        + 4.0 * SQRT_PI / a * block


def _lambda_near_half(s, weights, ctl, diag):
    center = _lambda_half(weights, ctl, diag)
    if s == 0.5:
        return center
    offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * _HALF_WINDOW
    vals = []
    for off in offsets:
        if off == 0.0:
            vals.append(center)
            continue
        a, rest = weights[0], weights[1:]
        x = 0.5 + off
        head = 2.0 * a ** (-2.0 * x) * gamma_zeta2(x)
        lower = SQRT_PI / a * _lambda(x - 0.5, rest, ctl, diag)
        block, _ = _bessel_block(x, a, rest, ctl)
        vals.append(head + lower + 4.0 * SQRT_PI / a * block)
    # Lagrange interpolation through the five nodes
    xs = 0.5 + offsets
    out = 0.0
    for i, xi in enumerate(xs):
        li = 1.0
        for j, xj in enumerate(xs):
            if j != i:
                li *= (s - xj) / (xi - xj)
        out += li * vals[i]
    return out


def _deriv0(weights, ctl, diag):
    a, rest = weights[0], weights[1:]
    val = 2.0 * math.log(a / (2.0 * math.pi))
    if not rest:
        return val
    val += SQRT_PI / a * _lambda(-0.5, rest, ctl, diag)
    block, d = _bessel_block(0.0, a, rest, ctl)
    diag.setdefault("blocks", []).append(dict(d, p=len(weights), s=0.0))
    return val + 4.0 * SQRT_PI / a * block


def _sorted(w):
    return tuple(sorted(_as_weights(w).weights))


def epstein_gamma_zeta(s, w, ctl=DEFAULT_CONTROL, diagnostics=None):
    """Gamma(s) Z_p(s; w), finite at the trivial zeros s = -1, -2, ...

    Raises :class:`PoleError` at ``s = 0`` and ``s = p/2``.
    """
    diag = {} if diagnostics is None else diagnostics
    return _lambda(float(s), _sorted(w), ctl, diag)


def epstein_zeta(s, w, ctl=DEFAULT_CONTROL, diagnostics=None):
    """Analytically continued Epstein zeta function Z_p(s; a_1, ..., a_p).

    Parameters
    ----------
    s : float
        Real argument, ``s != p/2``.
    w : LatticeWeights or sequence of float
        Axis weights; the lattice excludes ``k = 0``.
    ctl : SeriesControl

    Returns
    -------
    float
    """
    s = float(s)
    weights = _sorted(w)
    if abs(s - 0.5 * len(weights)) < POLE_ATOL:
        raise PoleError(f"Epstein zeta Z_{len(weights)} has a pole at s = {0.5 * len(weights)}")
    if s == 0.0:
        # only the Gamma-pole term survives division by Gamma(s)
        return 2.0 * riemann_zeta(0.0)
    diag = {} if diagnostics is None else diagnostics
    return _lambda(s, weights, ctl, diag) * rgamma(s)


def epstein_zeta_deriv0(w, ctl=DEFAULT_CONTROL, diagnostics=None):
    """dZ_p/ds at s = 0 by term-wise differentiation of the axis recursion::

        Z'_p(0) = 2 ln(a/2pi) + sqrt(pi)/a L_{p-1}(-1/2) + 4 sqrt(pi)/a S(0)
    """
    diag = {} if diagnostics is None else diagnostics
    return _deriv0(_sorted(w), ctl, diag)
