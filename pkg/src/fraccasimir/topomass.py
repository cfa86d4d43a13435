"""Renormalized and topologically generated masses on T^p x R^q.

For a quartic self-interacting type I field, ``m_ren^(2 gamma)`` is the mass
coefficient of the one-loop effective potential. Its sign decides whether
the symmetric vacuum is stable (``>= 0``) or broken (``< 0``).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .epstein import _orthant_shells, epstein_gamma_zeta, epstein_zeta_deriv0
from .errors import ConvergenceError, DomainError, NonrenormalizableError, UsageError
from .model import Coupling, FieldKind
from .series import DEFAULT_CONTROL
from .specfun import digamma

BRANCH_ATOL = 1e-9
# tolerated disagreement between the two generic-branch forms before failing
CROSS_CHECK_RTOL = 1e-7
# scan points this close to a pole of Gamma(s) Z_p(s) are skipped
SCAN_POLE_GAP = 1e-6


@dataclass
class MassResult:
    """``m_ren^(2 gamma)`` with the branch that produced it."""

    m_ren_2gamma: float
    branch: str
    symmetry_broken: bool
    diagnostics: dict = field(default_factory=dict)


def _result(value, branch, diag):
    return MassResult(float(value), branch, bool(value < 0.0), diag)


def _check_field(f):
    if f.kind is not FieldKind.TYPE_I:
        raise UsageError("topological mass formulas are given for type I fields")


def _lam(lam):
    return lam.lam if isinstance(lam, Coupling) else Coupling(float(lam)).lam


def lattice_bessel_sum(nu, m, lengths, ctl=DEFAULT_CONTROL):
    """``sum_{k != 0} Q^(-nu/2) K_nu(m sqrt Q)`` with ``Q = sum (L_i k_i)^2``.

    Returns ``(value, diagnostics)``. Shells are kept while ``m sqrt Q`` stays
    within the decay budget; ``z^(-nu) K_nu(z)`` decreases monotonically, so
    the last shell bounds every omitted term.
    """
    if not m > 0:
        raise DomainError("lattice_bessel_sum needs m > 0")
    lengths = tuple(sorted(float(x) for x in lengths))
    z_min = m * lengths[0]
    budget = ctl.log_cut + abs(nu)
    z_cut = max(z_min, abs(nu)) + budget
    z_cut += (len(lengths) + 1) * math.log(2.0 + z_cut)
    root_q, mult = _orthant_shells(lengths, z_cut / m)
    z = m * root_q
    n_max = np.ones(z.size, dtype=np.int64)
    # (1/z)^nu K_nu(z) = (m sqrt Q)^(-nu) K_nu(m sqrt Q)
    total, _, failed = kernels.bessel_nsum(
        nu, z, 1.0 / z, mult, 0.0, n_max, ctl.rel_tol, ctl.quadrature_levels
    )
    if failed:
        raise ConvergenceError("Bessel quadrature failed in lattice sum", {"nu": nu})
    value = m**nu * total
    last = m**nu * mult[-1] * float(
        kernels.bessel_nsum(nu, z[-1:], 1.0 / z[-1:], np.ones(1), 0.0, n_max[-1:],
                            ctl.rel_tol, ctl.quadrature_levels)[0]
    )
    diag = {"shells": int(z.size), "z_cut": z_cut, "last_term": last, "partial_sum": value}
    if abs(last) > ctl.rel_tol * abs(value) + ctl.abs_tol:
        raise ConvergenceError("lattice Bessel sum truncated too early", diag)
    return value, diag


def massive_renormalized_mass(m, f, lam, topo, ctl=DEFAULT_CONTROL):
    """Renormalized mass of the massive theory.

    ``m_ren^(2g) = m^(2g) + lam pi^g m^(d/2 - g) / ((2 pi)^(d/2 + g) Gamma(g))
    * sum_{k != 0} Q^(-(d - 2g)/4) K_((d - 2g)/2)(m sqrt Q)``

    Parameters
    ----------
    m : float
        Bare mass, ``m > 0``.
    f : FieldSpec
        Type I field; ``f.gamma`` is the fractional exponent.
    lam : Coupling or float
    topo : TorusTopology
    ctl : SeriesControl

    Returns
    -------
    MassResult
        Always ``branch = "massive"``.
    """
    _check_field(f)
    if not m > 0:
        raise DomainError(f"bare mass must be positive, got {m}")
    lam = _lam(lam)
    g, d = f.gamma, topo.d
    base = m ** (2.0 * g)
    if topo.p == 0 or lam == 0.0:
        return _result(base, "massive", {"lattice": None})
    nu = 0.5 * (d - 2.0 * g)
    s, diag = lattice_bessel_sum(nu, m, topo.lengths, ctl)
    pref = lam * math.pi**g * m ** (0.5 * d - g) / (
        (2.0 * math.pi) ** (0.5 * d + g) * math.gamma(g)
    )
    return _result(base + pref * s, "massive", {"lattice": diag, "correction": pref * s})


def _torus_constant(topo):
    # 1 / (2^(q+1) pi^(q/2) prod L)
    q = topo.q
    return 1.0 / (2.0 ** (q + 1) * math.pi ** (0.5 * q) * math.prod(topo.lengths))


def generic_form_dual(g, lam, topo, ctl=DEFAULT_CONTROL):
    """First generic-branch form, in ``Z_p(g - q/2; 2 pi/L_i)``."""
    dual = tuple(2.0 * math.pi / x for x in topo.lengths)
    gz = epstein_gamma_zeta(g - 0.5 * topo.q, dual, ctl)
    return lam / math.gamma(g) * _torus_constant(topo) * gz


def generic_form_direct(g, lam, topo, ctl=DEFAULT_CONTROL):
    """Second generic-branch form, in ``Z_p(d/2 - g; L_i)``."""
    d = topo.d
    gz = epstein_gamma_zeta(0.5 * d - g, topo.lengths, ctl)
    return lam / math.gamma(g) / (2.0 ** (2.0 * g + 1.0) * math.pi ** (0.5 * d)) * gz


def massless_topological_mass(f, lam, topo, ctl=DEFAULT_CONTROL, cross_check=True):
    """Topologically generated mass of the massless theory.

    Branches: ``p0`` (no compact directions, result 0), ``generic``
    (``gamma != q/2``, evaluated from the direct-length form and checked
    against the dual form), ``resonant`` (``gamma = q/2``, uses ``Z'_p(0)``).

    Raises
    ------
    NonrenormalizableError
        If ``gamma = d/2`` within 1e-9.
    PoleError
        If an Epstein pole is hit.
    ConvergenceError
        If the two generic forms disagree beyond 1e-7 relative.
    """
    _check_field(f)
    lam = _lam(lam)
    g, d, q = f.gamma, topo.d, topo.q
    if abs(g - 0.5 * d) < BRANCH_ATOL:
        raise NonrenormalizableError(
            f"the massless theory is nonrenormalizable at gamma = d/2 = {0.5 * d}"
        )
    if topo.p == 0:
        return _result(0.0, "p0", {})
    if abs(g - 0.5 * q) < BRANCH_ATOL:
        dual = tuple(2.0 * math.pi / x for x in topo.lengths)
        dz = epstein_zeta_deriv0(dual, ctl)
        brace = 1.0 + g * (digamma(g) - digamma(1.0)) + g * dz
        value = lam / math.gamma(g + 1.0) * _torus_constant(topo) * brace
        return _result(value, "resonant", {"zeta_deriv0": dz})
    value = generic_form_direct(g, lam, topo, ctl)
    diag = {}
    if cross_check:
        other = generic_form_dual(g, lam, topo, ctl)
        diff = abs(value - other) / max(abs(value), abs(other), ctl.abs_tol)
        diag.update(dual_form=other, form_rel_diff=diff)
        if diff > max(CROSS_CHECK_RTOL, 1e3 * ctl.rel_tol):
            raise ConvergenceError("generic-branch forms disagree", diag)
    return _result(value, "generic", diag)


def unit_volume_lengths(ratios):
    """Scale ``ratios`` so that the product of the lengths is 1."""
    r = np.asarray(ratios, dtype=np.float64)
    if r.ndim != 1 or r.size == 0 or np.any(~(r > 0)):
        raise DomainError("length ratios must be positive")
    return tuple(float(x) for x in r / np.prod(r) ** (1.0 / r.size))


def preset_ratios(p, values):
    """Length-ratio presets for sign maps.

    ``p = 2``: ``L_1 : L_2 = k : 1``. ``p = 3``: ``L_1 : L_2 : L_3 = k : 1 : 1``.
    For the two-parameter ``1 : k_2 : k_3`` family pass explicit tuples instead.
    """
    if p == 2:
        return [(float(k), 1.0) for k in values]
    if p == 3:
        return [(float(k), 1.0, 1.0) for k in values]
    raise DomainError("presets exist for p = 2 and p = 3")


@dataclass
class ScanPoint:
    ratios: tuple
    lengths: tuple
    s: float
    value: float  # Gamma(s) Z_p(s; L); same sign as m_ren^(2 gamma)
    sign: int


def symmetry_region_scan(p, length_ratios, s_grid, lam=1.0, ctl=DEFAULT_CONTROL, jobs=1):
    """Sign map of ``m_ren^(2 gamma)`` over length ratios and ``s = d/2 - gamma``.

    Lengths are normalized to unit volume. In the generic massless branch the
    sign of ``m_ren^(2 gamma)`` equals the sign of ``lam Gamma(s) Z_p(s; L)``,
    so the map depends on ``s`` and the lengths only.

    Returns
    -------
    points : list of ScanPoint
        In input order (ratios outer, ``s`` inner), pole-adjacent ``s`` omitted.
    diagnostics : dict
        ``skipped`` lists omitted ``s`` values; for ``p <= 9`` ``claim_holds``
        reports whether every negative point satisfies ``0 < s <= p/2``.
    """
    if p < 1:
        raise DomainError("the scan needs p >= 1")
    lam = _lam(lam)
    ratios = [tuple(float(x) for x in r) for r in length_ratios]
    for r in ratios:
        if len(r) != p:
            raise DomainError(f"ratio tuple {r} does not have p = {p} entries")
    s_vals = [float(s) for s in s_grid]
    skipped = [s for s in s_vals if min(abs(s), abs(s - 0.5 * p)) < SCAN_POLE_GAP]
    keep = [s for s in s_vals if s not in skipped]
    tasks = [(r, unit_volume_lengths(r), s) for r in ratios for s in keep]

    def evaluate(task):
        r, lengths, s = task
        val = lam * epstein_gamma_zeta(s, lengths, ctl)
        return ScanPoint(r, lengths, s, val, int(np.sign(val)))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(evaluate, tasks))
    else:
        points = [evaluate(t) for t in tasks]
    diag = {"skipped": skipped}
    if p <= 9 and lam > 0:
        diag["claim_holds"] = all(0.0 < pt.s <= 0.5 * p for pt in points if pt.sign < 0)
    return points, diag


__all__ = [
    "MassResult",
    "ScanPoint",
    "lattice_bessel_sum",
    "massive_renormalized_mass",
    "massless_topological_mass",
    "generic_form_dual",
    "generic_form_direct",
    "symmetry_region_scan",
    "unit_volume_lengths",
    "preset_ratios",
]
