"""Casimir piston energies and forces with a fractional Neumann piston.

The piston sits at distance ``a`` inside a semi-infinite Dirichlet cylinder
with rectangular cross section; the piston carries a fractional Neumann
condition of order ``mu``. All sums use the real part of the boundary phase,
``cos(pi n mu)``, and are halved for ``mu`` in {0, 1}.

Massive type III sums are organized as

    sum_j coef_j sum_omega w(omega) omega^p sum_n cos(pi n mu) (n a/omega)^nu_j K_nu_j(2 n a omega)

with ``j`` outermost (the ``m^(2 alpha j)`` expansion), then the frequencies
``omega`` (transverse modes combined with Matsubara frequencies at T > 0),
then ``n``.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import ConvergenceError, DomainError
from .model import BoundarySpec, ModeSpectrum, thermal_modes, transverse_spectrum
from .series import DEFAULT_CONTROL

SQRT_PI = math.sqrt(math.pi)
J_STOP_RUN = 3


@dataclass
class PistonResult:
    """Energy or force with the truncation record of every summation index."""

    value: float
    series_diagnostics: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def _halving(mu):
    return 0.5 if mu == 0.0 or mu == 1.0 else 1.0


def _mu(boundary):
    if isinstance(boundary, BoundarySpec):
        return boundary.mu
    return BoundarySpec(float(boundary)).mu


def omega_cutoff(a, omega_min, ctl, dim, extra=0.0):
    """Frequency cutoff leaving ``exp(-log_cut)`` decay of ``exp(-2 a omega)``.

    ``dim`` counts the summed frequency dimensions; a logarithmic allowance
    covers the growth of the mode count.
    """
    budget = ctl.log_cut + extra
    cut = omega_min + budget / (2.0 * a)
    for _ in range(4):
        cut = omega_min + (budget + dim * math.log(2.0 + 2.0 * a * cut)) / (2.0 * a)
    return cut


def _as_modes(modes):
    if isinstance(modes, ModeSpectrum):
        return modes.omega, modes.multiplicity.astype(np.float64)
    arr = np.asarray(list(modes), dtype=np.float64)
    if arr.size == 0:
        raise DomainError("mode list is empty")
    if arr.ndim == 1:
        return arr, np.ones(arr.size)
    return arr[:, 0], arr[:, 1]


def massless_piston_force(gamma, mu, a, temperature, modes, ctl=DEFAULT_CONTROL):
    """Finite-temperature force on a piston from a massless type I field.

    ``F = -2 gamma T Re sum_j sum_{l in Z} e^{i pi mu} x / (exp(2 a x) - e^{i pi mu})``
    with ``x = sqrt(m_j^2 + (2 pi l T)^2)``; halved for ``mu`` in {0, 1}.

    Parameters
    ----------
    gamma : float
        Fractional exponent (global prefactor).
    mu : float
        Fractional Neumann order on the piston, in [0, 1].
    a : float
        Piston-to-wall distance.
    temperature : float
        T > 0.
    modes : ModeSpectrum or sequence of (m_j, multiplicity)
        Dirichlet eigenfrequencies of the cross section. The list must reach
        far enough that its last mode is negligible.
    ctl : SeriesControl

    Returns
    -------
    PistonResult
    """
    mu = _mu(mu)
    if not a > 0 or not temperature > 0 or not gamma > 0:
        raise DomainError("massless_piston_force needs a, T, gamma > 0")
    m_j, mult = _as_modes(modes)
    if np.any(~(m_j > 0)):
        raise DomainError("mode frequencies must be positive")
    order = np.argsort(m_j, kind="stable")
    m_j, mult = m_j[order], mult[order]
    step = 2.0 * math.pi * temperature
    cut = omega_cutoff(a, float(m_j[0]), ctl, 1)
    l_max = int(math.ceil(math.sqrt(max(cut**2 - m_j[0] ** 2, 0.0)) / step))
    if l_max > ctl.max_terms:
        raise ConvergenceError("Matsubara sum needs more than max_terms terms",
                               {"l_max": l_max, "max_terms": ctl.max_terms})
    cos_t = math.cos(math.pi * mu)
    total = 0.0
    scale = 0.0
    last_l = 0.0
    for l in range(l_max + 1):
        # modes with sqrt(m^2 + (2 pi l T)^2) beyond the cutoff are negligible
        room = cut**2 - (step * l) ** 2
        k = int(np.searchsorted(m_j, math.sqrt(max(room, 0.0)), side="right"))
        x = np.sqrt(m_j[:k] ** 2 + (step * l) ** 2)
        y = np.exp(-2.0 * a * x)
        # Re[e^{i t} / (e^{2ax} - e^{i t})] with y = e^{-2ax}
        terms = (1.0 if l == 0 else 2.0) * mult[:k] * x * (y * cos_t - y * y) \
            / (1.0 - 2.0 * y * cos_t + y * y)
        total += math.fsum(terms)
        scale += float(np.abs(terms).sum())
        if l == l_max and k:
            last_l = float(np.abs(terms).max())
    # a finite list is taken as the whole spectrum; its last mode is only reported
    y = math.exp(-2.0 * a * m_j[-1])
    last_mode = mult[-1] * m_j[-1] * y / (1.0 - y) if m_j[-1] < cut else 0.0
    value_unhalved = -2.0 * gamma * temperature * total
    diag = {
        "l_max": l_max,
        "n_modes": int(m_j.size),
        "omega_cutoff": cut,
        "last_term_l": last_l,
        "last_term_mode": float(last_mode),
        "partial_sum": total,
        "unhalved": value_unhalved,
    }
    if last_l > ctl.rel_tol * scale + ctl.abs_tol:
        raise ConvergenceError("massless piston sum truncated too early", diag)
    return PistonResult(_halving(mu) * value_unhalved, diag)


def massless_piston_force_rect(gamma, mu, geometry, temperature, ctl=DEFAULT_CONTROL):
    """:func:`massless_piston_force` for a rectangular cross section."""
    cut = omega_cutoff(geometry.a, geometry.lowest_mode, ctl, geometry.D)
    spec = transverse_spectrum(geometry, cut)
    return massless_piston_force(gamma, mu, geometry.a, temperature, spec, ctl)


class _Frequencies:
    """Frequency table for the inner sums, rebuilt when a larger cutoff is needed."""

    def __init__(self, geometry, temperature, ctl):
        self.geometry = geometry
        self.temperature = temperature
        self.ctl = ctl
        self.cutoff = 0.0
        self.l_max = 0
        self.omega = self.weight = None

    def ensure(self, extra):
        g = self.geometry
        dim = g.D if self.temperature > 0 else g.D - 1
        cut = omega_cutoff(g.a, g.lowest_mode, self.ctl, dim, extra)
        if cut > self.cutoff:
            spec = transverse_spectrum(g, cut)
            if self.temperature > 0:
                om, w, self.l_max = thermal_modes(spec, self.temperature, cut)
            else:
                om, w = spec.omega, spec.multiplicity.astype(np.float64)
            self.omega, self.weight, self.cutoff = om, w, cut
        return self.omega, self.weight


def _block_sum(freqs, a, nu, omega_power, theta, ctl):
    om, w = freqs.ensure(abs(nu))
    b = 2.0 * a * om
    c = a / om
    weights = w * om**omega_power if omega_power else w
    n_max = kernels.n_cutoffs(nu, b, ctl.rel_tol)
    if n_max.max() > ctl.max_terms:
        raise ConvergenceError("piston n-sum needs more than max_terms terms",
                               {"n_max": int(n_max.max()), "nu": nu})
    total, last, failed = kernels.bessel_nsum(
        nu, b, c, weights, theta, n_max, ctl.rel_tol, ctl.quadrature_levels
    )
    if failed:
        raise ConvergenceError("Bessel quadrature failed inside piston sum", {"nu": nu})
    return total, last, int(n_max.max())


def _massive_series(field_spec, boundary, geometry, temperature, ctl, blocks, label):
    """Sum ``blocks`` over j; each block is ``(coef(j), nu(j), omega_power)``."""
    mu = _mu(boundary)
    alpha, m = field_spec.alpha, field_spec.mass
    if geometry.D < 2:
        raise DomainError("a piston needs D >= 2")
    omega_min = geometry.lowest_mode
    if not m < omega_min:
        raise DomainError(
            f"mass {m} outside the convergence domain m < lowest transverse mode {omega_min}"
        )
    freqs = _Frequencies(geometry, temperature, ctl)
    theta = math.pi * mu
    acc = 0.0
    quiet = 0
    j = 0
    n_max = 0
    last_rel = 0.0
    scale = 0.0  # sum of block magnitudes; guards sums that cancel to near zero
    j_terms = []
    while True:
        term_j = 0.0
        for coef, nu, wp in blocks:
            cj = coef(j)
            if cj == 0.0:
                continue
            total, last, nm = _block_sum(freqs, geometry.a, nu(j), wp, theta, ctl)
            term_j += cj * total
            scale += abs(cj * total)
            n_max = max(n_max, nm)
            last_rel = max(last_rel, abs(cj * last))
        acc += term_j
        j_terms.append(term_j)
        if m == 0.0:
            break
        quiet = quiet + 1 if abs(term_j) <= ctl.rel_tol * scale + ctl.abs_tol else 0
        if quiet >= J_STOP_RUN:
            break
        j += 1
        if j > ctl.max_terms:
            raise ConvergenceError(f"{label}: j-series hit max_terms",
                                   {"j_max": j, "last_terms": j_terms[-3:]})
    diag = {
        "j_max": j,
        "n_max": n_max,
        "l_max": freqs.l_max if temperature > 0 else None,
        "omega_cutoff": freqs.cutoff,
        "n_frequencies": int(freqs.omega.size),
        "last_term": last_rel,
        "last_j_terms": [float(t) for t in j_terms[-3:]],
        "unhalved": acc,
    }
    if last_rel > ctl.rel_tol * scale + ctl.abs_tol:
        raise ConvergenceError(f"{label}: n-sum truncated too early", diag)
    return PistonResult(_halving(mu) * acc, diag)


def _log_coef(alpha, m, j, shift):
    # m^(2 alpha j) / Gamma(alpha j + shift) with sign (-1)^j
    if j == 0:
        return 1.0 / math.gamma(shift) if shift > 0 else 0.0
    if m == 0.0:
        return 0.0
    sign = -1.0 if j % 2 else 1.0
    return sign * math.exp(2.0 * alpha * j * math.log(m) - math.lgamma(alpha * j + shift))


def _check_T(temperature):
    if not temperature > 0:
        raise DomainError("finite-temperature piston formulas need T > 0; use the zeroT variants")


def massive_piston_energy(field_spec, boundary, geometry, temperature, ctl=DEFAULT_CONTROL):
    """Finite-temperature Casimir energy of the piston for a massive type III field.

    ``E = -(4 alpha gamma a T / sqrt(pi)) sum_j (-1)^j m^(2 alpha j) / Gamma(alpha j + 1)
    sum_n sum_k sum'_l cos(pi n mu) (n a/omega)^(alpha j - 1/2) K_(alpha j - 1/2)(2 n a omega)``
    """
    _check_T(temperature)
    al, g, m, a = field_spec.alpha, field_spec.gamma, field_spec.mass, geometry.a
    pref = -4.0 * al * g * a * temperature / SQRT_PI
    blocks = [(lambda j: pref * _log_coef(al, m, j, 1.0), lambda j: al * j - 0.5, 0)]
    return _massive_series(field_spec, boundary, geometry, temperature, ctl, blocks,
                           "massive_piston_energy")


def massive_piston_force(field_spec, boundary, geometry, temperature, ctl=DEFAULT_CONTROL):
    """Finite-temperature Casimir force ``-dE/da`` on the piston (two-block form)."""
    _check_T(temperature)
    al, g, m = field_spec.alpha, field_spec.gamma, field_spec.mass
    pref = 8.0 * al * g * temperature / SQRT_PI
    blocks = [
        (lambda j: -pref * _log_coef(al, m, j, 1.0), lambda j: al * j + 0.5, 2),
        (lambda j: pref * _log_coef(al, m, j, 0.0) if j else 0.0, lambda j: al * j - 0.5, 0),
    ]
    return _massive_series(field_spec, boundary, geometry, temperature, ctl, blocks,
                           "massive_piston_force")


def massive_piston_energy_zeroT(field_spec, boundary, geometry, ctl=DEFAULT_CONTROL):
    """Zero-temperature piston energy, ``-(alpha gamma a/pi) sum ... (n a/w)^(aj-1) K_(aj-1)``."""
    al, g, m, a = field_spec.alpha, field_spec.gamma, field_spec.mass, geometry.a
    pref = -al * g * a / math.pi
    blocks = [(lambda j: pref * _log_coef(al, m, j, 1.0), lambda j: al * j - 1.0, 0)]
    return _massive_series(field_spec, boundary, geometry, 0.0, ctl, blocks,
                           "massive_piston_energy_zeroT")


def massive_piston_force_zeroT(field_spec, boundary, geometry, ctl=DEFAULT_CONTROL):
    """Zero-temperature piston force with the ``K_(alpha j)`` and ``(2 alpha j - 1) K_(alpha j - 1)`` blocks."""
    al, g, m = field_spec.alpha, field_spec.gamma, field_spec.mass
    blocks = [
        (lambda j: -2.0 * al * g / math.pi * _log_coef(al, m, j, 1.0), lambda j: al * j, 2),
        (lambda j: al * g / math.pi * (2.0 * al * j - 1.0) * _log_coef(al, m, j, 1.0),
         lambda j: al * j - 1.0, 0),
    ]
    return _massive_series(field_spec, boundary, geometry, 0.0, ctl, blocks,
                           "massive_piston_force_zeroT")


def high_T_leading(field_spec, boundary, geometry, temperature, ctl=DEFAULT_CONTROL):
    """l = 0 part of the finite-temperature energy, the leading term for a T >> 1."""
    _check_T(temperature)
    al, g, m, a = field_spec.alpha, field_spec.gamma, field_spec.mass, geometry.a
    pref = -2.0 * al * g * a * temperature / SQRT_PI
    blocks = [(lambda j: pref * _log_coef(al, m, j, 1.0), lambda j: al * j - 0.5, 0)]
    # the zero-temperature frequency table is exactly the transverse spectrum
    return _massive_series(field_spec, boundary, geometry, 0.0, ctl, blocks, "high_T_leading")


def log_closed_form_energy(field_spec, boundary, geometry, temperature, l0_only=False,
                           ctl=DEFAULT_CONTROL):
    """Massless (m = 0) energy with the n-series summed in closed form::

        E = alpha gamma T sum_k sum'_l ln(1 - 2 cos(pi mu) e^{-2 a w} + e^{-4 a w})

    halved for ``mu`` in {0, 1}. Used as an independent check of the Bessel route.
    """
    mu = _mu(boundary)
    a = geometry.a
    cut = omega_cutoff(a, geometry.lowest_mode, ctl, geometry.D)
    spec = transverse_spectrum(geometry, cut)
    if l0_only:
        om, w = spec.omega, spec.multiplicity * 0.5
    else:
        om, w, _ = thermal_modes(spec, temperature, cut)
    x = np.exp(-2.0 * a * om)
    logs = np.log1p(-2.0 * math.cos(math.pi * mu) * x + x * x)
    val = field_spec.alpha * field_spec.gamma * temperature * float(np.dot(w, logs))
    return _halving(mu) * val
