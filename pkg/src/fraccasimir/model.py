"""Domain types and mode-spectrum generators.

Natural units throughout: hbar = c = k_B = 1, lengths in one user-chosen
unit and energies, temperatures and masses in its inverse.
"""
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .errors import DomainError

DEGENERACY_RTOL = 1e-12


class FieldKind(str, Enum):
    TYPE_I = "I"  # (-Delta + m^2)^gamma
    TYPE_II = "II"  # (-Delta)^alpha + m^(2 alpha)
    TYPE_III = "III"  # [(-Delta)^alpha + m^(2 alpha)]^gamma


@dataclass(frozen=True)
class FieldSpec:
    """Fractional Klein-Gordon operator family and its exponents.

    Type I ignores ``alpha`` (stored as 1); type II forces ``gamma = 1``.
    """

    kind: FieldKind = FieldKind.TYPE_III
    alpha: float = 1.0
    gamma: float = 1.0
    mass: float = 0.0

    def __post_init__(self):
        kind = FieldKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is FieldKind.TYPE_I:
            object.__setattr__(self, "alpha", 1.0)
        elif kind is FieldKind.TYPE_II:
            object.__setattr__(self, "gamma", 1.0)
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.gamma > 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if not self.mass >= 0.0:
            raise DomainError(f"mass must be non-negative, got {self.mass}")

    @classmethod
    def type_i(cls, gamma=1.0, mass=0.0):
        return cls(FieldKind.TYPE_I, 1.0, gamma, mass)

    @classmethod
    def type_iii(cls, alpha=1.0, gamma=1.0, mass=0.0):
        return cls(FieldKind.TYPE_III, alpha, gamma, mass)


@dataclass(frozen=True)
class ThermalState:
    temperature: float

    def __post_init__(self):
        if not self.temperature >= 0.0:
            raise DomainError(f"temperature must be >= 0, got {self.temperature}")

    @property
    def beta(self):
        if self.temperature == 0.0:
            return math.inf
        return 1.0 / self.temperature


@dataclass(frozen=True)
class PistonGeometry:
    """Piston at distance ``a`` inside ``[0, inf) x [0, L_2] x ... x [0, L_D]``."""

    a: float
    transverse_lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.transverse_lengths)
        object.__setattr__(self, "transverse_lengths", lengths)
        if not self.a > 0.0:
            raise DomainError(f"piston distance a must be positive, got {self.a}")
        if any(not x > 0.0 for x in lengths):
            raise DomainError("transverse lengths must be positive")

    @property
    def D(self):
        return len(self.transverse_lengths) + 1

    @property
    def lowest_mode(self):
        return math.pi * math.sqrt(sum(1.0 / x**2 for x in self.transverse_lengths))

    def with_a(self, a):
        return PistonGeometry(a, self.transverse_lengths)


@dataclass(frozen=True)
class BoundarySpec:
    """Fractional Neumann order ``mu`` on the piston (0 Dirichlet, 1 Neumann)."""

    mu: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise DomainError(f"mu must lie in [0, 1], got {self.mu}")

    @property
    def is_endpoint(self):
        return self.mu == 0.0 or self.mu == 1.0


@dataclass(frozen=True)
class TorusTopology:
    """Spacetime T^p x R^q with compactification lengths L_1..L_p."""

    lengths: tuple
    q: int

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lengths)
        object.__setattr__(self, "lengths", lengths)
        if any(not x > 0.0 for x in lengths):
            raise DomainError("compactification lengths must be positive")
        if self.q < 0 or int(self.q) != self.q:
            raise DomainError(f"q must be a non-negative integer, got {self.q}")

    @property
    def p(self):
        return len(self.lengths)

    @property
    def d(self):
        return self.p + self.q


@dataclass(frozen=True)
class Coupling:
    lam: float = 1.0

    def __post_init__(self):
        if not self.lam >= 0.0:
            raise DomainError(f"coupling must be non-negative, got {self.lam}")


@dataclass(frozen=True)
class ModeSpectrum:
    """Ascending distinct frequencies with their multiplicities."""

    omega: np.ndarray
    multiplicity: np.ndarray
    cutoff: float = math.inf
    extra: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return self.omega.size

    def __iter__(self):
        return zip(self.omega.tolist(), self.multiplicity.tolist())

    @property
    def total(self):
        return int(self.multiplicity.sum())


def merge_degenerate(omega, weight, rtol=DEGENERACY_RTOL):
    """Sort frequencies and merge those equal to relative ``rtol``."""
    omega = np.asarray(omega, dtype=np.float64)
    weight = np.asarray(weight)
    order = np.argsort(omega, kind="stable")
    omega, weight = omega[order], weight[order]
    if omega.size == 0:
        return omega, weight
    starts = [0]
    for i in range(1, omega.size):
        if omega[i] - omega[starts[-1]] > rtol * omega[i]:
            starts.append(i)
    starts = np.asarray(starts)
    return omega[starts], np.add.reduceat(weight, starts)


def transverse_spectrum(geometry, cutoff):
    """Dirichlet eigenfrequencies of the cross section up to ``cutoff``.

    ``omega^2 = sum_i (pi k_i / L_i)^2`` with ``k_i >= 1``.

    Raises
    ------
    DomainError
        If ``cutoff`` lies below the lowest mode or the cross section is empty
        (``D = 1``).
    """
    lengths = geometry.transverse_lengths
    if not lengths:
        raise DomainError("a piston needs D >= 2 (at least one transverse length)")
    if cutoff < geometry.lowest_mode:
        raise DomainError(
            f"cutoff {cutoff} is below the lowest transverse mode {geometry.lowest_mode}"
        )
    # k_i ranges are bounded by the other axes sitting at k = 1
    base = sum((math.pi / x) ** 2 for x in lengths)
    axes = []
    for x in lengths:
        room = cutoff**2 - base + (math.pi / x) ** 2
        kmax = int(math.floor(math.sqrt(room) * x / math.pi + 1e-12))
        axes.append((np.arange(1, kmax + 1) * math.pi / x) ** 2)
    sq = axes[0]
    for ax in axes[1:]:
        sq = (sq[:, None] + ax[None, :]).ravel()
        sq = sq[sq <= cutoff**2 * (1 + 1e-12)]
    omega = np.sqrt(sq)
    omega = omega[omega <= cutoff * (1 + 1e-12)]
    om, mult = merge_degenerate(omega, np.ones(omega.size, dtype=np.int64))
    return ModeSpectrum(om, mult.astype(np.int64), cutoff)


def matsubara(thermal, l):
    """Bosonic Matsubara frequency 2 pi l T."""
    if not thermal.temperature > 0.0:
        raise DomainError("Matsubara frequencies need T > 0; zero temperature uses integrals")
    return 2.0 * math.pi * l * thermal.temperature


def thermal_modes(spectrum, temperature, cutoff):
    """Combine transverse modes with Matsubara frequencies.

    Returns ``(omega, weight, l_max)`` where ``omega = sqrt(w_k^2 + (2 pi l T)^2)``
    for ``l >= 0`` up to ``cutoff`` and ``weight`` is the multiplicity times the
    primed-sum factor (1/2 for ``l = 0``).
    """
    step = 2.0 * math.pi * temperature
    om_k = spectrum.omega
    mult = spectrum.multiplicity.astype(np.float64)
    l_max = int(math.floor(math.sqrt(max(cutoff**2 - om_k[0] ** 2, 0.0)) / step))
    oms, ws = [], []
    for l in range(l_max + 1):
        w2 = om_k**2 + (step * l) ** 2
        keep = w2 <= cutoff**2
        if not keep.any():
            break
        oms.append(np.sqrt(w2[keep]))
        ws.append(mult[keep] * (0.5 if l == 0 else 1.0))
    return np.concatenate(oms), np.concatenate(ws), l_max


def weyl_count(geometry, cutoff):
    """Leading Weyl estimate of the number of transverse modes below ``cutoff``."""
    n = len(geometry.transverse_lengths)
    vol = math.prod(geometry.transverse_lengths)
    # volume of the positive orthant of an n-ball of radius cutoff/pi, times vol
    ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return vol * ball * (cutoff / math.pi) ** n / 2**n

