"""Truncation policy shared by every spectral sum."""
from dataclasses import dataclass, field
import math

from .errors import ConvergenceError, DomainError


@dataclass(frozen=True)
class SeriesControl:
    """Tolerances and term budgets for truncated sums and quadratures.

    Parameters
    ----------
    rel_tol : float
        Relative tolerance; a truncated sum stops once its neglected tail is
        below ``rel_tol`` times the partial sum.
    abs_tol : float
        Absolute floor added to the relative criterion (guards zero sums).
    max_terms : int
        Upper bound on the number of terms per summation index.
    quadrature_levels : int
        Maximum number of step halvings in the Bessel quadrature.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_terms: int = 10**6
    quadrature_levels: int = 20

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol must be non-negative, got {self.abs_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if self.quadrature_levels < 1:
            raise DomainError("quadrature_levels must be >= 1")

    @property
    def log_cut(self):
        """Exponent budget, ``ln(1/rel_tol)`` plus a safety margin."""
        return math.log(1.0 / self.rel_tol) + 5.0

    def accepts(self, last_term, partial_sum):
        return abs(last_term) <= self.rel_tol * abs(partial_sum) + self.abs_tol


DEFAULT_CONTROL = SeriesControl()


@dataclass
class TruncationRecord:
    """Where a sum was cut and how large its last included term was."""

    index: str
    n_terms: int
    last_term: float
    partial_sum: float
    converged: bool = True
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        d = {
            "index": self.index,
            "n_terms": self.n_terms,
            "last_term": self.last_term,
            "partial_sum": self.partial_sum,
            "converged": self.converged,
        }
        d.update(self.extra)
        return d


def check_record(record, ctl, what):
    """Raise :class:`ConvergenceError` unless ``record`` meets ``ctl``."""
    ok = record.converged and ctl.accepts(record.last_term, record.partial_sum)
    record.converged = ok
    if not ok:
        raise ConvergenceError(
            f"{what}: truncated sum did not converge "
            f"(last term {record.last_term:.3e}, partial sum {record.partial_sum:.3e})",
            record.as_dict(),
        )
    return record
