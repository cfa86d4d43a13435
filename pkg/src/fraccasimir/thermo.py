"""Free energies of fractional Klein-Gordon fields."""
import math

from .errors import ConvergenceError, DomainError, UsageError
from .model import FieldKind
from .series import DEFAULT_CONTROL, TruncationRecord, check_record
from .specfun import digamma, riemann_zeta

INTEGER_ATOL = 1e-9


def free_energy_highT_d3(field, temperature):
    """Truncated high-temperature free energy of a type I field in D = 3.

    ``-gamma (pi^2 T^4/90 + m^2 T^2/24 - m^3 T/(12 pi))``; intended for T >> m.
    """
    if field.kind is not FieldKind.TYPE_I:
        raise UsageError("the high-temperature D=3 formula applies to type I fields only")
    if not temperature > 0:
        raise DomainError(f"temperature must be positive, got {temperature}")
    T, m = temperature, field.mass
    return -field.gamma * (
        math.pi**2 / 90.0 * T**4 + m**2 * T**2 / 24.0 - m**3 * T / (12.0 * math.pi)
    )


def half_inverse_alpha(alpha):
    """Return ``(1/(2 alpha), nearest integer or None)`` with a 1e-9 integer test."""
    x = 1.0 / (2.0 * alpha)
    k = round(x)
    return x, (int(k) if abs(x - k) < INTEGER_ATOL else None)


def free_energy_d0(field, beta, ctl=DEFAULT_CONTROL, diagnostics=None):
    """Renormalized free energy of a type III field in D = 0.

    Parameters
    ----------
    field : FieldSpec
        Type III (or II) field with ``mass > 0``.
    beta : float
        Inverse temperature; requires ``beta * mass < 2 pi``.
    ctl : SeriesControl
    diagnostics : dict, optional
        Filled with the truncation record of the l-series.

    Returns
    -------
    float

    Notes
    -----
    The l-series skips ``l = 1/(2 alpha)`` when that is an integer, and the
    logarithmic correction block is then switched on with sign
    ``(-1)^(1/(2 alpha))``.
    """
    if field.kind is FieldKind.TYPE_I:
        raise UsageError("the D=0 free energy is given for type II/III fields")
    m, alpha, g = field.mass, field.alpha, field.gamma
    if not m > 0:
        raise DomainError("the D=0 free energy needs mass > 0")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    x = beta * m / (2.0 * math.pi)
    if not x < 1.0:
        raise DomainError(f"beta*m = {beta * m} outside the convergence domain beta*m < 2 pi")
    inv, k_int = half_inverse_alpha(alpha)

    # terms alternate; once 2 alpha l > 1 they shrink at least by the ratio x^(2 alpha)
    ratio = x ** (2.0 * alpha)
    log_x = math.log(x)
    acc = 0.0
    term = 0.0
    l = 0
    converged = False
    while l < ctl.max_terms:
        l += 1
        if k_int is not None and l == k_int:
            continue
        mag = math.exp(2.0 * alpha * l * log_x) * riemann_zeta(2.0 * alpha * l) / l
        term = (-1.0) ** l * mag
        acc += term
        if 2.0 * alpha * l > 2.0 and abs(term) * ratio / (1.0 - ratio) <= ctl.rel_tol * abs(acc):
            converged = True
            break
    rec = TruncationRecord("l", l, abs(term) * ratio / (1.0 - ratio), acc, converged)
    if diagnostics is not None:
        diagnostics["l_series"] = rec.as_dict()
    if not converged:
        raise ConvergenceError("D=0 free energy series hit max_terms", rec.as_dict())
    check_record(rec, ctl, "D=0 free energy")

    bracket = math.log(m ** (2.0 * alpha)) + alpha * math.log(beta**2) - 2.0 * acc
    if k_int is not None:
        sign = -1.0 if k_int % 2 else 1.0
        psi1 = digamma(1.0)
        bracket += sign * (beta * m / math.pi) * (
            alpha * (2.0 * math.log(2.0 * math.pi / (beta * m)) + 2.0 * psi1)
            - digamma(float(k_int)) + psi1
        )
    # gamma applied last so that F(gamma) == gamma * F(1) bit for bit
    return g * (bracket / (2.0 * beta))
