"""Constants shared by the numba and numpy kernel implementations."""
import math

import numpy as np

# Integrand is cut where it has fallen e^-LOG_CUT below its peak.
LOG_CUT = 50.0
MIN_NODES = 8


def n_cutoffs(nu, b, rel_tol):
    """Per-row upper limit on n for sums of ``(n c)^nu K_nu(n b)``.

    Terms are flat (or growing) while ``n b < |nu|`` and decay at least like
    ``exp(-n b)`` beyond; the limit leaves ``ln(1/rel_tol)`` plus margin of
    decay after the plateau, with a logarithmic allowance for the number of
    plateau terms.
    """
    b = np.asarray(b, dtype=np.float64)
    budget = math.log(1.0 / rel_tol) + 8.0
    anu = abs(nu)
    n0 = np.ceil((anu + 1.0) / b)
    extra = (budget + (anu + 1.0) * np.log1p(n0)) / b
    return (n0 + np.ceil(extra)).astype(np.int64)
