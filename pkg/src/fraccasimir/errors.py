"""Exception hierarchy shared by all modules."""


class FracCasimirError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FracCasimirError, ValueError):
    """Input outside the mathematical or physical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at (or numerically on top of) a pole."""


class UsageError(FracCasimirError, ValueError):
    """Operation called with an incompatible configuration (e.g. wrong field type)."""


class ConvergenceError(FracCasimirError, ArithmeticError):
    """A truncated series or quadrature failed to meet its tolerance.

    Attributes
    ----------
    diagnostics : dict
        Truncation indices and last-term magnitudes at the point of failure.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NonrenormalizableError(DomainError):
    """Massless self-interacting theory at the nonrenormalizable point gamma = d/2."""
