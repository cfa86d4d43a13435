"""Casimir energies, forces and topological masses of fractional Klein-Gordon fields."""
from .errors import (
    ConvergenceError,
    DomainError,
    FracCasimirError,
    NonrenormalizableError,
    PoleError,
    UsageError,
)
from .model import (
    BoundarySpec,
    Coupling,
    FieldKind,
    FieldSpec,
    ModeSpectrum,
    PistonGeometry,
    ThermalState,
    TorusTopology,
)
from .series import DEFAULT_CONTROL, SeriesControl

__version__ = "0.1.0"
