"""Conversion between SI input/output and natural units (hbar = c = k_B = 1).

In SI mode lengths are metres, so the natural length unit is the metre and
every energy-like quantity is an inverse metre. Constants are CODATA values
from :mod:`scipy.constants`.
"""
from scipy import constants as _c

HBAR_C = _c.hbar * _c.c  # J m
K_B = _c.k  # J / K

# natural value = SI value * factor
_TO_NATURAL = {
    "length": 1.0,  # m
    "temperature": K_B / HBAR_C,  # K -> 1/m
    "mass": _c.c / _c.hbar,  # kg -> 1/m
    "inv_energy": HBAR_C,  # 1/J -> m
    "energy": 1.0 / HBAR_C,  # J -> 1/m
    "force": 1.0 / HBAR_C,  # N -> 1/m^2
    "energy_density": 1.0 / HBAR_C,  # J/m^3 -> 1/m^4
    "dimensionless": 1.0,
    "mass_power": 1.0,  # m^(2 gamma) is quoted in 1/m^(2 gamma) in both modes
}

SI_LABELS = {
    "length": "m",
    "temperature": "K",
    "mass": "kg",
    "inv_energy": "1/J",
    "energy": "J",
    "force": "N",
    "energy_density": "J/m^3",
    "dimensionless": "1",
    "mass_power": "1/m^(2gamma)",
}

NATURAL_LABELS = {
    "length": "l",
    "temperature": "1/l",
    "mass": "1/l",
    "inv_energy": "l",
    "energy": "1/l",
    "force": "1/l^2",
    "energy_density": "1/l^4",
    "dimensionless": "1",
    "mass_power": "1/l^(2gamma)",
}


def to_natural(kind, value):
    """Convert an SI value of the given kind to natural units."""
    return value * _TO_NATURAL[kind]


def from_natural(kind, value):
    """Convert a natural-unit value of the given kind back to SI."""
    return value / _TO_NATURAL[kind]


def label(kind, units):
    return (SI_LABELS if units == "SI" else NATURAL_LABELS).get(kind, kind)
