"""Cusp-flattening maps of finite distortion.

A homeomorphism of the unit disk that opens an inward power cusp
``|y| < x**beta`` into a wedge, with tools to integrate powers of its
distortion, locate the critical cusp power, and check the companion
reflection, boundary and three-point estimates numerically.
"""

from .criticality import CriticalityVerdict, classify, empirical_verdict
from .exceptions import (
    CuspflatError,
    DomainError,
    InfeasibleConfigurationError,
    SingularPointError,
)
from .exponents import ExponentPair, beta_critical, critical_branch, max_p_for_beta
from .geometry import CuspShape, Orientation
from .mapping import CuspMap, forced_map, make_map
from .quadrature import Region, annulus_profile, integrate_distortion, spherical_energy

__version__ = "0.1.0"

__all__ = [
    "CriticalityVerdict",
    "CuspMap",
    "CuspShape",
    "CuspflatError",
    "DomainError",
    "ExponentPair",
    "InfeasibleConfigurationError",
    "Orientation",
    "Region",
    "SingularPointError",
    "annulus_profile",
    "beta_critical",
    "classify",
    "critical_branch",
    "empirical_verdict",
    "forced_map",
    "integrate_distortion",
    "make_map",
    "max_p_for_beta",
    "spherical_energy",
]
