"""Power-cusp domains and the polar bookkeeping used by the flattening map.

Points in the plane are complex numbers (scalars or numpy arrays).
Polar angles follow the convention ``theta in [0, 2 pi)`` with the cusp
axis along ``theta = 0``.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import kernels
from .exceptions import DomainError


class Orientation(str, Enum):
    INWARD = "inward"
    OUTWARD = "outward"


@dataclass(frozen=True)
class CuspShape:
    """A disk with a power cusp of exponent ``beta`` at the origin.

    The inward shape is ``B(1 - beta, r_beta)`` minus the closed wedge
    ``{x >= 0, |y| <= x**beta}``; the outward shape is the open horn
    ``{0 < x < 1, |y| < x**beta}`` glued to ``B(1 + beta, r_beta)``.
    Both disks pass through ``1 +- i``.
    """

    beta: float
    orientation: Orientation = Orientation.INWARD

    def __post_init__(self):
        if not self.beta >= 1:
            raise DomainError(f"cusp power must be >= 1, got {self.beta}")
        object.__setattr__(self, "orientation", Orientation(self.orientation))

    @property
    def radius(self):
        return math.sqrt(self.beta**2 + 1.0)

    @property
    def center(self):
        if self.orientation is Orientation.INWARD:
            return 1.0 - self.beta
        return 1.0 + self.beta


class PolarPoint(NamedTuple):
    r: float
    theta: float


class SectorBounds(NamedTuple):
    r: float
    t: float
    a: float


def normalize_angle(theta):
    """Map angles into ``[0, 2 pi)``."""
    out = np.mod(theta, 2.0 * np.pi)
    # mod can round up to exactly 2 pi for tiny negative inputs
    return np.where(out >= 2.0 * np.pi, 0.0, out)


def to_polar(z):
    z = np.asarray(z, dtype=complex)
    return np.abs(z), normalize_angle(np.angle(z))


def from_polar(r, theta):
    return np.asarray(r) * np.exp(1j * np.asarray(theta))


def solve_t(r, beta):
    """Solve ``t**2 + t**(2 beta) = r**2`` for ``t > 0``.

    Safeguarded Newton iteration bracketed in ``[0, r]``.  Accepts
    scalars or arrays; a scalar input gives a float back.
    """
    arr = np.asarray(r, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("solve_t needs r > 0")
    if beta < 1:
        raise DomainError(f"cusp power must be >= 1, got {beta}")
    if beta == 1:
        t = arr / math.sqrt(2.0)
    else:
        t = kernels.solve_t_kernel(arr, beta)
    return float(t) if np.ndim(r) == 0 else t


def wedge_half_angle(r, beta):
    """Half-opening ``arctan(t**(beta - 1))`` of the removed wedge at radius ``r``."""
    a = np.arctan(np.asarray(solve_t(r, beta)) ** (beta - 1.0))
    return float(a) if np.ndim(r) == 0 else a


def sector_bounds(r, shape):
    if not 0 < r < 1:
        raise DomainError(f"sector_bounds needs 0 < r < 1, got {r}")
    t = solve_t(r, shape.beta)
    return SectorBounds(r=r, t=t, a=math.atan(t ** (shape.beta - 1.0)))


def contains(shape, z):
    """Open-set membership; boundary points are outside."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    beta = shape.beta
    in_disk = np.abs(z - shape.center) < shape.radius
    xp = np.maximum(x, 0.0)
    if shape.orientation is Orientation.INWARD:
        in_wedge = (x >= 0) & (np.abs(y) <= xp**beta)
        out = in_disk & ~in_wedge
    else:
        in_horn = (x > 0) & (x < 1) & (np.abs(y) < xp**beta)
        out = in_disk | in_horn
    return bool(out) if out.ndim == 0 else out


def cusp_boundary(shape, x):
    """Upper and lower cusp boundary points ``x +- i x**beta``."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)) or np.any(xa > 1):
        raise DomainError("cusp_boundary needs 0 < x <= 1")
    h = xa**shape.beta
    upper, lower = xa + 1j * h, xa - 1j * h
    if np.ndim(x) == 0:
        return complex(upper), complex(lower)
    return upper, lower


def cusp_area(t, beta):
    """Area ``2 t**(beta + 1) / (beta + 1)`` of the horn ``{0 < x < t, |y| < x**beta}``.

    Exact for ``fractions.Fraction`` arguments when ``beta`` is an integer.
    """
    return 2 * t ** (beta + 1) / (beta + 1)
