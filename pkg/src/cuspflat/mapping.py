"""The explicit cusp-flattening homeomorphism of the unit disk.

In polar coordinates the map is ``f(r, theta) = (rt(r), tht(theta, r))``.
The radial part ``rt(r) = e * exp(-r**-gamma)`` squeezes the tip
(``rt(r) = r`` when ``gamma == 0``).  The angular part is affine in
``theta`` on each of the two arcs cut out of the circle ``|z| = r`` by
the cusp: the arc inside the cusp domain goes linearly onto
``(pi/4, 7pi/4)`` and the arc inside the removed wedge onto
``(-pi/4, pi/4)``.  Outside the unit disk the map is the identity.

All evaluation functions are vectorised: radii, angles and complex
points may be scalars or numpy arrays.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .exceptions import DomainError, InfeasibleConfigurationError, SingularPointError
from .exponents import (
    ExponentPair,
    as_exponent,
    beta_critical,
    critical_branch,
    format_exponent,
    is_inf,
)
from .geometry import CuspShape, PolarPoint, normalize_angle, solve_t, to_polar

PI = math.pi


@dataclass(frozen=True)
class CuspMap:
    """Flattening map for an inward cusp of power ``shape.beta``.

    ``gamma`` is the squeezing exponent of the radial part.  Maps built
    by :func:`make_map` satisfy the admissibility rule; maps built by
    :func:`forced_map` carry an arbitrary ``gamma`` and are used to probe
    configurations where no admissible choice exists.
    """

    shape: CuspShape
    gamma: float
    exponents: ExponentPair = None
    forced: bool = False

    @property
    def beta(self):
        return self.shape.beta

    def __post_init__(self):
        if not self.shape.beta > 1:
            raise DomainError("the flattening map needs beta > 1")
        if not self.gamma >= 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class MapJet:
    image: PolarPoint
    d_rt_dr: np.ndarray
    d_th_dr_scaled: np.ndarray
    d_th_dth_scaled: np.ndarray
    jacobian: np.ndarray
    op_norm: np.ndarray
    distortion: np.ndarray


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------


def admissible_gamma_interval(beta, exps):
    """Open interval of squeezing exponents for finite ``p`` and ``q``.

    Lower end ``max((beta (p-1) - (p+1)) / p, 0)`` keeps the wedge side
    in ``L^p``, upper end ``2/q`` keeps the cusp side in ``L^q``.  The
    wedge side also needs ``gamma < beta - 1 + (beta + 1)/p``, which
    only bites for small ``beta`` and large ``q``-room.
    Returned as exact fractions ``(lo, hi)``; empty when ``lo >= hi``.
    """
    beta = as_exponent(beta)
    p, q = exps.p, exps.q
    if is_inf(p) or is_inf(q):
        raise DomainError("admissible interval is defined for finite exponents only")
    lo = max((beta * (p - 1) - (p + 1)) / p, Fraction(0))
    hi = min(2 / q, beta - 1 + (beta + 1) / p)
    return lo, hi


def select_gamma(beta, exps):
    """Squeezing exponent picked by the construction.

    ``beta - 1`` when ``p`` is infinite, ``0`` when ``q`` is infinite,
    otherwise the midpoint of :func:`admissible_gamma_interval`.
    """
    beta = as_exponent(beta)
    if is_inf(exps.p) and is_inf(exps.q):
        raise InfeasibleConfigurationError("p and q cannot both be infinite for beta > 1")
    if is_inf(exps.p):
        return float(beta - 1)
    if is_inf(exps.q):
        return 0.0
    lo, hi = admissible_gamma_interval(beta, exps)
    return float((lo + hi) / 2)


def _exact_and_float(x):
    text = format_exponent(x)
    if isinstance(x, Fraction) and x.denominator != 1:
        text += f" = {float(x):.12g}"
    return text


def make_map(beta, exps):
    """Build the flattening map for ``beta < beta_cr(p, q)``."""
    if not isinstance(exps, ExponentPair):
        exps = ExponentPair(*exps)
    b = as_exponent(beta)
    if is_inf(b) or b <= 1:
        raise DomainError(f"need 1 < beta, got {beta}")
    bcr = beta_critical(exps.p, exps.q)
    if b >= bcr:
        raise InfeasibleConfigurationError(
            f"beta = {format_exponent(b)} is not below the critical power "
            f"beta_cr = {_exact_and_float(bcr)} "
            f"(branch {critical_branch(exps.p, exps.q)} with "
            f"p = {format_exponent(exps.p)}, q = {format_exponent(exps.q)})"
        )
    gamma = select_gamma(b, exps)
    return CuspMap(CuspShape(float(b)), gamma, exps)


def forced_map(beta, gamma, exps=None):
    """Flattening map with a prescribed squeezing exponent (no admissibility check)."""
    return CuspMap(CuspShape(float(beta)), float(gamma), exps, forced=True)


# --------------------------------------------------------------------------
# radial and angular parts
# --------------------------------------------------------------------------


def _check_radius(r, upper_closed=True):
    r = np.asarray(r, dtype=float)
    ok = (r > 0) & ((r <= 1) if upper_closed else (r < 1))
    if not np.all(ok):
        raise DomainError("radius must lie in (0, 1]" if upper_closed else "radius must lie in (0, 1)")
    return r


def _scalar(x, like):
    return float(x) if np.ndim(like) == 0 else x


def radial(m, r):
    ra = _check_radius(r)
    if m.gamma == 0:
        out = ra.copy()
    else:
        out = np.exp(1.0 - ra ** (-m.gamma))
    return _scalar(out, r)


def radial_inverse(m, rho):
    rho_a = np.asarray(rho, dtype=float)
    if not np.all((rho_a > 0) & (rho_a <= 1)):
        raise DomainError("rho must lie in (0, 1]")
    if m.gamma == 0:
        out = rho_a.copy()
    else:
        out = (1.0 - np.log(rho_a)) ** (-1.0 / m.gamma)
    return _scalar(out, rho)


def radial_derivative(m, r):
    ra = _check_radius(r)
    if m.gamma == 0:
        out = np.ones_like(ra)
    else:
        out = m.gamma * ra ** (-m.gamma - 1.0) * np.exp(1.0 - ra ** (-m.gamma))
    return _scalar(out, r)


def _wedge(r, beta):
    t = np.asarray(solve_t(r, beta))
    tb = t ** (beta - 1.0)
    a = np.arctan(tb)
    dtdr = r / (t + beta * t ** (2.0 * beta - 1.0))
    dadr = (beta - 1.0) * t ** (beta - 2.0) / (1.0 + tb * tb) * dtdr
    return a, dadr


def _branches(theta, a):
    """Interior mask and branch-relative angle (signed on the wedge side)."""
    theta = normalize_angle(theta)
    interior = (theta >= a) & (theta <= 2.0 * PI - a)
    theta_rel = np.where(interior | (theta < a), theta, theta - 2.0 * PI)
    return interior, theta_rel


def _angular_from_parts(theta_rel, interior, a):
    safe_a = np.where(interior, 1.0, a)
    inner = PI / 4 + 3.0 * PI * (theta_rel - a) / (4.0 * (PI - a))
    outer = PI * theta_rel / (4.0 * safe_a)
    return normalize_angle(np.where(interior, inner, outer))


def angular_interior(m, r, theta):
    """Angle map of the cusp-side arc, evaluated for any ``theta``."""
    ra = _check_radius(r, upper_closed=False)
    a, _ = _wedge(ra, m.beta)
    return PI / 4 + 3.0 * PI * (np.asarray(theta) - a) / (4.0 * (PI - a))


def angular_complement(m, r, theta):
    """Angle map of the wedge-side arc for signed ``theta`` about the cusp axis."""
    ra = _check_radius(r, upper_closed=False)
    a, _ = _wedge(ra, m.beta)
    return PI * np.asarray(theta) / (4.0 * a)


def angular(m, r, theta):
    ra = _check_radius(r, upper_closed=False)
    a, _ = _wedge(ra, m.beta)
    interior, theta_rel = _branches(theta, a)
    out = _angular_from_parts(theta_rel, interior, a)
    return _scalar(out, np.broadcast(r, theta))


def angular_inverse(m, r, theta_tilde):
    ra = _check_radius(r, upper_closed=False)
    a, _ = _wedge(ra, m.beta)
    phi = normalize_angle(theta_tilde)
    interior = (phi >= PI / 4) & (phi <= 7 * PI / 4)
    inner = a + (phi - PI / 4) * 4.0 * (PI - a) / (3.0 * PI)
    signed = np.where(phi < PI / 4, phi, phi - 2.0 * PI)
    outer = 4.0 * a * signed / PI
    out = normalize_angle(np.where(interior, inner, outer))
    return _scalar(out, np.broadcast(r, theta_tilde))


# --------------------------------------------------------------------------
# plane maps
# --------------------------------------------------------------------------


def forward(m, z):
    """Image of complex points; identity for ``|z| >= 1``, origin fixed."""
    z = np.asarray(z, dtype=complex)
    out = z.copy()
    r, theta = to_polar(z)
    inside = (r > 0) & (r < 1)
    if np.any(inside):
        ri, ti = r[inside], theta[inside]
        rho = radial(m, ri)
        out[inside] = rho * np.exp(1j * angular(m, ri, ti))
    return complex(out) if out.ndim == 0 else out


def inverse(m, w):
    w = np.asarray(w, dtype=complex)
    out = w.copy()
    rho, phi = to_polar(w)
    inside = (rho > 0) & (rho < 1)
    if np.any(inside):
        r = radial_inverse(m, rho[inside])
        # rho < 1 can still round to r == 1 for tiny gamma
        r = np.minimum(r, np.nextafter(1.0, 0.0))
        out[inside] = r * np.exp(1j * angular_inverse(m, r, phi[inside]))
    return complex(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# differential
# --------------------------------------------------------------------------


def _normalized_entries(m, r, theta):
    """Polar differential entries divided by the image radius."""
    ra = np.asarray(r, dtype=float)
    if np.any(ra == 0):
        raise SingularPointError("the differential is not defined at the origin")
    ra = _check_radius(ra, upper_closed=False)
    a, dadr = _wedge(ra, m.beta)
    interior, theta_rel = _branches(theta, a)
    m11, m21, m22 = kernels.polar_entries_np(ra, theta_rel, interior, a, dadr, m.gamma)
    return np.array(m11), m21, m22, interior, theta_rel, a


def _op_norm(a11, a21, a22):
    # (s1 + s2)^2 = fro^2 + 2|det| and (s1 - s2)^2 = fro^2 - 2|det| as sums of squares
    p, q = np.abs(a11), np.abs(a22)
    return 0.5 * (np.hypot(p + q, a21) + np.hypot(p - q, a21))


def jet(m, r, theta):
    """Value and polar differential at ``(r, theta)`` with ``0 < r < 1``.

    On a seam ``theta = a(r)`` the cusp-side (interior) branch is used.
    """
    m11, m21, m22, interior, theta_rel, a = _normalized_entries(m, r, theta)
    ra = np.asarray(r, dtype=float)
    rt = radial(m, ra)
    tht = _angular_from_parts(theta_rel, interior, a)
    d_rt = rt * m11
    d_th_r = rt * m21
    d_th_th = rt * m22
    jac = d_rt * d_th_th
    norm = _op_norm(d_rt, d_th_r, d_th_th)
    k = kernels.distortion_from_entries_np(m11, m21, m22)
    like = np.broadcast(r, theta)
    return MapJet(
        image=PolarPoint(_scalar(rt, like), _scalar(tht, like)),
        d_rt_dr=_scalar(d_rt, like),
        d_th_dr_scaled=_scalar(d_th_r, like),
        d_th_dth_scaled=_scalar(d_th_th, like),
        jacobian=_scalar(jac, like),
        op_norm=_scalar(norm, like),
        distortion=_scalar(k, like),
    )


def distortion(m, r, theta):
    """Distortion ``|Df|**2 / J_f`` at polar points inside the unit disk."""
    m11, m21, m22, *_ = _normalized_entries(m, r, theta)
    k = kernels.distortion_from_entries_np(m11, m21, m22)
    return _scalar(k, np.broadcast(r, theta))


def distortion_at(m, z):
    """Distortion at complex points; equal to 1 on ``|z| >= 1``."""
    z = np.asarray(z, dtype=complex)
    r, theta = to_polar(z)
    out = np.ones(z.shape)
    inside = r < 1
    if np.any(inside):
        out[inside] = distortion(m, r[inside], theta[inside])
    return float(out) if out.ndim == 0 else out


def _rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    rot = np.empty(np.shape(angle) + (2, 2))
    rot[..., 0, 0] = c
    rot[..., 0, 1] = -s
    rot[..., 1, 0] = s
    rot[..., 1, 1] = c
    return rot


def cartesian_differential(m, z, normalized=False):
    """Cartesian differential matrices, shape ``z.shape + (2, 2)``.

    With ``normalized=True`` the matrices inside the disk are divided by
    the image radius, which keeps them representable near the tip;
    distortion and Beltrami coefficient are unaffected by the scaling.
    """
    z = np.asarray(z, dtype=complex)
    out = np.broadcast_to(np.eye(2), z.shape + (2, 2)).copy()
    r, theta = to_polar(z)
    inside = r < 1
    if np.any(inside):
        ri, ti = r[inside], theta[inside]
        m11, m21, m22, interior, theta_rel, a = _normalized_entries(m, ri, ti)
        polar = np.zeros(ri.shape + (2, 2))
        polar[..., 0, 0] = m11
        polar[..., 1, 0] = m21
        polar[..., 1, 1] = m22
        if not normalized:
            polar *= radial(m, ri)[..., None, None]
        tht = _angular_from_parts(theta_rel, interior, a)
        rot_out = _rotation(tht)
        rot_in_t = np.swapaxes(_rotation(ti), -1, -2)
        out[inside] = rot_out @ polar @ rot_in_t
    return out


def beltrami(m, r, theta):
    """Complex dilatation ``f_zbar / f_z`` at polar points inside the disk."""
    z = np.asarray(r) * np.exp(1j * np.asarray(theta, dtype=float))
    if np.any(np.asarray(r) == 0):
        raise SingularPointError("the differential is not defined at the origin")
    _check_radius(r, upper_closed=False)
    d = cartesian_differential(m, z, normalized=True)
    f_z = 0.5 * (d[..., 0, 0] + d[..., 1, 1] + 1j * (d[..., 1, 0] - d[..., 0, 1]))
    f_zbar = 0.5 * (d[..., 0, 0] - d[..., 1, 1] + 1j * (d[..., 1, 0] + d[..., 0, 1]))
    mu = f_zbar / f_z
    return complex(mu) if mu.ndim == 0 else mu


def trace_mismatch(m, samples=4096):
    """Largest angular gap between ``f`` just inside the unit circle and the identity outside.

    The flattening is built on the open disk and continued by the
    identity; on the unit circle the angular part does not reduce to the
    identity, and this measures the jump.
    """
    theta = (np.arange(samples) + 0.5) * 2.0 * PI / samples
    r = np.nextafter(1.0, 0.0)
    tht = angular(m, np.full(samples, r), theta)
    gap = np.abs(np.angle(np.exp(1j * (tht - theta))))
    return float(gap.max())
