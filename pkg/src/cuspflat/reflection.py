"""Reflections in cusp boundaries conjugated from the circle inversion.

The flattening map ``f`` takes the cusp domain inside the unit disk
onto the sector ``S = {|w| < 1, pi/4 < arg w < 7 pi/4}``.  ``S`` is
star-shaped about ``c = -1/2`` and the radial normalisation
``Phi(w) = (w - c) / R(arg(w - c))``, with ``R`` the distance from
``c`` to the boundary of ``S`` in that direction, takes ``S`` onto the
unit disk.  With ``F = Phi o f`` the reflection is

    g = F^-1 o Psi o F,      Psi(z) = z / |z|**2,

an involution that fixes the boundary of ``f^-1(S)`` and swaps its inside
and outside.  ``Phi^-1 o Psi o Phi`` is the reflection ``R_S`` in the
boundary of ``S``, ``R_S(w) = c + (w - c) R**2 / |w - c|**2``; it is
evaluated with the difference ``R - |w - c|`` in cancellation-free form
so that boundary points are fixed to rounding.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, SingularPointError
from .geometry import contains, cusp_boundary, solve_t
from .mapping import CuspMap, cartesian_differential, forward, inverse

CENTER = -0.5
_S2 = math.sqrt(0.5)
# direction from CENTER to the sector corner exp(i pi/4)
OMEGA_CORNER = math.atan2(_S2, _S2 - CENTER)


@dataclass(frozen=True)
class ReflectionMap:
    """Reflection built from a flattening map; ``base=None`` gives ``Psi`` itself."""

    base: CuspMap = None

    @classmethod
    def identity(cls):
        return cls(None)

    @classmethod
    def from_cusp_map(cls, m):
        return cls(m)

    @property
    def singular_point(self):
        """The point ``h(0)`` sent to infinity."""
        if self.base is None:
            return 0j
        return complex(inverse(self.base, CENTER))


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool
    image_integral: float
    domain_integral: float


@dataclass(frozen=True)
class LengthCheck:
    t: float
    length: float
    polyline_length: float
    lower_bound: float
    holds: bool


@dataclass(frozen=True)
class IsoperimetricCheck:
    t: float
    area: float
    perimeter: float
    bound: float
    holds: bool


# --------------------------------------------------------------------------
# circle inversion
# --------------------------------------------------------------------------


def circle_inversion(z):
    """``Psi(z) = z / |z|**2``; the origin goes to infinity."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise SingularPointError("the circle inversion sends the origin to infinity")
    out = 1.0 / np.conj(z)
    return complex(out) if out.ndim == 0 else out


def inversion_differential(z):
    """``DPsi = (|z|**2 I - 2 z z^T) / |z|**4`` as ``(..., 2, 2)`` arrays."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    n2 = x * x + y * y
    d = np.empty(z.shape + (2, 2))
    d[..., 0, 0] = (y * y - x * x) / (n2 * n2)
    d[..., 0, 1] = -2.0 * x * y / (n2 * n2)
    d[..., 1, 0] = d[..., 0, 1]
    d[..., 1, 1] = (x * x - y * y) / (n2 * n2)
    return d


# --------------------------------------------------------------------------
# sector normalisation
# --------------------------------------------------------------------------


def _pieces(omega):
    upper = (omega >= 0.0) & (omega <= OMEGA_CORNER)
    lower = (omega < 0.0) & (omega >= -OMEGA_CORNER)
    return upper, lower


def sector_radius(omega):
    """Distance ``R(omega)`` from ``c`` to the sector boundary and ``R'(omega)``."""
    omega = np.asarray(omega, dtype=float)
    co, si = np.cos(omega), np.sin(omega)
    upper, lower = _pieces(omega)
    sq = np.sqrt(0.25 * co * co + 0.75)
    du = np.where(upper, co - si, 1.0)
    dl = np.where(lower, co + si, 1.0)
    r = np.where(upper, 0.5 / du, np.where(lower, 0.5 / dl, 0.5 * co + sq))
    dr = np.where(
        upper,
        0.5 * (si + co) / du**2,
        np.where(lower, 0.5 * (si - co) / dl**2, -0.5 * si - 0.25 * co * si / sq),
    )
    return r, dr


def _gap(w):
    """``R - |w - c|`` without cancellation, plus ``R`` and ``v = w - c``."""
    v = w - CENTER
    omega = np.angle(v)
    co, si = np.cos(omega), np.sin(omega)
    upper, lower = _pieces(omega)
    av = np.abs(v)
    sq = np.sqrt(0.25 * co * co + 0.75)
    du = np.where(upper, co - si, 1.0)
    dl = np.where(lower, co + si, 1.0)
    arc = (1.0 - (w.real**2 + w.imag**2)) / (av - 0.5 * co + sq)
    gap = np.where(upper, (w.imag - w.real) / du, np.where(lower, -(w.real + w.imag) / dl, arc))
    return gap, gap + av, v, av


def flatten(w):
    """``Phi``: sector (and the plane) onto the unit disk (and the plane)."""
    w = np.asarray(w, dtype=complex)
    v = w - CENTER
    r, _ = sector_radius(np.angle(v))
    return v / r


def unflatten(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    r, _ = sector_radius(np.angle(zeta))
    return CENTER + zeta * r


def flatten_differential(w):
    w = np.asarray(w, dtype=complex)
    v = w - CENTER
    r, dr = sector_radius(np.angle(v))
    n2 = np.abs(v) ** 2
    grad = np.stack([-v.imag / n2, v.real / n2], axis=-1)
    vec = np.stack([v.real, v.imag], axis=-1)
    k = (dr / r)[..., None, None]
    eye = np.broadcast_to(np.eye(2), w.shape + (2, 2))
    return (eye - k * vec[..., :, None] * grad[..., None, :]) / r[..., None, None]


def sector_reflection(w):
    """Reflection ``R_S`` in the boundary of the sector, fixing it exactly."""
    w = np.asarray(w, dtype=complex)
    if np.any(w == CENTER):
        raise SingularPointError("the sector centre is sent to infinity")
    gap, r, v, av = _gap(w)
    out = w + v * (gap * (r + av) / (av * av))
    return complex(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# the reflection
# --------------------------------------------------------------------------


def conjugator(rm, z):
    """``F(z)``: ``Phi o f`` for a cusp base, the identity otherwise."""
    z = np.asarray(z, dtype=complex)
    if rm.base is None:
        return z
    return flatten(forward(rm.base, z))


def reflect(rm, z):
    """``g(z) = F^-1(Psi(F(z)))``."""
    z = np.asarray(z, dtype=complex)
    if rm.base is None:
        return circle_inversion(z)
    w = np.asarray(forward(rm.base, z), dtype=complex)
    if np.any(w == CENTER):
        raise SingularPointError("point is h(0), which the reflection sends to infinity")
    return inverse(rm.base, sector_reflection(w))


def conjugator_differential(rm, z):
    z = np.asarray(z, dtype=complex)
    if rm.base is None:
        return np.broadcast_to(np.eye(2), z.shape + (2, 2)).copy()
    w = np.asarray(forward(rm.base, z), dtype=complex)
    return flatten_differential(w) @ cartesian_differential(rm.base, z)


def reflection_jet(rm, z):
    """Return ``(g(z), Dg(z), DF(z), DF(g(z)))`` by the chain rule.

    On the measure-zero seams of ``f`` and of ``Phi`` one-sided
    derivatives are used.
    """
    z = np.asarray(z, dtype=complex)
    y = np.asarray(reflect(rm, z), dtype=complex)
    zeta = conjugator(rm, z)
    dfx = conjugator_differential(rm, z)
    dfy = conjugator_differential(rm, y)
    dg = np.linalg.solve(dfy, inversion_differential(zeta) @ dfx)
    return y, dg, dfx, dfy


def _norm_and_det(a):
    """Operator norm and determinant of ``(..., 2, 2)`` matrices.

    ``|A| = (|f_z| + |f_zbar|)`` in complex notation, both parts computed
    as plain sums of squares so conformal and anticonformal matrices keep
    full precision.
    """
    a11, a12, a21, a22 = a[..., 0, 0], a[..., 0, 1], a[..., 1, 0], a[..., 1, 1]
    det = a11 * a22 - a12 * a21
    fz = np.hypot(a11 + a22, a21 - a12)
    fzbar = np.hypot(a11 - a22, a21 + a12)
    return 0.5 * (fz + fzbar), det


def matrix_distortion(a):
    norm, det = _norm_and_det(a)
    return norm * norm / np.abs(det)


def in_domain(rm, z):
    """Membership in the domain whose boundary ``g`` fixes."""
    z = np.asarray(z, dtype=complex)
    inside = np.abs(z) < 1.0
    if rm.base is not None:
        inside &= contains(rm.base.shape, z)
    return inside


# --------------------------------------------------------------------------
# weighted gradient inequality
# --------------------------------------------------------------------------


def _box_nodes(box, cells, order=5):
    x0, x1, y0, y1 = box
    xg, wg = np.polynomial.legendre.leggauss(order)
    xg = 0.5 * (xg + 1.0)
    wg = 0.5 * wg
    hx = (x1 - x0) / cells
    hy = (y1 - y0) / cells
    xs = (x0 + hx * (np.arange(cells)[:, None] + xg[None, :])).ravel()
    ys = (y0 + hy * (np.arange(cells)[:, None] + xg[None, :])).ravel()
    wx = np.tile(wg * hx, cells)
    wy = np.tile(wg * hy, cells)
    z = xs[:, None] + 1j * ys[None, :]
    return z, wx[:, None] * wy[None, :]


def _box_contains_closure(box, point):
    x0, x1, y0, y1 = box
    return x0 <= point.real <= x1 and y0 <= point.imag <= y1


def verify_reflection_inequality(rm, box, p, tol=1e-6, cells=8):
    """Check ``int_U |Dg|^p / |J_g|^((p-1)/2) <= (int_g(U) K^p)^(1/2) (int_U K^p)^(1/2)``.

    ``box = (x0, x1, y0, y1)`` and ``K`` is the distortion of the
    conjugating map ``F``.  The image integral is computed on ``U`` as
    ``int_U K(g(x))^p |J_g(x)| dx``.  Tensor Gauss-Legendre rule,
    ``cells**2`` cells of 5x5 nodes.
    """
    x0, x1, y0, y1 = box
    if not (x0 < x1 and y0 < y1):
        raise DomainError("box must have x0 < x1 and y0 < y1")
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")
    if _box_contains_closure(box, rm.singular_point):
        raise DomainError("the closed box contains h(0), where g is singular")
    z, w = _box_nodes(box, cells)
    _, dg, dfx, dfy = reflection_jet(rm, z)
    norm, det = _norm_and_det(dg)
    jg = np.abs(det)
    lhs = math.fsum((w * norm**p / jg ** ((p - 1.0) / 2.0)).ravel())
    kx = matrix_distortion(dfx)
    ky = matrix_distortion(dfy)
    image = math.fsum((w * ky**p * jg).ravel())
    domain = math.fsum((w * kx**p).ravel())
    rhs = math.sqrt(image * domain)
    return InequalityCheck(lhs, rhs, bool(lhs <= rhs * (1.0 + tol)), image, domain)


def admissible_points(rm, n, rng, r_lo=0.1, r_hi=0.9, clearance=1e-3):
    """Points of the annulus ``r_lo < |z| < r_hi`` where ``g`` is safely evaluated.

    Rejected are points within ``clearance`` of ``h(0)`` and points whose
    image falls in the collar ``0.99 <= |g(z)| <= 1.01``, where the
    identity continuation of ``f`` meets the disk construction.
    """
    out = []
    total = 0
    sing = rm.singular_point
    while total < n:
        m = 2 * (n - total) + 16
        r = np.sqrt(rng.uniform(r_lo**2, r_hi**2, m))
        th = rng.uniform(0.0, 2.0 * math.pi, m)
        z = r * np.exp(1j * th)
        z = z[np.abs(z - sing) > clearance]
        gz = np.abs(np.asarray(reflect(rm, z)))
        z = z[(gz < 0.99) | (gz > 1.01)]
        out.append(z[: n - total])
        total += out[-1].size
    return np.concatenate(out)


def random_admissible_boxes(rm, n, rng, r_lo=0.1, r_hi=0.9, aspect=None):
    """Random axis-aligned boxes inside the annulus ``r_lo < |z| < r_hi``.

    A box is kept when it stays 0.01 away from ``h(0)`` and a 9x9 sample
    of its image under ``g`` avoids the collar ``0.99 <= |z| <= 1.01``.
    ``aspect`` fixes the ratio width/height when given.
    """
    boxes = []
    sing = rm.singular_point
    while len(boxes) < n:
        cx, cy = rng.uniform(-r_hi, r_hi, 2)
        if aspect is None:
            wdt, hgt = rng.uniform(0.02, 0.2, 2)
        else:
            hgt = rng.uniform(0.002, 0.02)
            wdt = hgt * aspect
        box = (cx - wdt / 2, cx + wdt / 2, cy - hgt / 2, cy + hgt / 2)
        corners = np.array([box[0] + 1j * box[2], box[1] + 1j * box[2],
                            box[0] + 1j * box[3], box[1] + 1j * box[3]])
        if np.abs(corners).max() >= r_hi:
            continue
        # the nearest point of the box to the origin
        near = complex(np.clip(0.0, box[0], box[1]), np.clip(0.0, box[2], box[3]))
        if abs(near) <= r_lo:
            continue
        grown = (box[0] - 0.01, box[1] + 0.01, box[2] - 0.01, box[3] + 0.01)
        if _box_contains_closure(grown, sing):
            continue
        xs = np.linspace(box[0], box[1], 9)
        ys = np.linspace(box[2], box[3], 9)
        gz = np.abs(np.asarray(reflect(rm, xs[:, None] + 1j * ys[None, :])))
        if np.any((gz >= 0.99) & (gz <= 1.01)):
            continue
        boxes.append(box)
    return boxes


# --------------------------------------------------------------------------
# length and area near the tip
# --------------------------------------------------------------------------


def max_segment_abscissa(beta):
    """Largest ``t`` for which the segment ``I_t`` stays in the unit disk."""
    return solve_t(1.0, beta)


def _segment_tangent_norm(rm, t, y):
    z = t + 1j * y
    _, dg, _, _ = reflection_jet(rm, z)
    return np.hypot(dg[..., 0, 1], dg[..., 1, 1])


def _composite_gl(func, a, b, panels, order=10):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    nodes = edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)
    weights = 0.5 * h[:, None] * w[None, :]
    return math.fsum((func(nodes) * weights).ravel())


def segment_image(rm, t, n=2001):
    """Polyline ``g(I_t)`` from ``t + i t**beta`` to ``t - i t**beta``."""
    beta = rm.base.beta
    h = t**beta
    y = h * np.cos(np.linspace(0.0, math.pi, n))
    pts = np.asarray(reflect(rm, t + 1j * y[1:-1]))
    return np.concatenate([[t + 1j * h], pts, [t - 1j * h]])


def curve_length_check(rm, t, tol=1e-3, panels=64):
    """Length of ``g(I_t)`` for the segment ``I_t = {t + iy : |y| < t**beta}``.

    ``g`` fixes the endpoints ``t +- i t**beta`` and maps the segment
    around the cusp tip, so the length is at least ``2t``.  Computed by
    Gauss-Legendre quadrature of ``|Dg e_y|`` on each half, with a
    polyline length as a cross-check.
    """
    if rm.base is None:
        raise DomainError("curve_length_check needs a cusp-based reflection")
    beta = rm.base.beta
    if not 0 < t < max_segment_abscissa(beta):
        raise DomainError("t must keep the segment inside the unit disk")
    h = t**beta
    # cosine substitution clusters nodes at the endpoints
    def upper(u):
        return _segment_tangent_norm(rm, t, h * np.cos(u)) * h * np.sin(u)

    length = _composite_gl(upper, 0.0, 0.5 * math.pi, panels) + _composite_gl(
        upper, 0.5 * math.pi, math.pi, panels
    )
    poly = segment_image(rm, t)
    poly_len = float(np.abs(np.diff(poly)).sum())
    return LengthCheck(t, length, poly_len, 2.0 * t, bool(length >= 2.0 * t * (1.0 - tol)))


def _shoelace(z):
    return 0.5 * abs(float(np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag)))


def isoperimetric_check(rm, t, tol=1e-3, n=4001):
    """``|g(U_t)| <= perimeter**2 / (4 pi)`` for the horn ``U_t = {0 < x < t, |y| < x**beta}``.

    The boundary of ``g(U_t)`` is the two cusp arcs up to ``x = t``
    (fixed by ``g``) closed by ``g(I_t)``.
    """
    if rm.base is None:
        raise DomainError("isoperimetric_check needs a cusp-based reflection")
    shape = rm.base.shape
    x = t * np.linspace(0.0, 1.0, n) ** 2
    up, lo = cusp_boundary(shape, x[1:])
    path = np.concatenate([[0j], up, segment_image(rm, t, n)[1:-1], lo[::-1]])
    area = _shoelace(path)
    perimeter = float(np.abs(np.diff(np.concatenate([path, path[:1]]))).sum())
    bound = perimeter**2 / (4.0 * math.pi)
    return IsoperimetricCheck(t, area, perimeter, bound, bool(area <= bound * (1.0 + tol)))
