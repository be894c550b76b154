"""Constant-speed boundary maps and the Douglas and log double integrals.

A closed counterclockwise polyline is a rectifiable Jordan curve.  The
boundary map ``phi`` sends ``exp(i alpha)`` to the point at arclength
``l alpha / (2 pi)`` from a base vertex, so it has constant speed
``l / (2 pi)``.  Both double integrals are taken over the circle
parameter with a midpoint tensor rule.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .geometry import CuspShape

TWO_PI = 2.0 * math.pi


def _segments_cross(p1, p2, q1, q2):
    """Proper or touching intersection of segment pairs (vectorised)."""

    def orient(a, b, c):
        return np.sign((b.real - a.real) * (c.imag - a.imag) - (b.imag - a.imag) * (c.real - a.real))

    def on_seg(a, b, c):
        return (np.minimum(a.real, b.real) <= c.real) & (c.real <= np.maximum(a.real, b.real)) & (
            np.minimum(a.imag, b.imag) <= c.imag) & (c.imag <= np.maximum(a.imag, b.imag))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    hit |= (o1 == 0) & on_seg(p1, p2, q1)
    hit |= (o2 == 0) & on_seg(p1, p2, q2)
    hit |= (o3 == 0) & on_seg(q1, q2, p1)
    hit |= (o4 == 0) & on_seg(q1, q2, p2)
    return hit


def signed_area(vertices):
    z = np.asarray(vertices, dtype=complex)
    zn = np.roll(z, -1)
    return 0.5 * float(np.sum(z.real * zn.imag - zn.real * z.imag))


def is_simple(vertices, block=512):
    """Pairwise check that no two non-adjacent edges meet."""
    z = np.asarray(vertices, dtype=complex)
    n = z.size
    a, b = z, np.roll(z, -1)
    for start in range(0, n, block):
        i = np.arange(start, min(start + block, n))[:, None]
        j = np.arange(n)[None, :]
        hit = _segments_cross(a[i], b[i], a[j], b[j])
        gap = (j - i) % n
        hit &= (gap > 1) & (gap < n - 1)
        if hit.any():
            return False
    return True


class RectifiableCurve:
    """Closed counterclockwise polyline; the last vertex joins the first."""

    def __init__(self, vertices, check=True):
        z = np.asarray(vertices, dtype=complex).ravel()
        if z.size >= 2 and z[0] == z[-1]:
            z = z[:-1]
        if z.size < 3:
            raise DomainError("a closed curve needs at least three vertices")
        if not np.all(np.isfinite(z)):
            raise DomainError("vertices must be finite")
        seg = np.abs(np.roll(z, -1) - z)
        if np.any(seg == 0):
            raise DomainError("repeated consecutive vertices")
        if check:
            if signed_area(z) <= 0:
                raise DomainError("vertices must be in counterclockwise order")
            if not is_simple(z):
                raise DomainError("polyline is not simple")
        self.vertices = z
        self.cumulative_lengths = np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def length(self):
        return float(self.cumulative_lengths[-1])

    def __len__(self):
        return self.vertices.size

    def scaled(self, factor):
        return RectifiableCurve(self.vertices * factor, check=False)

    def moved(self, rotation=0.0, shift=0j):
        return RectifiableCurve(self.vertices * np.exp(1j * rotation) + shift, check=False)


def arclength_point(curve, s):
    """Point at arclength ``s`` counterclockwise from vertex 0."""
    sa = np.asarray(s, dtype=float)
    if np.any(sa < 0) or np.any(sa >= curve.length):
        raise DomainError(f"arclength must lie in [0, {curve.length})")
    return _point_at(curve, sa)


def _point_at(curve, s):
    cum = curve.cumulative_lengths
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(curve) - 1)
    a = curve.vertices[k]
    b = curve.vertices[(k + 1) % len(curve)]
    frac = (s - cum[k]) / (cum[k + 1] - cum[k])
    out = a + frac * (b - a)
    return complex(out) if np.ndim(out) == 0 else out


def arclength_of(curve, z):
    """Arclength parameter of points on (or nearest to) the curve."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a = curve.vertices
    d = np.roll(a, -1) - a
    rel = z[:, None] - a[None, :]
    frac = np.clip((rel.real * d.real + rel.imag * d.imag) / np.abs(d) ** 2, 0.0, 1.0)
    dist = np.abs(rel - frac * d)
    k = np.argmin(dist, axis=1)
    s = curve.cumulative_lengths[k] + frac[np.arange(z.size), k] * np.abs(d[k])
    return np.mod(s, curve.length)


@dataclass(frozen=True)
class BoundaryHomeo:
    """Constant-speed map from the unit circle onto ``curve``; ``1`` goes to vertex ``base``."""

    curve: RectifiableCurve
    base: int = 0

    @property
    def speed(self):
        return self.curve.length / TWO_PI

    def evaluate(self, z):
        alpha = np.mod(np.angle(np.asarray(z, dtype=complex)), TWO_PI)
        return self.at_angle(alpha)

    def at_angle(self, alpha):
        s0 = self.curve.cumulative_lengths[self.base % len(self.curve)]
        s = np.mod(s0 + self.speed * np.asarray(alpha, dtype=float), self.curve.length)
        return _point_at(self.curve, s)

    def inverse(self, w):
        s0 = self.curve.cumulative_lengths[self.base % len(self.curve)]
        s = arclength_of(self.curve, w)
        alpha = np.mod(s - s0, self.curve.length) / self.speed
        out = np.exp(1j * alpha)
        return complex(out[0]) if np.ndim(w) == 0 else out

    def __call__(self, z):
        return self.evaluate(z)


def boundary_homeo(curve, base=0):
    if not 0 <= base < len(curve):
        raise DomainError("base must be a vertex index")
    return BoundaryHomeo(curve, base)


# --------------------------------------------------------------------------
# double integrals
# --------------------------------------------------------------------------


def _g(x):
    """Second antiderivative of ``log|x|``."""
    x = np.asarray(x, dtype=float)
    ax = np.where(x == 0, 1.0, np.abs(x))
    return np.where(x == 0, 0.0, 0.5 * x * x * np.log(ax) - 0.75 * x * x)


def _log_band_cell(d, h):
    """Exact integral of ``log|u - v|`` over two cells of width ``h`` at offset ``d``."""
    return _g(d + h) - 2.0 * _g(d) + _g(d - h)


def log_condition(curve, h=None, n=256, block=256):
    """``int int |log |phi^-1(xi) - phi^-1(eta)|| |dxi| |deta|`` over the curve.

    With ``xi = phi(exp(iu))`` the measure is ``(l / 2 pi)**2 du dv``.
    Away from the diagonal the midpoint rule is used.  Cells closer than
    ``pi/6`` to the diagonal, where ``|exp(iu) - exp(iv)| < 1``, take the
    logarithmic part ``log|u - v|`` exactly and the smooth remainder
    ``log(2 sin(x/2) / x)`` by the midpoint rule.
    """
    if n < 64:
        raise DomainError("n must be at least 64")
    if h is None:
        h = boundary_homeo(curve)
    step = TWO_PI / n
    u = (np.arange(n) + 0.5) * step
    z = np.asarray(h.inverse(h.at_angle(u)), dtype=complex)
    band = int(n // 12)
    total = []
    for start in range(0, n, block):
        i = np.arange(start, min(start + block, n))
        k = (np.arange(n)[None, :] - i[:, None]) % n
        k = np.where(k > n // 2, k - n, k)
        vals = np.abs(np.log(np.abs(z[i][:, None] - z[None, :]).clip(1e-300))) * step * step
        near = np.abs(k) <= band
        d = k[near] * step
        safe = np.where(d == 0, 1.0, d)
        smooth = np.where(d == 0, 0.0, np.log(np.abs(2.0 * np.sin(safe / 2.0) / safe)))
        vals[near] = -(_log_band_cell(d, step) + step * step * smooth)
        total.append(math.fsum(vals.ravel()))
    return h.speed**2 * math.fsum(total)


def log_condition_reference(length):
    """Closed form for a constant-speed map: ``l**2 / (2 pi) int_0^2pi |log(2 sin(v/2))| dv``."""
    from scipy.integrate import quad

    def f(v):
        return abs(math.log(2.0 * math.sin(v / 2.0)))

    pts = [0.0, math.pi / 3, 5 * math.pi / 3, TWO_PI]
    val = sum(quad(f, a, b, limit=200)[0] for a, b in zip(pts[:-1], pts[1:]))
    return length**2 / TWO_PI * val


def douglas_integral(phi, n=256, block=256, eps=1e-7):
    """``int int |(phi(xi) - phi(eta)) / (xi - eta)|**2 |dxi| |deta|`` over the unit circle.

    ``phi`` maps points of the unit circle to the plane.  Midpoint rule on
    an ``n x n`` grid; diagonal cells use the limit ``|phi'|**2``, with the
    tangential derivative taken by central differences of width ``eps``.
    """
    if n < 64:
        raise DomainError("n must be at least 64")
    step = TWO_PI / n
    u = (np.arange(n) + 0.5) * step
    xi = np.exp(1j * u)
    w = np.asarray(phi(xi), dtype=complex)
    if isinstance(phi, BoundaryHomeo):
        speed2 = np.full(n, phi.speed**2)
    else:
        dw = np.asarray(phi(np.exp(1j * (u + eps)))) - np.asarray(phi(np.exp(1j * (u - eps))))
        speed2 = np.abs(dw / (2.0 * eps)) ** 2
    total = []
    for start in range(0, n, block):
        i = np.arange(start, min(start + block, n))
        num = w[i][:, None] - w[None, :]
        den = xi[i][:, None] - xi[None, :]
        diag = i[:, None] == np.arange(n)[None, :]
        safe = np.where(diag, 1.0, den)
        vals = np.where(diag, speed2[i][:, None], np.abs(num / safe) ** 2)
        total.append(math.fsum(vals.ravel()))
    return step * step * math.fsum(total)


# --------------------------------------------------------------------------
# test polygons and I/O
# --------------------------------------------------------------------------


def circle_polygon(n=256, radius=1.0, center=0j):
    t = TWO_PI * np.arange(n) / n
    return RectifiableCurve(center + radius * np.exp(1j * t), check=False)


def square_polygon(side=1.0):
    return RectifiableCurve(np.array([0, side, side + 1j * side, 1j * side]), check=False)


def cusp_polygon(beta, n=64, tip_power=1.0):
    """Polygon with ``n`` vertices approximating the inward-cusp domain.

    Vertex 0 is the tip.  Each cusp arc carries ``n // 4`` vertices at
    ``x = s**tip_power``; ``tip_power > 1`` crowds them towards the tip.
    """
    shape = CuspShape(beta)
    m = n // 4
    x = np.linspace(0.0, 1.0, m + 1) ** tip_power
    upper = x + 1j * x**beta
    n_arc = n - 2 * m
    c, rad = shape.center, shape.radius
    start = math.atan2(1.0, beta)
    ang = np.linspace(start, TWO_PI - start, n_arc + 1)[1:-1]
    arc = c + rad * np.exp(1j * ang)
    lower = (x + -1j * x**beta)[::-1]
    verts = np.concatenate([upper, arc, lower[:-1]])
    return RectifiableCurve(verts)


def read_curve_csv(path):
    """Read ``x,y`` rows; a header row is skipped."""
    pts = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                pts.append(complex(float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if pts:
                    raise DomainError(f"bad curve row {row!r}")
    return RectifiableCurve(np.array(pts))


def write_curve_csv(curve, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["x", "y"])
        for z in curve.vertices:
            out.writerow([repr(float(z.real)), repr(float(z.imag))])
