"""Three-point (Ahlfors) constants of curves and cusp boundaries.

For boundary points ``a, b`` let ``Gamma`` be the component of the curve
minus ``{a, b}`` with the smaller diameter.  The estimate is the largest
sampled ratio ``diam(Gamma) / |a - b|**alpha``.  Quasicircles keep it
bounded at ``alpha = 1``; a power cusp of exponent ``beta`` keeps it
bounded only for ``alpha <= 1/beta``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .boundary import RectifiableCurve, cusp_polygon
from .exceptions import DomainError
from .geometry import CuspShape


@dataclass(frozen=True)
class AhlforsEstimate:
    """``fitted_exponent`` is the slope of log diam(Gamma) against log|a - b|
    over the symmetric tip pairs; ``ratio_exponent`` the slope of the log
    ratio against log t.  Both are None for plain polylines."""

    gamma: float
    alpha: float
    worst_pair: tuple
    fitted_exponent: float = None
    ratio_exponent: float = None


def cusp_alpha(beta):
    if not beta >= 1:
        raise DomainError(f"cusp power must be >= 1, got {beta}")
    return 1.0 / beta


def _brute_diameter(pts):
    d = np.abs(pts[:, None] - pts[None, :])
    return float(d.max())


def rotating_calipers(hull):
    """Diameter of a convex polygon given counterclockwise."""
    n = len(hull)
    if n < 3:
        return _brute_diameter(hull)

    def area2(i, j, k):
        a, b, c = hull[i], hull[j], hull[k]
        return abs((b - a).real * (c - a).imag - (b - a).imag * (c - a).real)

    best = 0.0
    j = 1
    for i in range(n):
        i1 = (i + 1) % n
        while area2(i, i1, (j + 1) % n) > area2(i, i1, j):
            j = (j + 1) % n
        best = max(best, abs(hull[i] - hull[j]), abs(hull[i1] - hull[j]))
    return best


def diameter(points):
    """Diameter of a finite point set via convex hull and rotating calipers."""
    pts = np.unique(np.asarray(points, dtype=complex).ravel())
    if pts.size <= 3:
        return _brute_diameter(pts) if pts.size > 1 else 0.0
    try:
        hull = ConvexHull(np.column_stack([pts.real, pts.imag]))
    except QhullError:
        # collinear input
        return _brute_diameter(pts)
    return rotating_calipers(pts[hull.vertices])


def _arc_points(vertices, i, j):
    """Vertices from index ``i`` to ``j`` walking forward (inclusive, cyclic)."""
    n = vertices.size
    if j >= i:
        return vertices[i:j + 1]
    return np.concatenate([vertices[i:], vertices[:j + 1]])


def _sample_indices(curve, samples):
    """Vertex indices nearest to ``samples`` uniform arclength positions."""
    n = len(curve)
    if n <= samples:
        return np.arange(n)
    s = curve.length * np.arange(samples) / samples
    k = np.searchsorted(curve.cumulative_lengths[:-1], s)
    k = np.clip(k, 0, n - 1)
    prev = np.clip(k - 1, 0, n - 1)
    pick = np.where(
        np.abs(curve.cumulative_lengths[prev] - s) < np.abs(curve.cumulative_lengths[k] - s), prev, k
    )
    return np.unique(pick)


def _arc_diameters(pts):
    """``D[i, j]``: diameter of the forward arc of ``pts`` from ``i`` to ``j``."""
    m = pts.size
    dist = np.abs(pts[:, None] - pts[None, :])
    out = np.zeros((m, m))
    for i in range(m):
        order = (i + np.arange(m)) % m
        # column l of the upper triangle: farthest earlier point from point l
        colmax = np.triu(dist[np.ix_(order, order)]).max(axis=0)
        out[i, order] = np.maximum.accumulate(colmax)
    return out


def _polyline_pairs(curve, alpha, samples, refine=8):
    """Sup of the ratio over sampled vertex pairs; exact diameters for the leaders."""
    idx = _sample_indices(curve, samples)
    pts = curve.vertices[idx]
    d_fwd = _arc_diameters(pts)
    d_bwd = d_fwd.T
    chord = np.abs(pts[:, None] - pts[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.minimum(d_fwd, d_bwd) / chord**alpha
    np.fill_diagonal(ratio, -np.inf)
    flat = np.argsort(ratio, axis=None)[::-1][: 2 * refine]
    best = (-math.inf, None)
    for f in flat:
        a, b = np.unravel_index(f, ratio.shape)
        if a >= b:
            continue
        ia, ib = idx[a], idx[b]
        verts = curve.vertices
        d1 = diameter(_arc_points(verts, ia, ib))
        d2 = diameter(_arc_points(verts, ib, ia))
        r = min(d1, d2) / abs(verts[ia] - verts[ib]) ** alpha
        if r > best[0]:
            best = (r, (complex(verts[ia]), complex(verts[ib])))
    return best


def _tip_ratio(beta, t, alpha, n_arc=400):
    """Diameter of the tip component for ``a = t + i t**beta``, ``b = conj(a)``."""
    x = t * np.linspace(0.0, 1.0, n_arc) ** 2
    arc = np.concatenate([x + 1j * x**beta, (x - 1j * x**beta)[1:]])
    diam = diameter(arc)
    chord = 2.0 * t**beta
    return diam, chord, diam / chord**alpha


def ahlfors_gamma(target, alpha=1.0, samples=256, t_min=1e-8, t_max=0.5):
    """Three-point estimate for a polyline or the boundary of a cusp domain.

    For a :class:`~cuspflat.geometry.CuspShape` the sampled pairs are the
    uniform-arclength pairs of a tip-refined polygon together with the
    symmetric pairs ``t +- i t**beta`` on a log grid of ``samples`` values
    ``t_min <= t <= t_max``.
    """
    if samples < 100:
        raise DomainError("samples must be at least 100")
    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    if isinstance(target, RectifiableCurve):
        g, pair = _polyline_pairs(target, alpha, samples)
        return AhlforsEstimate(float(g), alpha, pair)
    if not isinstance(target, CuspShape):
        raise TypeError("target must be a RectifiableCurve or a CuspShape")
    beta = target.beta
    poly = cusp_polygon(beta, n=samples, tip_power=3.0)
    g, pair = _polyline_pairs(poly, alpha, samples)
    ts = np.geomspace(t_min, t_max, samples)
    rows = np.array([_tip_ratio(beta, t, alpha) for t in ts])
    k = int(np.argmax(rows[:, 2]))
    if rows[k, 2] > g:
        t = ts[k]
        g, pair = rows[k, 2], (complex(t, t**beta), complex(t, -(t**beta)))
    # slopes over the smallest decade of t, where the asymptotics hold
    tip = ts <= t_min * 10.0
    fitted = float(np.polyfit(np.log(rows[tip, 1]), np.log(rows[tip, 0]), 1)[0])
    ratio_exp = float(np.polyfit(np.log(ts[tip]), np.log(rows[tip, 2]), 1)[0])
    return AhlforsEstimate(float(g), alpha, pair, fitted, ratio_exp)
