import math
from fractions import Fraction as F

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from cuspflat.ahlfors import _brute_diameter, diameter
from cuspflat.boundary import RectifiableCurve, arclength_of, boundary_homeo, douglas_integral, log_condition
from cuspflat.criticality import CRITICAL, SUBCRITICAL, SUPERCRITICAL, beta_critical, classify
from cuspflat.geometry import CuspShape, contains, from_polar, sector_bounds, solve_t
from cuspflat.mapping import beltrami, cartesian_differential, distortion, forward, inverse
from cuspflat.reflection import circle_inversion

from conftest import cusp_map

PI = math.pi
SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])

betas = st.floats(1.0, 6.0)
radii = st.floats(1e-6, 1.4)
exps = st.builds(lambda n, d: 1 + F(n, d), st.integers(1, 1000), st.integers(1, 50))
# subcritical betas at (p, q) = (2, 2), kept on a coarse grid so maps are cached
sub_betas = st.sampled_from([1.25, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5])


def _polar_points(draw_r, draw_t, m):
    """Points away from the seams theta = +-a(r), given as (r, theta)."""
    r, th = draw_r, draw_t
    a = sector_bounds(r, m.shape).a
    assume(min(abs(th - a), abs(th - (2 * PI - a))) > 1e-6)
    return r, th


@SETTINGS
@given(r=radii, beta=betas)
def test_solve_t_residual(r, beta):
    t = solve_t(r, beta)
    assert abs(t * t + t ** (2 * beta) - r * r) <= 1e-14 * max(1.0, r * r)
    assert t <= r <= t * math.sqrt(2) * (1 + 1e-15)


@SETTINGS
@given(r1=radii, r2=radii, beta=betas)
def test_solve_t_monotone(r1, r2, beta):
    assume(r1 < r2)
    assert solve_t(r1, beta) <= solve_t(r2, beta)


@SETTINGS
@given(beta=sub_betas, r=st.floats(1e-3, 0.999), th=st.floats(0, 2 * PI, exclude_max=True))
def test_roundtrip(beta, r, th):
    m = cusp_map(beta, 2, 2)
    r, th = _polar_points(r, th, m)
    z = complex(from_polar(r, th))
    w = forward(m, z)
    assert abs(inverse(m, w) - z) < 1e-10
    assert abs(w) < 1


@SETTINGS
@given(beta=sub_betas, r=st.floats(1e-6, 0.999), th=st.floats(0, 2 * PI, exclude_max=True))
def test_distortion_and_orientation(beta, r, th):
    m = cusp_map(beta, 2, 2)
    r, th = _polar_points(r, th, m)
    k = distortion(m, r, th)
    assert k >= 1 - 1e-12
    d = cartesian_differential(m, complex(from_polar(r, th)), normalized=True)
    assert np.linalg.det(d) > 0


@SETTINGS
@given(beta=sub_betas, r=st.floats(1e-4, 0.999), th=st.floats(0, 2 * PI, exclude_max=True))
def test_beltrami_bounded(beta, r, th):
    m = cusp_map(beta, 2, 2)
    r, th = _polar_points(r, th, m)
    mu = abs(beltrami(m, r, th))
    k = distortion(m, r, th)
    assert mu < 1
    # K = (1 + |mu|) / (1 - |mu|)
    assert math.isclose(mu, (k - 1) / (k + 1), rel_tol=1e-8, abs_tol=1e-12)


@SETTINGS
@given(p1=exps, dp=exps, q=exps)
def test_beta_critical_monotone(p1, dp, q):
    p2 = p1 + dp - 1
    assert beta_critical(p1, q) > beta_critical(p2, q)
    assert beta_critical(q, p1) > beta_critical(q, p2)


@SETTINGS
@given(p=exps, q=exps, eps=st.fractions(min_value=F(1, 10**6), max_value=F(1, 2)))
def test_classify_exact(p, q, eps):
    bcr = beta_critical(p, q)
    assert classify(bcr, p, q).classification == CRITICAL
    assert classify(bcr + eps, p, q).classification == SUPERCRITICAL
    if bcr - eps > 1:
        assert classify(bcr - eps, p, q).classification == SUBCRITICAL


@SETTINGS
@given(x=st.floats(-1e3, 1e3), y=st.floats(-1e3, 1e3))
def test_inversion_involution(x, y):
    z = complex(x, y)
    assume(abs(z) > 1e-3)
    w = circle_inversion(z)
    assert abs(circle_inversion(w) - z) <= 1e-14 * abs(z)
    assert math.isclose(abs(w) * abs(z), 1.0, rel_tol=1e-14)


def _star_polygon(data, n):
    r = data.draw(st.lists(st.floats(0.5, 2.0), min_size=n, max_size=n))
    th = 2 * PI * np.arange(n) / n
    return RectifiableCurve(np.array(r) * np.exp(1j * th))


@SETTINGS
@given(data=st.data(), n=st.integers(5, 40))
def test_homeo_monotone_on_star_polygons(data, n):
    curve = _star_polygon(data, n)
    base = data.draw(st.integers(0, n - 1))
    h = boundary_homeo(curve, base)
    alpha = np.linspace(0, 2 * PI, 200, endpoint=False)
    s = arclength_of(curve, h.at_angle(alpha))
    s = np.mod(s - curve.cumulative_lengths[base], curve.length)
    s[0] = 0.0
    assert np.all(np.diff(s) > 0)


@settings(max_examples=15, deadline=None)
@given(data=st.data(), rot=st.floats(0, 2 * PI), sx=st.floats(-5, 5), sy=st.floats(-5, 5),
       lam=st.floats(0.1, 10))
def test_douglas_and_log_rigid_motions(data, rot, sx, sy, lam):
    curve = _star_polygon(data, 12)
    h = boundary_homeo(curve)
    base = douglas_integral(h, n=128)
    moved = boundary_homeo(curve.moved(rot, complex(sx, sy)))
    assert math.isclose(douglas_integral(moved, n=128), base, rel_tol=1e-9)
    assert math.isclose(douglas_integral(boundary_homeo(curve.scaled(lam)), n=128), lam**2 * base, rel_tol=1e-9)
    lc = log_condition(curve, n=128)
    assert math.isclose(log_condition(curve.scaled(lam), n=128), lam**2 * lc, rel_tol=1e-9)


@SETTINGS
@given(pts=st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=1, max_size=60))
def test_diameter_brute_force(pts):
    z = np.array([complex(x, y) for x, y in pts])
    assert math.isclose(diameter(z), _brute_diameter(np.unique(z)), rel_tol=1e-12, abs_tol=1e-12)


@SETTINGS
@given(beta=betas, r=st.floats(1e-4, 0.999), th=st.floats(0, 2 * PI, exclude_max=True))
def test_contains_matches_sector(beta, r, th):
    shape = CuspShape(beta)
    a = sector_bounds(r, shape).a
    assume(min(abs(th - a), abs(th - (2 * PI - a))) > 1e-9)
    inside = a < th < 2 * PI - a
    assert bool(contains(shape, complex(from_polar(r, th)))) == inside
