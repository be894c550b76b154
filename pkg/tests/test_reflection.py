import math

import numpy as np
import pytest

from cuspflat.exceptions import DomainError, SingularPointError
from cuspflat.geometry import cusp_area, cusp_boundary
from cuspflat.mapping import forward
from cuspflat.reflection import (
    CENTER,
    ReflectionMap,
    admissible_points,
    circle_inversion,
    conjugator,
    curve_length_check,
    flatten,
    in_domain,
    inversion_differential,
    isoperimetric_check,
    max_segment_abscissa,
    random_admissible_boxes,
    reflect,
    reflection_jet,
    sector_reflection,
    unflatten,
    verify_reflection_inequality,
)

from conftest import cusp_map

# mpmath 2-d quadrature over [1, 2] x [1, 2] of |z|^-2 and |z|^-4
INT_Z2 = 0.2313065733864077494
INT_Z4 = 0.0581564578987408225


@pytest.fixture(scope="module")
def rm():
    return ReflectionMap.from_cusp_map(cusp_map(2, 2, 2))


def test_inversion_examples():
    assert circle_inversion(2 + 0j) == 0.5
    th = np.linspace(0, 2 * math.pi, 50)
    u = np.exp(1j * th)
    assert np.abs(circle_inversion(u) - u).max() < 1e-15
    rng = np.random.default_rng(0)
    z = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    assert np.abs(circle_inversion(circle_inversion(z)) - z).max() < 1e-14 * np.abs(z).max()
    with pytest.raises(SingularPointError):
        circle_inversion(0j)


def test_inversion_anticonformal():
    rng = np.random.default_rng(1)
    z = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    d = inversion_differential(z)
    norm2 = np.linalg.norm(d, ord=2, axis=(1, 2)) ** 2
    jac = np.linalg.det(d)
    assert np.all(jac < 0)
    assert np.max(np.abs(norm2 - np.abs(jac)) / np.abs(jac)) < 1e-13


def test_inversion_differential_matches_fd():
    z = np.array([0.3 + 0.4j, -1.2 + 0.1j, 2 - 3j])
    h = 1e-6
    d = inversion_differential(z)
    dx = (circle_inversion(z + h) - circle_inversion(z - h)) / (2 * h)
    dy = (circle_inversion(z + 1j * h) - circle_inversion(z - 1j * h)) / (2 * h)
    assert np.allclose(d[:, 0, 0], dx.real, rtol=1e-8) and np.allclose(d[:, 1, 0], dx.imag, rtol=1e-8)
    assert np.allclose(d[:, 0, 1], dy.real, rtol=1e-8) and np.allclose(d[:, 1, 1], dy.imag, rtol=1e-8)


def test_sector_normalisation():
    rng = np.random.default_rng(2)
    w = rng.uniform(-1, 1, 500) + 1j * rng.uniform(-1, 1, 500)
    assert np.abs(unflatten(flatten(w)) - w).max() < 1e-14
    # the sector boundary goes to the unit circle and is fixed by R_S
    th = np.linspace(math.pi / 4, 7 * math.pi / 4, 200)
    arc = np.exp(1j * th)
    rays = np.concatenate([s * np.exp(1j * math.pi / 4) for s in (np.linspace(0, 1, 50),)])
    rays = np.concatenate([rays, rays.conj()])
    for b in (arc, rays):
        assert np.abs(np.abs(flatten(b)) - 1).max() < 1e-14
        assert np.abs(sector_reflection(b) - b).max() < 1e-15
    w = w[w != CENTER]
    assert np.abs(sector_reflection(sector_reflection(w)) - w).max() < 1e-13


def test_reflection_involution(rm):
    rng = np.random.default_rng(3)
    z = admissible_points(rm, 10_000, rng)
    assert z.size == 10_000
    assert np.abs(reflect(rm, reflect(rm, z)) - z).max() < 1e-9


def test_reflection_fixes_boundary(rm):
    x = np.linspace(1e-3, 0.75, 300)
    up, lo = cusp_boundary(rm.base.shape, x)
    pts = np.concatenate([up, lo])
    assert np.abs(reflect(rm, pts) - pts).max() < 1e-9


def test_membership_flips(rm):
    rng = np.random.default_rng(4)
    z = admissible_points(rm, 1000, rng)
    assert np.all(in_domain(rm, z) != in_domain(rm, reflect(rm, z)))


def test_singular_point(rm):
    s = rm.singular_point
    assert forward(rm.base, s) == pytest.approx(CENTER, abs=1e-14)
    assert conjugator(rm, s) == pytest.approx(0, abs=1e-13)
    with pytest.raises(SingularPointError):
        sector_reflection(CENTER + 0j)
    with pytest.raises(DomainError):
        box = (s.real - 0.01, s.real + 0.01, s.imag - 0.01, s.imag + 0.01)
        verify_reflection_inequality(rm, box, 2.0)


def test_identity_inequality_closed_form():
    ident = ReflectionMap.identity()
    assert ident.singular_point == 0
    for p in (1.5, 2.0, 4.0):
        c = verify_reflection_inequality(ident, (1.0, 2.0, 1.0, 2.0), p, cells=16)
        assert c.lhs == pytest.approx(INT_Z2, rel=1e-10)
        assert c.image_integral == pytest.approx(INT_Z4, rel=1e-10)
        assert c.domain_integral == pytest.approx(1.0, rel=1e-12)
        assert c.rhs == pytest.approx(math.sqrt(INT_Z4), rel=1e-10)
        assert c.holds


def test_reflection_jet_vs_fd(rm):
    rng = np.random.default_rng(5)
    z = admissible_points(rm, 200, rng, r_lo=0.2, r_hi=0.8)
    _, dg, _, _ = reflection_jet(rm, z)
    h = 1e-7
    dx = (reflect(rm, z + h) - reflect(rm, z - h)) / (2 * h)
    dy = (reflect(rm, z + 1j * h) - reflect(rm, z - 1j * h)) / (2 * h)
    fd = np.stack([np.stack([dx.real, dy.real], -1), np.stack([dx.imag, dy.imag], -1)], -2)
    scale = np.linalg.norm(dg, axis=(1, 2))
    err = np.linalg.norm(dg - fd, axis=(1, 2)) / scale
    # seams of f and of the sector normalisation are crossed by a few stencils
    assert np.median(err) < 1e-6
    assert np.mean(err < 1e-4) > 0.95


def test_inequality_random_boxes(rm):
    rng = np.random.default_rng(6)
    boxes = random_admissible_boxes(rm, 20, rng)
    assert len(boxes) == 20
    for b in boxes:
        c = verify_reflection_inequality(rm, b, 2.0)
        assert c.holds, (b, c)
        assert c.lhs > 0


def test_inequality_thin_box(rm):
    rng = np.random.default_rng(7)
    (b,) = random_admissible_boxes(rm, 1, rng, aspect=100.0)
    assert (b[1] - b[0]) / (b[3] - b[2]) == pytest.approx(100.0)
    c = verify_reflection_inequality(rm, b, 2.0)
    assert c.holds


def test_inequality_other_exponents():
    rm3 = ReflectionMap.from_cusp_map(cusp_map(4 / 3, 3, 3))
    rng = np.random.default_rng(8)
    for b in random_admissible_boxes(rm3, 5, rng):
        assert verify_reflection_inequality(rm3, b, 3.0).holds


def test_bad_box(rm):
    with pytest.raises(DomainError):
        verify_reflection_inequality(rm, (0.5, 0.4, 0.1, 0.2), 2.0)
    with pytest.raises(DomainError):
        verify_reflection_inequality(rm, (0.4, 0.5, 0.1, 0.2), 1.0)


def test_segment_length(rm):
    c = curve_length_check(rm, 0.5)
    assert c.holds and c.length >= 1 - 1e-3
    assert c.polyline_length == pytest.approx(c.length, rel=1e-3)
    for t in np.linspace(0.05, 0.95 * max_segment_abscissa(2.0), 20):
        assert curve_length_check(rm, t).holds
    with pytest.raises(DomainError):
        curve_length_check(rm, 0.9)


def test_isoperimetric(rm):
    for t in (0.1, 0.3, 0.5, 0.7):
        c = isoperimetric_check(rm, t)
        assert c.holds
        # the closing arc g(I_t) alone is at least 2t long
        assert c.perimeter > 2 * t and c.area > 0


def test_cusp_area_exact():
    from fractions import Fraction as F

    assert cusp_area(F(1), 1) == 1
    assert isinstance(cusp_area(F(2, 7), 3), F)
    # independent: shoelace area of a fine polygon of the horn
    x = np.linspace(0.0, 0.5, 200_001)
    horn = np.concatenate([x + 1j * x**2, (x - 1j * x**2)[::-1][:-1]])
    area = 0.5 * abs(np.sum(horn.real * np.roll(horn.imag, -1) - np.roll(horn.real, -1) * horn.imag))
    assert cusp_area(0.5, 2.0) == pytest.approx(area, rel=1e-9)
