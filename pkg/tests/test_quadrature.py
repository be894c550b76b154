import math

import numpy as np
import pytest

from cuspflat.criticality import margins
from cuspflat.exceptions import DomainError
from cuspflat.mapping import distortion, forced_map
from cuspflat.quadrature import (
    DELTA,
    Region,
    adaptive_square,
    annulus_profile,
    integrate_distortion,
    integrate_sector,
    sector_profile,
    spherical_energy,
)

from conftest import cusp_map

LN2 = math.log(2.0)


@pytest.mark.parametrize("s", [0.0, 0.5, 1.0, 1.5, 1.9])
def test_model_integrand_to_origin(s):
    res = integrate_sector(lambda r, t: r**-s, 0.0, math.pi / 4)
    exact = (math.pi / 4) / (2 - s)
    assert res.converged
    assert abs(res.value - exact) / exact < 1e-8
    assert res.abs_error_estimate >= 0


@pytest.mark.parametrize("eps", [1e-3, 0.25])
def test_model_integrand_annular(eps):
    res = integrate_sector(lambda r, t: 1.0 / r, 0.0, math.pi / 4, r_min=eps)
    exact = (math.pi / 4) * (1 - eps)
    assert abs(res.value - exact) / exact < 1e-8
    assert res.tail == 0.0


def test_constant_is_area():
    res = integrate_sector(lambda r, t: np.ones_like(r), 0.3, 2.0, r_min=0.2, r_max=0.9)
    assert res.value == pytest.approx(0.5 * 1.7 * (0.81 - 0.04), abs=1e-10)


def test_angular_dependence():
    # int cos(theta)**2 r^-1 r dr dtheta over the full circle = pi
    res = integrate_sector(lambda r, t: np.cos(t) ** 2 / r, 0.0, 2 * math.pi)
    assert res.value == pytest.approx(math.pi, rel=1e-10)


def test_error_estimates_shrink():
    errs = [integrate_sector(lambda r, t: r**-1.5, 0, 1, tol=tol).abs_error_estimate for tol in (1e-4, 1e-7, 1e-10)]
    assert errs[0] >= errs[1] >= errs[2]
    assert errs[2] < 1e-2 * errs[0]


def test_adaptive_square_kink():
    # |u - 1/3| has a line kink inside the square
    f = lambda u, s: np.abs(u - 1 / 3) * (1 + s)
    val, err, cells, ok = adaptive_square(f, 1e-9, 1e-9)
    exact = (1 / 18 + 2 / 9) * 1.5
    assert ok and cells > 1
    assert abs(val - exact) <= err + 1e-15


def test_bad_tolerance(map222):
    with pytest.raises(DomainError):
        integrate_distortion(map222, Region.CUSP_INTERIOR, 2.0, tol=0.0)
    with pytest.raises(DomainError):
        integrate_sector(lambda r, t: r, 0, 1, tol=-1)


def test_deterministic(map222):
    a = integrate_distortion(map222, Region.CUSP_INTERIOR, 2.0)
    b = integrate_distortion(map222, Region.CUSP_INTERIOR, 2.0)
    assert a == b


@pytest.mark.parametrize("region", list(Region))
def test_subcritical_222_converges(map222, region):
    res = integrate_distortion(map222, region, 2.0, tol=1e-9)
    assert res.converged
    assert res.abs_error_estimate <= 1e-9 * max(1.0, abs(res.value))
    assert res.value > 0


def test_refinement_stability_14():
    m = cusp_map(1.4, 2, 4)
    coarse = integrate_distortion(m, Region.CUSP_INTERIOR, 4.0, tol=1e-6)
    fine = integrate_distortion(m, Region.CUSP_INTERIOR, 4.0, tol=1e-11)
    assert fine.converged
    assert abs(coarse.value - fine.value) <= 1e-6 * fine.value
    coarse = spherical_energy(m, 2.0, tol=1e-7)
    fine = spherical_energy(m, 2.0, tol=1e-11)
    assert np.isfinite(fine.value) and fine.converged
    assert abs(coarse.value - fine.value) <= 1e-6 * fine.value


def test_region_areas_sum_to_disk():
    # with gamma = 0 and exponent 0 the densities integrate the plain area
    m = forced_map(2.0, 0.0)
    a = integrate_distortion(m, Region.CUSP_INTERIOR, 0.0).value
    b = integrate_distortion(m, Region.COMPLEMENT, 0.0).value
    assert a + b == pytest.approx(math.pi, rel=1e-10)
    # the removed horn inside the unit disk: 2 int_0^t x^2 dx plus the circular cap
    t = 0.786151377757423286
    cap = 2 * (0.5 * math.atan(t) - 0.5 * t * t**2) + 2 * t**3 / 3
    assert b == pytest.approx(cap, rel=1e-10)


def test_identity_sphere():
    for p in (1.0, 2.0, 7.5):
        res = spherical_energy(None, p, R=100.0)
        assert abs(res.value + res.tail - 4 * math.pi) < 1e-8
        assert res.tail == pytest.approx(4 * math.pi / (1 + 100.0**2))


def test_sphere_energy_bound():
    m = cusp_map(1.4, 2, 4)
    res = spherical_energy(m, 2.0)
    r = np.geomspace(2.0**-40, 0.999, 400)
    th = np.linspace(0, 2 * math.pi, 181)[:-1]
    R, T = np.meshgrid(r, th)
    kmax = distortion(m, R, T).max()
    assert res.value + res.tail <= 4 * math.pi * kmax**2
    assert res.value > 4 * math.pi - res.tail


def test_profile_model_slopes():
    prof = sector_profile(lambda r, t: r**-1.5, 0.0, 1.0, k_max=30)
    assert prof.slope == pytest.approx(-0.5 * LN2, abs=1e-9)
    assert prof.converges
    prof = sector_profile(lambda r, t: np.ones_like(r), 0.0, 1.0, k_max=30)
    assert prof.slope == pytest.approx(-2 * LN2, abs=1e-9)
    prof = sector_profile(lambda r, t: r**-2.0, 0.0, 1.0, k_max=30)
    assert abs(prof.slope) < 1e-9 and not prof.converges
    assert np.all(np.asarray(prof.partials) >= 0)
    assert np.all(np.diff(prof.radii) < 0)


@pytest.mark.parametrize("cfg", [(2, 2, 2), (4.5, 2, 2), (4 / 3, 3, 3), (3, 5, 1.5)])
def test_profile_slopes_match_margins(cfg):
    beta, p, q = cfg
    m = cusp_map(*cfg)
    mc, mp = margins(beta, m.gamma, p, q)
    cusp = annulus_profile(m, Region.CUSP_INTERIOR, q, k_max=40, k_min=30)
    comp = annulus_profile(m, Region.COMPLEMENT, p, k_max=40, k_min=30)
    assert cusp.slope == pytest.approx(-mc * LN2, abs=2e-3)
    assert comp.slope == pytest.approx(-mp * LN2, abs=2e-3)
    assert cusp.converges and comp.converges


def test_supercritical_profile_diverges():
    m = forced_map(5.5, 1.0)
    comp = annulus_profile(m, Region.COMPLEMENT, 2.0, k_max=40, k_min=30)
    assert comp.slope >= -DELTA
    assert not comp.converges
    res = integrate_distortion(m, Region.COMPLEMENT, 2.0)
    assert not res.converged


def test_sup_profile():
    m = cusp_map(2, 2, "inf")
    res = integrate_distortion(m, Region.CUSP_INTERIOR, math.inf)
    assert np.isfinite(res.value) and res.converged
    prof = annulus_profile(m, Region.CUSP_INTERIOR, math.inf, k_max=40, k_min=30)
    assert prof.kind == "sup" and prof.converges
    prof = annulus_profile(m, Region.COMPLEMENT, math.inf, k_max=40, k_min=30)
    assert not prof.converges
