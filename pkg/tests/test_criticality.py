import math
from fractions import Fraction as F

import pytest

from cuspflat.criticality import (
    CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    beta_critical,
    classify,
    critical_branch,
    empirical_verdict,
    margins,
    max_p_for_beta,
    probe_gammas,
)
from cuspflat.exceptions import DomainError
from cuspflat.exponents import ExponentPair, as_exponent, format_exponent
from cuspflat.geometry import Orientation
from cuspflat.mapping import admissible_gamma_interval, forced_map
from cuspflat.quadrature import DELTA, Region, annulus_profile

INF = math.inf
GRID = [F(3, 2), F(2), F(3), F(5), INF]


def test_beta_critical_examples():
    assert beta_critical(2, 2) == 5
    assert beta_critical("inf", 2) == 2
    assert beta_critical(3, "inf") == 2
    assert beta_critical(INF, INF) == 1
    assert isinstance(beta_critical(F(3, 2), 3), F)
    assert critical_branch(2, 2) == "(pq+2p+q)/(pq-q)"
    assert critical_branch("inf", 2) == "2/q+1"
    assert critical_branch(3, "inf") == "(p+1)/(p-1)"


@pytest.mark.parametrize("p", [1, F(1, 2), 0])
def test_beta_critical_needs_p_above_one(p):
    with pytest.raises(DomainError, match="p > 1"):
        beta_critical(p, 2)


def test_q_below_one_rejected():
    with pytest.raises(DomainError):
        beta_critical(2, F(1, 2))


def test_branch_limits():
    # the one-sided limits are approached at rate O(1/p) and O(1/q)
    for q in (F(3, 2), F(2), F(7)):
        for p in (F(10**6), F(10**12)):
            gap = beta_critical(p, q) - (2 / q + 1)
            assert gap == (2 * q + 2) / (q * (p - 1))
        assert abs(float(beta_critical(F(10**12), q) - (2 / q + 1))) < 1e-9
    for p in (F(3, 2), F(2), F(7)):
        for q in (F(10**6), F(10**12)):
            gap = beta_critical(p, q) - (p + 1) / (p - 1)
            assert gap == 2 * p / (q * (p - 1))
        assert abs(float(beta_critical(p, F(10**12)) - (p + 1) / (p - 1))) < 1e-9


def test_monotone_on_grid():
    for p in GRID:
        col = [beta_critical(p, q) for q in GRID]
        assert all(a > b for a, b in zip(col, col[1:]))
    for q in GRID:
        row = [beta_critical(p, q) for p in GRID]
        assert all(a > b for a, b in zip(row, row[1:]))


def test_max_p_for_beta():
    assert max_p_for_beta(F(4, 3)) == 13
    assert max_p_for_beta(5) == 2
    assert beta_critical(2, 2) == 5
    assert max_p_for_beta(F(1) + F(1, 10**9)) > 10**9
    for b in (1, F(1, 2)):
        with pytest.raises(DomainError):
            max_p_for_beta(b)


def test_max_p_inverts_diagonal():
    for k in range(1, 60):
        p = 1 + F(k, 7)
        assert beta_critical(p, p) == (p + 3) / (p - 1)
        assert max_p_for_beta(beta_critical(p, p)) == p


def test_classify_examples():
    assert classify(2, 2, 2).classification == SUBCRITICAL
    assert classify(5, 2, 2).classification == CRITICAL
    assert classify(3, "inf", 2).classification == SUPERCRITICAL
    assert classify(2, 2, 2).exists
    assert not classify(5, 2, 2).exists
    v = classify(F(49, 10), 2, 2)
    assert v.beta_cr == 5 and v.branch == "(pq+2p+q)/(pq-q)"


def test_classify_outward_swaps():
    # outward: cusp domain measured with p, complement with q
    v = classify(2, 3, "inf", Orientation.OUTWARD)
    assert v.beta_cr == beta_critical("inf", 3)
    assert v.classification == SUPERCRITICAL
    assert classify(2, 3, "inf").classification == CRITICAL
    with pytest.raises(DomainError):
        classify(F(1, 2), 2, 2)


def test_exponent_parsing():
    assert as_exponent("3/2") == F(3, 2)
    assert as_exponent("inf") == INF
    assert as_exponent(2.5) == F(5, 2)
    assert format_exponent(INF) == "inf"
    assert format_exponent(F(3, 2)) == "3/2"
    with pytest.raises(DomainError):
        as_exponent("abc")
    with pytest.raises(DomainError):
        as_exponent(True)
    pair = ExponentPair(q=2, p="inf")
    assert pair.swapped() == ExponentPair(q="inf", p=2)


def test_margins():
    assert margins(2, 0.5, 2, 2) == (1.0, 2.0)
    mc, mp = margins(4.9, 0.975, 2, 2)
    assert mc == pytest.approx(0.05) and mp == pytest.approx(0.05)


def test_probe_grid():
    g = probe_gammas(5.1, F(2))
    assert len(g) == 32 and g[0] == 0.0 and g[-1] == pytest.approx(8.2)
    assert probe_gammas(1.2, F(2))[-1] == pytest.approx(1.0)


def test_empirical_subcritical():
    v = empirical_verdict(2, 2, 2)
    e = v.empirical
    assert e.gamma == 0.5
    assert e.cusp_slope < -DELTA and e.complement_slope < -DELTA
    assert e.converges and e.agrees and not e.surrogate


def test_interval_at_49_and_51():
    pair = ExponentPair(q=2, p=2)
    lo, hi = admissible_gamma_interval(F(49, 10), pair)
    assert (lo, hi) == (F(19, 20), 1)
    lo, hi = admissible_gamma_interval(F(51, 10), pair)
    assert (lo, hi) == (F(21, 20), 1) and lo > hi


@pytest.mark.parametrize("gamma", [0.975, 1.025])
def test_forced_probes_51(gamma):
    m = forced_map(5.1, gamma)
    cusp = annulus_profile(m, Region.CUSP_INTERIOR, 2.0, k_min=32)
    comp = annulus_profile(m, Region.COMPLEMENT, 2.0, k_min=32)
    assert not (cusp.converges and comp.converges)
    assert max(cusp.slope, comp.slope) >= -DELTA


def test_empirical_supercritical_surrogate():
    v = empirical_verdict(F(11, 2), 2, 2, n_probes=8)
    e = v.empirical
    assert v.classification == SUPERCRITICAL
    assert e.surrogate and not e.converges and e.agrees
    assert len(e.probes) == 8


def test_empirical_needs_cusp():
    with pytest.raises(DomainError):
        empirical_verdict(1, 2, 2)


def _grid_cases():
    for p in GRID:
        for q in GRID:
            bcr = beta_critical(p, q)
            for factor in (F(9, 10), F(11, 10)):
                beta = bcr * factor
                if beta > 1:
                    yield p, q, beta


@pytest.mark.parametrize("p,q,beta", list(_grid_cases()), ids=lambda x: format_exponent(x))
def test_grid_agreement(p, q, beta):
    v = empirical_verdict(beta, p, q, n_probes=8)
    assert v.empirical.agrees, (v.classification, v.empirical)
