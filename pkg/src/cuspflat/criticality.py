"""Existence and nonexistence of cusp flattenings with integrable distortion.

A cusp of power ``beta`` can be flattened with ``K in L^q`` on the cusp
domain and ``K in L^p`` on its complement exactly when
``beta < beta_cr(p, q)``.  :func:`classify` decides this with exact
rational arithmetic.  :func:`empirical_verdict` checks it numerically:
below the threshold it profiles the constructed map, above it it runs a
grid of forced squeezing exponents and confirms that none of them makes
both integrals converge.  The forced grid is a numerical surrogate for
nonexistence, not a proof.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import DomainError
from .exponents import (
    ExponentPair,
    as_exponent,
    beta_critical,
    critical_branch,
    is_inf,
    max_p_for_beta,
)
from .geometry import Orientation
from .mapping import forced_map, make_map
from .quadrature import DELTA, DELTA_SUP, FIT_WINDOW, Region, annulus_profile

__all__ = [
    "beta_critical",
    "critical_branch",
    "max_p_for_beta",
    "classify",
    "empirical_verdict",
    "CriticalityVerdict",
    "EmpiricalCheck",
]

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class EmpiricalCheck:
    """Annulus-profile evidence for one configuration.

    ``gamma`` and the slopes belong to the constructed map below the
    threshold, and to the most favourable forced probe above it.
    ``probes`` lists ``(gamma, cusp_slope, complement_slope)`` for every
    forced probe.
    """

    cusp_slope: float
    complement_slope: float
    gamma: float
    converges: bool
    agrees: bool
    surrogate: bool
    probes: tuple = ()


@dataclass(frozen=True)
class CriticalityVerdict:
    beta: Fraction
    p: object
    q: object
    beta_cr: Fraction
    branch: str
    classification: str
    orientation: Orientation = Orientation.INWARD
    empirical: EmpiricalCheck = None

    @property
    def exists(self):
        return self.classification == SUBCRITICAL


def classify(beta, p, q, orientation=Orientation.INWARD):
    """Compare ``beta`` with the critical power.

    For outward cusps the exponents trade places: the cusp domain is
    then measured with ``p`` and its complement with ``q``.  The
    equality case counts as nonexistence.
    """
    orientation = Orientation(orientation)
    b = as_exponent(beta)
    if is_inf(b) or b < 1:
        raise DomainError(f"cusp power must satisfy 1 <= beta < inf, got {beta}")
    exps = ExponentPair(q=q, p=p)
    if orientation is Orientation.OUTWARD:
        exps = exps.swapped()
    bcr = beta_critical(exps.p, exps.q)
    if b < bcr:
        cls = SUBCRITICAL
    elif b == bcr:
        cls = CRITICAL
    else:
        cls = SUPERCRITICAL
    return CriticalityVerdict(
        beta=b,
        p=as_exponent(p),
        q=as_exponent(q),
        beta_cr=bcr,
        branch=critical_branch(exps.p, exps.q),
        classification=cls,
        orientation=orientation,
    )


def _profiles(m, q, p, k_max, k_min):
    cusp = annulus_profile(m, Region.CUSP_INTERIOR, float(q), k_max=k_max, k_min=k_min)
    comp = annulus_profile(m, Region.COMPLEMENT, float(p), k_max=k_max, k_min=k_min)
    return cusp, comp


def probe_gammas(beta, q, n_probes=32):
    """Forced squeezing exponents for the supercritical surrogate.

    ``n_probes`` equally spaced values from 0 to ``max(2 (beta - 1), 2/q)``,
    which covers every exponent for which either integral could converge.
    """
    beta = float(beta)
    upper = 2.0 * (beta - 1.0)
    if not is_inf(q):
        upper = max(upper, 2.0 / float(q))
    return np.linspace(0.0, upper, n_probes)


def empirical_verdict(beta, p, q, k_max=40, n_probes=32, full_profile=False):
    """Classify ``beta`` and back the verdict with annulus profiles.

    Only the last eight annuli enter the slope fit, so by default only
    those are integrated; ``full_profile=True`` integrates all of them.
    """
    verdict = classify(beta, p, q)
    if verdict.beta <= 1:
        raise DomainError("empirical checks need a genuine cusp, beta > 1")
    exps = ExponentPair(q=q, p=p)
    k_min = 0 if full_profile else max(0, k_max - FIT_WINDOW)
    if verdict.exists:
        m = make_map(verdict.beta, exps)
        cusp, comp = _profiles(m, exps.q, exps.p, k_max, k_min)
        ok = cusp.converges and comp.converges
        check = EmpiricalCheck(cusp.slope, comp.slope, m.gamma, ok, ok, False)
    else:
        probes = []
        best = None
        for g in probe_gammas(verdict.beta, exps.q, n_probes):
            m = forced_map(float(verdict.beta), g, exps)
            cusp, comp = _profiles(m, exps.q, exps.p, k_max, k_min)
            row = (float(g), cusp.slope, comp.slope, cusp.converges and comp.converges)
            probes.append(row[:3])
            # most favourable probe: the smaller of the two excesses over the threshold
            score = max(_excess(cusp), _excess(comp))
            if best is None or score < best[0] or row[3]:
                best = (score, row)
                if row[3]:
                    break
        g, cs, ps, ok = best[1]
        check = EmpiricalCheck(cs, ps, g, ok, not ok, True, tuple(probes))
    return CriticalityVerdict(**{**verdict.__dict__, "empirical": check})


def _excess(profile):
    if profile.kind == "sup":
        return profile.slope - DELTA_SUP
    return profile.slope + DELTA


def margins(beta, gamma, p, q):
    """Exponent margins ``(2 - q gamma, beta + 1 - p |beta - 1 - gamma|)``.

    Near the tip the cusp-side integrand behaves like ``r**(m_c - 1)``
    and the wedge-side one like ``r**(m_p - 1)``, so the integrals over
    the dyadic annulus ``k`` decay like ``2**(-k m)``.  Infinite
    exponents give margin ``-inf`` unless the distortion is bounded.
    """
    beta, gamma = float(beta), float(gamma)
    dev = abs(beta - 1.0 - gamma)
    if is_inf(as_exponent(q)):
        mc = 0.0 if gamma == 0 else -math.inf
    else:
        mc = 2.0 - float(q) * gamma
    if is_inf(as_exponent(p)):
        mp = 0.0 if dev == 0 else -math.inf
    else:
        mp = beta + 1.0 - float(p) * dev
    return mc, mp
