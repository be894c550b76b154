"""Adaptive quadrature of distortion powers near the cusp tip.

Integrals over the unit disk are split into dyadic shells
``2**-(k+1) <= r <= 2**-k``.  Inside a shell the integrand is smooth in
the region coordinates ``(u, s)`` of :mod:`cuspflat.kernels` because the
wedge seams ``theta = +-a(r)`` are cell edges by construction.  Every
cell carries a 5x5 Gauss-Legendre value, compared against the sum over
its 2x2 subdivision; the difference is the error estimate and the finer
value is kept.  Refinement is global: each sweep splits every cell
whose error is above the mean share, all of them in one vectorised
kernel call.

What lies inside the innermost shell is extrapolated from the ratio of
the last two shell integrals.  The same shells, integrated to tight
relative accuracy, give the annulus profile whose log-slope decides
integrability.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .exceptions import DomainError
from .mapping import CuspMap

DELTA = 0.1 * math.log(2.0)
# sup profiles grow like r**-c with c = 0 exactly when bounded
DELTA_SUP = 0.01 * math.log(2.0)
FIT_WINDOW = 8
MAX_DEPTH = 40

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(5)
_NODES = 0.5 * (_NODES + 1.0)
_WEIGHTS = 0.5 * _WEIGHTS


class Region(str, Enum):
    CUSP_INTERIOR = "cusp_interior"
    COMPLEMENT = "complement_in_disk"


_REGION_CODE = {
    Region.CUSP_INTERIOR: kernels.REGION_CUSP,
    Region.COMPLEMENT: kernels.REGION_COMPLEMENT,
}


@dataclass(frozen=True)
class QuadratureResult:
    """Integral value with its error estimate.

    ``tail`` is the part of the integral not covered by quadrature
    cells.  For distortion integrals it is the extrapolated inner tail
    and is already included in ``value``; for the spherical energy it
    is the bound for ``|z| > R`` and is reported separately.
    """

    value: float
    abs_error_estimate: float
    cells: int
    converged: bool
    tail: float = 0.0


@dataclass(frozen=True)
class AnnulusProfile:
    radii: np.ndarray
    partials: np.ndarray
    log_partials: np.ndarray
    slope: float
    converges: bool
    exponent: float = 1.0
    kind: str = "integral"
    cells: int = 0
    errors: np.ndarray = field(default=None, repr=False)


@dataclass(frozen=True)
class _Shell:
    value: float
    error: float
    cells: int
    converged: bool
    log_shift: float = 0.0


# --------------------------------------------------------------------------
# cell engine
# --------------------------------------------------------------------------


def _cell_values(density, u0, u1, s0, s1):
    du = u1 - u0
    ds = s1 - s0
    u = u0[:, None, None] + du[:, None, None] * _NODES[None, :, None]
    s = s0[:, None, None] + ds[:, None, None] * _NODES[None, None, :]
    u, s = np.broadcast_arrays(u, s)
    vals = density(u, s)
    return du * ds * np.einsum("nij,i,j->n", vals, _WEIGHTS, _WEIGHTS)


def _subdivide(density, u0, u1, s0, s1):
    """Children boxes and their 5x5 values, four per input cell."""
    um = 0.5 * (u0 + u1)
    sm = 0.5 * (s0 + s1)
    cu0 = np.stack([u0, u0, um, um], axis=1).ravel()
    cu1 = np.stack([um, um, u1, u1], axis=1).ravel()
    cs0 = np.stack([s0, sm, s0, sm], axis=1).ravel()
    cs1 = np.stack([sm, s1, sm, s1], axis=1).ravel()
    child = _cell_values(density, cu0, cu1, cs0, cs1)
    return cu0, cu1, cs0, cs1, child


def adaptive_square(density, atol, rtol, n_u=1, n_s=1, max_depth=MAX_DEPTH,
                    max_leaves=200_000):
    """Integrate ``density(u, s)`` over the unit square.

    Global adaptive scheme: while the summed error estimate exceeds
    ``max(atol, rtol |value|)``, every leaf whose error is above the mean
    share is split in four.  Point singularities (kinks of the
    distortion where the differential is conformal) are therefore
    refined only as far as the global budget needs.
    Returns ``(value, error, cells, converged)``.
    """
    gu = np.linspace(0.0, 1.0, n_u + 1)
    gs = np.linspace(0.0, 1.0, n_s + 1)
    u0, s0 = (x.ravel() for x in np.meshgrid(gu[:-1], gs[:-1], indexing="ij"))
    u1, s1 = (x.ravel() for x in np.meshgrid(gu[1:], gs[1:], indexing="ij"))
    coarse = _cell_values(density, u0, u1, s0, s1)
    depth = np.zeros(u0.size, dtype=int)
    cu0, cu1, cs0, cs1, child = _subdivide(density, u0, u1, s0, s1)
    fine = child.reshape(-1, 4).sum(axis=1)
    err = np.abs(fine - coarse)
    while True:
        value = math.fsum(fine)
        total = math.fsum(err)
        if not (math.isfinite(value) and math.isfinite(total)):
            return value, math.inf, fine.size, False
        target = max(atol, rtol * abs(value))
        if total <= target:
            return value, total, fine.size, True
        pick = err > min(target, total) / err.size
        if np.any(pick & (depth >= max_depth)) or fine.size + 3 * pick.sum() > max_leaves:
            return value, total, fine.size, False
        # children of picked leaves become leaves; their values are known
        idx = np.flatnonzero(pick)
        sel = (idx[:, None] * 4 + np.arange(4)).ravel()
        nu0, nu1, ns0, ns1, ncoarse = cu0[sel], cu1[sel], cs0[sel], cs1[sel], child[sel]
        ndepth = np.repeat(depth[idx] + 1, 4)
        gu0, gu1, gs0, gs1, gchild = _subdivide(density, nu0, nu1, ns0, ns1)
        nfine = gchild.reshape(-1, 4).sum(axis=1)
        keep = ~pick
        kidx = np.flatnonzero(keep)
        ksel = (kidx[:, None] * 4 + np.arange(4)).ravel()
        cu0 = np.concatenate([cu0[ksel], gu0])
        cu1 = np.concatenate([cu1[ksel], gu1])
        cs0 = np.concatenate([cs0[ksel], gs0])
        cs1 = np.concatenate([cs1[ksel], gs1])
        child = np.concatenate([child[ksel], gchild])
        fine = np.concatenate([fine[keep], nfine])
        err = np.concatenate([err[keep], np.abs(nfine - ncoarse)])
        depth = np.concatenate([depth[keep], ndepth])


# --------------------------------------------------------------------------
# shells
# --------------------------------------------------------------------------


def _dyadic_edges(r_min, r_max, k_max, k_min=0):
    """Shell edges from ``r_max`` halving inward; ``r_min == 0`` gives shells ``k_min..k_max-1``."""
    edges = [math.ldexp(r_max, -k_min)]
    if r_min > 0:
        while edges[-1] / 2.0 > r_min:
            edges.append(edges[-1] / 2.0)
        edges.append(r_min)
    else:
        for _ in range(k_max - k_min):
            edges.append(edges[-1] / 2.0)
    return edges


def _exp(x):
    return math.exp(x) if x < 709.0 else math.inf


def _geometric_tail(log_partials):
    """Sum of the geometric continuation after the last shell, with an error estimate."""
    if len(log_partials) < 3:
        return math.inf, math.inf
    l2, l1, l0 = log_partials[-3], log_partials[-2], log_partials[-1]
    if not (np.isfinite(l0) and np.isfinite(l1)):
        return math.inf, math.inf
    rho = _exp(l0 - l1)
    if rho >= 1.0:
        return math.inf, math.inf
    tail = _exp(l0) * rho / (1.0 - rho)
    if np.isfinite(l2):
        rho2 = min(_exp(l1 - l2), 1.0 - 1e-12)
        tail2 = _exp(l0) * rho2 / (1.0 - rho2)
        return tail, abs(tail - tail2)
    return tail, tail


def _sum_shells(shells, extrapolate):
    logs = [_log_value(sh) for sh in shells]
    parts = [_exp(sh.log_shift) * sh.value for sh in shells]
    errs = [_exp(sh.log_shift) * sh.error for sh in shells]
    total = math.fsum(parts)
    err = math.fsum(errs)
    conv = all(sh.converged for sh in shells)
    tail = 0.0
    if extrapolate:
        tail, tail_err = _geometric_tail(logs)
        if not math.isfinite(tail):
            return math.inf, math.inf, tail, False
        total += tail
        err += tail_err
    return total, err, tail, conv and math.isfinite(total)


def _log_value(sh):
    if sh.value > 0:
        return sh.log_shift + math.log(sh.value)
    return -math.inf


def _fit_slope(log_partials, window=FIT_WINDOW):
    y = np.asarray(log_partials[-window:], dtype=float)
    if y.size < 2 or not np.all(np.isfinite(y)):
        return math.nan
    k = np.arange(y.size, dtype=float)
    return float(np.polyfit(k, y, 1)[0])


# --------------------------------------------------------------------------
# generic sectors
# --------------------------------------------------------------------------


def _sector_shell(func, theta_lo, theta_hi, r_lo, r_hi, atol, rtol, n_s):
    width = theta_hi - theta_lo
    h = r_hi - r_lo

    def density(u, s):
        r = r_lo + h * u
        return func(r, theta_lo + width * s) * r * (width * h)

    return _Shell(*adaptive_square(density, atol, rtol, n_s=n_s))


def _check_tol(tol):
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")


def integrate_sector(func, theta_lo, theta_hi, r_min=0.0, r_max=1.0, tol=1e-9, k_max=40):
    """Integrate ``func(r, theta) r dr dtheta`` over a polar sector.

    ``func`` is vectorised.  With ``r_min == 0`` the shells stop at
    ``2**-k_max * r_max`` and the rest is extrapolated geometrically.
    ``converged`` means the error estimate is below
    ``tol * max(1, |value|)``.
    """
    _check_tol(tol)
    if not (0 <= r_min < r_max):
        raise DomainError("need 0 <= r_min < r_max")
    edges = _dyadic_edges(r_min, r_max, k_max)
    n_s = max(1, int(math.ceil(abs(theta_hi - theta_lo) / (math.pi / 2))))
    shells = [
        _sector_shell(func, theta_lo, theta_hi, lo, hi, 0.1 * tol, 0.1 * tol, n_s)
        for hi, lo in zip(edges[:-1], edges[1:])
    ]
    value, err, tail, conv = _sum_shells(shells, extrapolate=(r_min == 0))
    conv = conv and err <= tol * max(1.0, abs(value))
    return QuadratureResult(value, err, sum(sh.cells for sh in shells), conv, tail)


def sector_profile(func, theta_lo, theta_hi, k_max=40, rtol=1e-9):
    """Annulus profile of ``func(r, theta) r dr dtheta`` over a fixed sector."""
    if k_max < 10:
        raise DomainError("k_max must be at least 10")
    edges = _dyadic_edges(0.0, 1.0, k_max)
    n_s = max(1, int(math.ceil(abs(theta_hi - theta_lo) / (math.pi / 2))))
    shells = [
        _sector_shell(func, theta_lo, theta_hi, lo, hi, 1e-300, rtol, n_s)
        for hi, lo in zip(edges[:-1], edges[1:])
    ]
    return _profile(shells, edges, 1.0)


# --------------------------------------------------------------------------
# distortion integrals
# --------------------------------------------------------------------------


def _shift_for(m, region, exponent, r):
    code = _REGION_CODE[region]
    k = kernels.region_distortion(np.array([r]), np.array([0.5]), m.beta, m.gamma, code)
    return float(exponent * math.log(k[0]))


def _map_shell(m, region, exponent, weight, r_lo, r_hi, atol, rtol, n_s):
    code = _REGION_CODE[Region(region)]
    h = r_hi - r_lo
    shift = _shift_for(m, Region(region), exponent, math.sqrt(r_lo * r_hi))

    def density(u, s):
        r = r_lo + h * u
        d = kernels.region_density(
            r, s, m.beta, m.gamma, code, exponent, weight, shift
        )
        return d * h

    scale = math.exp(-shift) if shift < 700 else 0.0
    return _Shell(*adaptive_square(density, atol * scale, rtol, n_s=n_s), log_shift=shift)


def _map_shells(m, region, exponent, weight, k_max, atol, rtol, k_min=0):
    region = Region(region)
    n_s = 4 if region is Region.CUSP_INTERIOR else 2
    edges = _dyadic_edges(0.0, 1.0, k_max, k_min)
    shells = [
        _map_shell(m, region, exponent, weight, lo, hi, atol, rtol, n_s)
        for hi, lo in zip(edges[:-1], edges[1:])
    ]
    return shells, edges


def _sup_shells(m, region, k_max, k_min=0, n_r=9, n_s=33):
    code = _REGION_CODE[Region(region)]
    edges = _dyadic_edges(0.0, 1.0, k_max, k_min)
    sups = []
    s = np.linspace(0.0, 1.0, n_s)
    for hi, lo in zip(edges[:-1], edges[1:]):
        r = np.linspace(lo, hi, n_r)
        rr, ss = np.meshgrid(r, s, indexing="ij")
        k = kernels.region_distortion(rr, ss, m.beta, m.gamma, code)
        sups.append(float(k.max()))
    return np.array(sups), edges


def integrate_distortion(m, region, exponent, tol=1e-9, k_max=40):
    """Integral of ``K_f**exponent`` over one region of the unit disk.

    ``region`` is ``"cusp_interior"`` (the cusp domain inside the disk)
    or ``"complement_in_disk"`` (the removed wedge).  For an infinite
    exponent the sampled supremum of ``K_f`` is returned instead, with
    ``converged`` meaning that the supremum profile stays bounded.
    """
    if not isinstance(m, CuspMap):
        raise TypeError("integrate_distortion needs a CuspMap")
    _check_tol(tol)
    if math.isinf(exponent):
        sups, _ = _sup_shells(m, region, k_max)
        slope = _fit_slope(np.log(sups))
        return QuadratureResult(float(sups.max()), 0.0, sups.size, bool(slope <= DELTA_SUP))
    if exponent < 0:
        raise DomainError("exponent must be non-negative")
    shells, _ = _map_shells(
        m, region, float(exponent), kernels.WEIGHT_PLANE, k_max, 0.1 * tol, 0.1 * tol
    )
    value, err, tail, conv = _sum_shells(shells, extrapolate=True)
    conv = conv and err <= tol * max(1.0, abs(value))
    return QuadratureResult(value, err, sum(sh.cells for sh in shells), conv, tail)


def _profile(shells, edges, exponent):
    logs = np.array([_log_value(sh) for sh in shells])
    with np.errstate(over="ignore"):
        partials = np.exp(logs)
        errors = np.array([sh.error for sh in shells]) * np.exp(
            np.array([sh.log_shift for sh in shells])
        )
    slope = _fit_slope(logs)
    return AnnulusProfile(
        radii=np.array(edges[:-1]),
        partials=partials,
        log_partials=logs,
        slope=slope,
        converges=bool(slope < -DELTA),
        exponent=exponent,
        cells=sum(sh.cells for sh in shells),
        errors=errors,
    )


def annulus_profile(m, region, exponent, k_max=40, rtol=1e-9, k_min=0):
    """Per-annulus integrals ``I_k`` of ``K_f**exponent`` and their log-slope.

    ``slope`` is the least-squares slope of ``log I_k`` against ``k``
    over the last eight annuli.  The integral converges when
    ``slope < -0.1 ln 2``.  For an infinite exponent ``I_k`` is the
    sampled supremum of ``K_f`` on the annulus and ``converges`` means
    bounded, i.e. ``slope <= 0.01 ln 2``.  Annuli before ``k_min`` are
    skipped, which is enough when only the slope is wanted.
    """
    if k_max < 10:
        raise DomainError("k_max must be at least 10")
    if not 0 <= k_min <= k_max - 2:
        raise DomainError("need 0 <= k_min <= k_max - 2")
    if math.isinf(exponent):
        sups, edges = _sup_shells(m, region, k_max, k_min)
        logs = np.log(sups)
        slope = _fit_slope(logs)
        return AnnulusProfile(
            radii=np.array(edges[:-1]),
            partials=sups,
            log_partials=logs,
            slope=slope,
            converges=bool(slope <= DELTA_SUP),
            exponent=math.inf,
            kind="sup",
            cells=sups.size,
            errors=np.zeros_like(sups),
        )
    shells, edges = _map_shells(
        m, region, float(exponent), kernels.WEIGHT_PLANE, k_max, 1e-300, rtol, k_min
    )
    return _profile(shells, edges, float(exponent))


# --------------------------------------------------------------------------
# spherical energy
# --------------------------------------------------------------------------


def _sphere_weight(r, theta):
    return 4.0 / (1.0 + r * r) ** 2


def spherical_energy(m, p, R=100.0, tol=1e-9, k_max=40):
    """Spherical ``L^p`` energy ``4 int_{|z|<R} K_f**p / (1 + |z|**2)**2``.

    ``m=None`` stands for the identity map.  Outside the unit disk the
    map is the identity, so ``K_f = 1`` there and the part ``|z| > R``
    is exactly ``4 pi / (1 + R**2)``, returned as ``tail``.
    """
    _check_tol(tol)
    if not R > 1:
        raise DomainError(f"truncation radius must exceed 1, got {R}")
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    parts = []
    if m is None:
        parts.append(integrate_sector(_sphere_weight, 0.0, 2 * math.pi, 0.0, 1.0, tol, k_max))
    else:
        for region in Region:
            shells, _ = _map_shells(
                m, region, float(p), kernels.WEIGHT_SPHERE, k_max, 0.05 * tol, 0.05 * tol
            )
            value, err, tail, conv = _sum_shells(shells, extrapolate=True)
            cells = sum(sh.cells for sh in shells)
            parts.append(QuadratureResult(value, err, cells, conv, tail))
    parts.append(integrate_sector(_sphere_weight, 0.0, 2 * math.pi, 1.0, float(R), tol))
    value = math.fsum(q.value for q in parts)
    err = math.fsum(q.abs_error_estimate for q in parts)
    conv = all(q.converged for q in parts) and err <= tol * max(1.0, abs(value))
    tail = 4.0 * math.pi / (1.0 + R * R)
    return QuadratureResult(value, err, sum(q.cells for q in parts), conv, tail)
