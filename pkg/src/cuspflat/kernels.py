"""Hot numerical kernels of the cusp-flattening construction.

Two kernels dominate the runtime of every energy computation: the
implicit solve ``t^2 + t^(2 beta) = r^2`` and the evaluation of the
distortion field at quadrature nodes.  Each one exists as a vectorised
numpy function and as a numba ``@njit`` loop.  The numba path is taken
when numba imports and the environment variable ``CUSPFLAT_DISABLE_NUMBA``
is unset or ``"0"``; the numpy path is always available and the two are
tested against each other.

Quadrature nodes are given in region coordinates ``(r, s)`` with
``s`` in ``[0, 1]``:

* cusp interior:  ``theta = a + s (2 pi - 2 a)``
* complement:     ``theta = a (2 s - 1)``  (signed angle about the cusp axis)

where ``a = arctan(t^(beta - 1))`` is the half-opening of the removed
wedge at radius ``r``.  Densities include the polar area element and
the ``d theta / d s`` factor, so integrating over the unit square in
``(u, s)`` (with ``r`` affine in ``u``) gives the plane integral.
Densities are returned as ``exp(log density - log_shift)``; callers pass
a per-shell shift when large powers of the distortion would overflow.
"""

import math
import os

import numpy as np

REGION_CUSP = 0
REGION_COMPLEMENT = 1

WEIGHT_PLANE = 0
WEIGHT_SPHERE = 1

_SQRT2 = math.sqrt(2.0)
_STEP_RTOL = 4e-16
_MAX_NEWTON = 200


def _numba_wanted():
    flag = os.environ.get("CUSPFLAT_DISABLE_NUMBA", "0").strip().lower()
    return flag in ("", "0", "false", "no")


try:
    if not _numba_wanted():
        raise ImportError("numba disabled by CUSPFLAT_DISABLE_NUMBA")
    from numba import njit
except ImportError:
    njit = None

NUMBA_ENABLED = njit is not None


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if NUMBA_ENABLED else "numpy"


# --------------------------------------------------------------------------
# numpy path
# --------------------------------------------------------------------------


def solve_t_np(r, beta):
    r = np.asarray(r, dtype=float)
    lo = np.zeros_like(r)
    hi = r.copy()
    t = np.minimum(r, r / _SQRT2 * (1.0 + r))
    e = 2.0 * beta - 1.0
    for _ in range(_MAX_NEWTON):
        tp = t**e
        phi = t * t + tp * t - r * r
        dphi = 2.0 * t + 2.0 * beta * tp
        below = phi < 0.0
        lo = np.where(below, t, lo)
        hi = np.where(below, hi, t)
        t_new = t - phi / dphi
        outside = (t_new < lo) | (t_new > hi)
        t_new = np.where(outside, 0.5 * (lo + hi), t_new)
        done = np.abs(t_new - t) <= _STEP_RTOL * t_new
        t = t_new
        if done.all():
            break
    return t


def wedge_angle_np(r, beta):
    """Return ``(t, a, da/dr)`` for radii ``r``."""
    t = solve_t_np(r, beta)
    tb = t ** (beta - 1.0)
    a = np.arctan(tb)
    dtdr = r / (t + beta * t ** (2.0 * beta - 1.0))
    dadr = (beta - 1.0) * t ** (beta - 2.0) / (1.0 + tb * tb) * dtdr
    return t, a, dadr


def polar_entries_np(r, theta_rel, interior, a, dadr, gamma):
    """Polar differential entries divided by the image radius.

    ``theta_rel`` is the angle in ``[a, 2 pi - a]`` for interior points
    and the signed angle in ``(-a, a)`` for complement points.
    """
    if gamma > 0.0:
        m11 = gamma * r ** (-gamma - 1.0)
    else:
        m11 = 1.0 / r
    pa = np.pi - a
    d_theta_in = 3.0 * np.pi / (4.0 * pa)
    d_a_in = 3.0 * np.pi * (theta_rel - np.pi) / (4.0 * pa * pa)
    safe_a = np.where(interior, 1.0, a)
    d_theta_out = np.pi / (4.0 * safe_a)
    d_a_out = -np.pi * theta_rel / (4.0 * safe_a * safe_a)
    d_theta = np.where(interior, d_theta_in, d_theta_out)
    d_a = np.where(interior, d_a_in, d_a_out)
    m21 = d_a * dadr
    m22 = d_theta / r
    return np.broadcast_to(m11, np.shape(m22)), m21, m22


def distortion_from_entries_np(m11, m21, m22):
    scale = np.maximum(np.maximum(np.abs(m11), np.abs(m21)), np.abs(m22))
    x = m11 / scale
    y = m21 / scale
    z = m22 / scale
    det = np.abs(x * z)
    # largest singular value from sums of squares, exact near K = 1
    sigma = 0.5 * (np.hypot(np.abs(x) + np.abs(z), y) + np.hypot(np.abs(x) - np.abs(z), y))
    return sigma * sigma / det


def _region_nodes_np(r, s, beta, region):
    t, a, dadr = wedge_angle_np(r, beta)
    if region == REGION_CUSP:
        theta = a + s * (2.0 * np.pi - 2.0 * a)
        dtheta_ds = 2.0 * np.pi - 2.0 * a
        interior = np.ones(np.shape(theta), dtype=bool)
    else:
        theta = a * (2.0 * s - 1.0)
        dtheta_ds = 2.0 * a
        interior = np.zeros(np.shape(theta), dtype=bool)
    return theta, dtheta_ds, interior, a, dadr


def region_distortion_np(r, s, beta, gamma, region):
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    theta, _, interior, a, dadr = _region_nodes_np(r, s, beta, region)
    m11, m21, m22 = polar_entries_np(r, theta, interior, a, dadr, gamma)
    return distortion_from_entries_np(m11, m21, m22)


def region_density_np(r, s, beta, gamma, region, exponent, weight, log_shift=0.0):
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    theta, dtheta_ds, interior, a, dadr = _region_nodes_np(r, s, beta, region)
    m11, m21, m22 = polar_entries_np(r, theta, interior, a, dadr, gamma)
    k = distortion_from_entries_np(m11, m21, m22)
    log_d = exponent * np.log(k) + np.log(r * dtheta_ds)
    if weight == WEIGHT_SPHERE:
        log_d += np.log(4.0) - 2.0 * np.log1p(r * r)
    return np.exp(log_d - log_shift)


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------

if NUMBA_ENABLED:

    @njit(cache=True)
    def _solve_t_scalar(r, beta):
        lo = 0.0
        hi = r
        t = min(r, r / _SQRT2 * (1.0 + r))
        e = 2.0 * beta - 1.0
        for _ in range(_MAX_NEWTON):
            tp = t**e
            phi = t * t + tp * t - r * r
            dphi = 2.0 * t + 2.0 * beta * tp
            if phi < 0.0:
                lo = t
            else:
                hi = t
            t_new = t - phi / dphi
            if t_new < lo or t_new > hi:
                t_new = 0.5 * (lo + hi)
            if abs(t_new - t) <= _STEP_RTOL * t_new:
                return t_new
            t = t_new
        return t

    @njit(cache=True)
    def _log_density_scalar(r, s, beta, gamma, region, exponent, weight):
        t = _solve_t_scalar(r, beta)
        tb = t ** (beta - 1.0)
        a = math.atan(tb)
        dtdr = r / (t + beta * t ** (2.0 * beta - 1.0))
        dadr = (beta - 1.0) * t ** (beta - 2.0) / (1.0 + tb * tb) * dtdr
        if region == REGION_CUSP:
            theta = a + s * (2.0 * math.pi - 2.0 * a)
            dtheta_ds = 2.0 * math.pi - 2.0 * a
            pa = math.pi - a
            d_theta = 3.0 * math.pi / (4.0 * pa)
            d_a = 3.0 * math.pi * (theta - math.pi) / (4.0 * pa * pa)
        else:
            theta = a * (2.0 * s - 1.0)
            dtheta_ds = 2.0 * a
            d_theta = math.pi / (4.0 * a)
            d_a = -math.pi * theta / (4.0 * a * a)
        if gamma > 0.0:
            m11 = gamma * r ** (-gamma - 1.0)
        else:
            m11 = 1.0 / r
        m21 = d_a * dadr
        m22 = d_theta / r
        scale = max(abs(m11), abs(m21), abs(m22))
        x = m11 / scale
        y = m21 / scale
        z = m22 / scale
        det = abs(x * z)
        sigma = 0.5 * (math.hypot(abs(x) + abs(z), y) + math.hypot(abs(x) - abs(z), y))
        k = sigma * sigma / det
        log_d = exponent * math.log(k) + math.log(r * dtheta_ds)
        if weight == WEIGHT_SPHERE:
            log_d += math.log(4.0) - 2.0 * math.log1p(r * r)
        return log_d, k

    @njit(cache=True)
    def _density_loop(r, s, beta, gamma, region, exponent, weight, log_shift, out):
        for i in range(r.size):
            log_d, _ = _log_density_scalar(
                r[i], s[i], beta, gamma, region, exponent, weight
            )
            out[i] = math.exp(log_d - log_shift)

    @njit(cache=True)
    def _distortion_loop(r, s, beta, gamma, region, out):
        for i in range(r.size):
            _, k = _log_density_scalar(r[i], s[i], beta, gamma, region, 0.0, 0)
            out[i] = k

    @njit(cache=True)
    def _solve_t_loop(r, beta, out):
        for i in range(r.size):
            out[i] = _solve_t_scalar(r[i], beta)


def solve_t_nb(r, beta):
    shape = np.shape(r)
    r = np.ascontiguousarray(r, dtype=float).ravel()
    out = np.empty_like(r)
    _solve_t_loop(r, float(beta), out)
    return out.reshape(shape)


def region_density_nb(r, s, beta, gamma, region, exponent, weight, log_shift=0.0):
    r, s = np.broadcast_arrays(np.asarray(r, float), np.asarray(s, float))
    r = np.ascontiguousarray(r)
    s = np.ascontiguousarray(s)
    out = np.empty(r.shape)
    _density_loop(
        r.ravel(), s.ravel(), float(beta), float(gamma), int(region),
        float(exponent), int(weight), float(log_shift), out.ravel(),
    )
    return out


def region_distortion_nb(r, s, beta, gamma, region):
    r, s = np.broadcast_arrays(np.asarray(r, float), np.asarray(s, float))
    r = np.ascontiguousarray(r)
    s = np.ascontiguousarray(s)
    out = np.empty(r.shape)
    _distortion_loop(
        r.ravel(), s.ravel(), float(beta), float(gamma), int(region), out.ravel()
    )
    return out


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

if NUMBA_ENABLED:
    solve_t_kernel = solve_t_nb
    region_density = region_density_nb
    region_distortion = region_distortion_nb
else:
    solve_t_kernel = solve_t_np
    region_density = region_density_np
    region_distortion = region_distortion_np
