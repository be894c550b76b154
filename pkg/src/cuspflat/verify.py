"""Verification suites behind ``cuspflat verify``.

Each suite returns an ordered mapping ``name -> {"pass": bool, ...}``
with the measured quantities next to the verdict.  Random samples use
fixed seeds so repeated runs give identical output.
"""

import math

import numpy as np

from .ahlfors import ahlfors_gamma, cusp_alpha
from .boundary import (
    boundary_homeo,
    circle_polygon,
    cusp_polygon,
    douglas_integral,
    log_condition,
    square_polygon,
)
from .exponents import ExponentPair
from .geometry import CuspShape, cusp_boundary
from .mapping import make_map
from .reflection import (
    ReflectionMap,
    admissible_points,
    circle_inversion,
    curve_length_check,
    in_domain,
    inversion_differential,
    isoperimetric_check,
    max_segment_abscissa,
    random_admissible_boxes,
    reflect,
    verify_reflection_inequality,
)

SUITES = ("reflection", "boundary", "ahlfors")


def _entry(ok, **values):
    out = {"pass": bool(ok)}
    for k, v in values.items():
        out[k] = float(v) if isinstance(v, (float, np.floating)) else v
    return out


def reflection_suite(beta=2, p=2, q=2, seed=0):
    rm = ReflectionMap.from_cusp_map(make_map(beta, ExponentPair(q=q, p=p)))
    rng = np.random.default_rng(seed)
    res = {}
    z = admissible_points(rm, 10_000, rng)
    gz = reflect(rm, z)
    err = float(np.abs(reflect(rm, gz) - z).max())
    res["involution"] = _entry(err < 1e-9, max_error=err, points=int(z.size))
    x = np.linspace(0.1, 0.7, 200)
    up, lo = cusp_boundary(rm.base.shape, x)
    pts = np.concatenate([up, lo])
    err = float(np.abs(reflect(rm, pts) - pts).max())
    res["boundary_fixed"] = _entry(err < 1e-9, max_error=err)
    flip = float(np.mean(in_domain(rm, z[:1000]) != in_domain(rm, gz[:1000])))
    res["membership_flip"] = _entry(flip == 1.0, fraction=flip)
    boxes = random_admissible_boxes(rm, 20, rng)
    checks = [verify_reflection_inequality(rm, b, float(p)) for b in boxes]
    worst = max(c.lhs / c.rhs for c in checks)
    res["weighted_gradient_inequality"] = _entry(
        all(c.holds for c in checks), boxes=len(boxes), worst_ratio=worst
    )
    thin = random_admissible_boxes(rm, 1, rng, aspect=100.0)[0]
    c = verify_reflection_inequality(rm, thin, float(p))
    res["thin_box"] = _entry(c.holds, lhs=c.lhs, rhs=c.rhs)
    w = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    d = inversion_differential(w)
    norm2 = np.linalg.norm(d, ord=2, axis=(-2, -1)) ** 2
    jac = np.abs(np.linalg.det(d))
    err = float(np.max(np.abs(norm2 - jac) / jac))
    inv_err = float(np.abs(circle_inversion(circle_inversion(w)) - w).max())
    res["inversion_anticonformal"] = _entry(err < 1e-13, rel_error=err, involution_error=inv_err)
    t_top = max_segment_abscissa(rm.base.beta)
    ts = np.linspace(0.05, 0.95 * t_top, 20)
    lengths = [curve_length_check(rm, t) for t in ts]
    worst = min(lc.length / lc.lower_bound for lc in lengths)
    res["segment_length"] = _entry(all(lc.holds for lc in lengths), radii=len(ts), worst_ratio=worst)
    isos = [isoperimetric_check(rm, t) for t in ts[::4]]
    worst = max(ic.area / ic.bound for ic in isos)
    res["isoperimetric"] = _entry(all(ic.holds for ic in isos), worst_ratio=worst)
    return res


def _stable(fn, ns=(256, 512, 1024), rtol=1e-3):
    vals = [fn(n) for n in ns]
    rel = max(abs(b - a) / abs(b) for a, b in zip(vals[:-1], vals[1:]))
    return bool(rel < rtol and all(math.isfinite(v) for v in vals)), vals, rel


def boundary_suite(curve=None):
    """Stability of the log condition and Douglas integrals under doubling.

    ``curve`` adds a user polyline to the three built-in ones.
    """
    res = {}
    curves = {
        "circle": circle_polygon(256),
        "square": square_polygon(),
        "cusp64": cusp_polygon(2.0, 64),
    }
    if curve is not None:
        curves["input"] = curve
    for name, curve in curves.items():
        h = boundary_homeo(curve)
        ok, vals, rel = _stable(lambda n: log_condition(curve, h, n))
        res[f"log_condition_{name}"] = _entry(ok, value=vals[-1], rel_change=rel)
        ok, vals, rel = _stable(lambda n: douglas_integral(h, n))
        res[f"douglas_{name}"] = _entry(ok, value=vals[-1], rel_change=rel)
    val = douglas_integral(lambda z: z, 256)
    err = abs(val - 4.0 * math.pi**2)
    res["douglas_identity"] = _entry(err < 1e-6, value=val, error=err)
    return res


def ahlfors_suite(beta=2.0):
    res = {}
    est = ahlfors_gamma(circle_polygon(512), 1.0, samples=256)
    res["circle_alpha_1"] = _entry(0.99 <= est.gamma <= 1.0, gamma=est.gamma)
    shape = CuspShape(float(beta))
    est = ahlfors_gamma(shape, 1.0, samples=256)
    target = -(shape.beta - 1.0)
    res["cusp_ratio_growth"] = _entry(
        abs(est.ratio_exponent - target) < 0.05, exponent=est.ratio_exponent, expected=target
    )
    alpha = cusp_alpha(shape.beta)
    coarse = ahlfors_gamma(shape, alpha, samples=128)
    fine = ahlfors_gamma(shape, alpha, samples=256)
    ratio = fine.gamma / coarse.gamma
    res["cusp_alpha_regular"] = _entry(
        math.isfinite(fine.gamma) and ratio < 1.05, gamma=fine.gamma, refinement_ratio=ratio
    )
    return res


def run_suite(name, **kwargs):
    if name == "reflection":
        return reflection_suite(**kwargs)
    if name == "boundary":
        return boundary_suite(**kwargs)
    if name == "ahlfors":
        return ahlfors_suite(**kwargs)
    raise ValueError(f"unknown suite {name!r}")


def passed(results):
    return all(v["pass"] for v in results.values())
