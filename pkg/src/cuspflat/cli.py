"""Command line front end: critical powers, energies, sweeps, grid pictures and checks.

Exit codes: 0 success, 1 a verification failed, 2 invalid configuration.
Exponents accept ``inf`` and exact ratios such as ``3/2``.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boundary import read_curve_csv
from .criticality import classify, empirical_verdict
from .exceptions import CuspflatError
from .exponents import ExponentPair, as_exponent, beta_critical, critical_branch, format_exponent, is_inf
from .geometry import cusp_boundary, solve_t
from .mapping import forward, make_map
from .quadrature import Region, integrate_distortion, spherical_energy
from .verify import SUITES, passed, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

# outermost drawn radius; r * exp(i theta) rounds past |z| = 1 at nextafter(1, 0)
R_EDGE = 1.0 - 1e-9

SWEEP_HEADER = ["beta", "classification", "cusp_slope", "complement_slope"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    beta: object = None
    p: object = None
    q: object = None
    tolerance: float = 1e-9
    k_max: int = 40
    output_path: str = None
    format: str = "json"


def _exponent(text):
    try:
        return as_exponent(text)
    except CuspflatError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def parse_beta_grid(text):
    """``start:stop:step`` (stop included) or a comma list, parsed exactly."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("beta grid must be start:stop:step")
        start, stop, step = (Fraction(x) for x in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError("beta grid needs step > 0 and stop >= start")
        n = int((stop - start) / step)
        return [start + i * step for i in range(n + 1)]
    return [Fraction(x) for x in text.split(",") if x.strip()]


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_exponent(x) if x.denominator != 1 else int(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _emit(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x):
    return "inf" if is_inf(x) else f"{float(x):.12g}"


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_betacr(cfg):
    bcr = beta_critical(cfg.p, cfg.q)
    _emit(f"{format_exponent(bcr)}\nbranch: {critical_branch(cfg.p, cfg.q)}\n", cfg.output_path)
    return EXIT_OK


def _integral_entry(res):
    return {
        "value": res.value if math.isfinite(res.value) else "inf",
        "abs_error_estimate": res.abs_error_estimate if math.isfinite(res.abs_error_estimate) else "inf",
        "converged": res.converged,
    }


def cmd_energy(cfg, identity=False, radius=100.0):
    out = {}
    if identity:
        res = spherical_energy(None, 1.0, radius, cfg.tolerance)
        out["map"] = "identity"
        out["spherical_energy"] = {
            **_integral_entry(res),
            "tail": res.tail,
            "total": res.value + res.tail,
            "reference": 4.0 * math.pi,
        }
        _emit(json.dumps(out, indent=2) + "\n", cfg.output_path)
        return EXIT_OK
    exps = ExponentPair(q=cfg.q, p=cfg.p)
    m = make_map(cfg.beta, exps)
    out["beta"] = _jsonable(cfg.beta)
    out["p"] = _jsonable(exps.p)
    out["q"] = _jsonable(exps.q)
    out["gamma"] = m.gamma
    for key, region, exp in (
        ("cusp_integral", Region.CUSP_INTERIOR, exps.q),
        ("complement_integral", Region.COMPLEMENT, exps.p),
    ):
        res = integrate_distortion(m, region, float(exp), cfg.tolerance, cfg.k_max)
        entry = _integral_entry(res)
        entry["exponent"] = _jsonable(exp)
        if is_inf(exp):
            entry["kind"] = "sup"
        out[key] = entry
    if is_inf(exps.p):
        out["spherical_energy"] = None
    else:
        res = spherical_energy(m, float(exps.p), radius, cfg.tolerance, cfg.k_max)
        out["spherical_energy"] = {**_integral_entry(res), "tail": res.tail, "exponent": _jsonable(exps.p)}
    _emit(json.dumps(out, indent=2) + "\n", cfg.output_path)
    return EXIT_OK


def cmd_sweep(cfg, betas, probes=32):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for b in betas:
        v = empirical_verdict(b, cfg.p, cfg.q, k_max=cfg.k_max, n_probes=probes)
        e = v.empirical
        writer.writerow([_fmt(b), v.classification, _fmt(e.cusp_slope), _fmt(e.complement_slope)])
    _emit(buf.getvalue(), cfg.output_path)
    return EXIT_OK


def _path(points):
    pts = " L ".join(f"{z.real:.10f} {z.imag:.10f}" for z in points)
    return "M " + pts


def grid_svg(m, resolution, samples=256):
    """SVG 1.1 picture of the image of a polar grid of the unit disk.

    ``resolution`` circles ``r = i / resolution`` and ``resolution`` rays
    ``theta = 2 pi j / resolution``, each drawn as one path of ``samples``
    image points; the images of the two cusp arcs are drawn on top.
    """
    lines = []
    theta = np.linspace(0.0, 2.0 * math.pi, samples)
    for i in range(1, resolution + 1):
        r = i / resolution
        if i == resolution:
            r = R_EDGE
        lines.append(forward(m, r * np.exp(1j * theta)))
    radii = np.linspace(0.0, 1.0, samples + 1)[1:]
    radii[-1] = R_EDGE
    for j in range(resolution):
        ang = 2.0 * math.pi * j / resolution
        lines.append(np.concatenate([[0j], forward(m, radii * np.exp(1j * ang))]))
    x_top = _cusp_x_max(m.beta)
    x = np.linspace(0.0, x_top, samples + 1)[1:]
    up, lo = cusp_boundary(m.shape, x)
    cusp = [np.concatenate([[0j], forward(m, up)]), np.concatenate([[0j], forward(m, lo)])]
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'width="800" height="800" viewBox="-1.05 -1.05 2.1 2.1">',
        '<g transform="scale(1,-1)" fill="none" stroke-linejoin="round">',
    ]
    for pts in lines:
        out.append(f'<path class="grid" stroke="#3b6ea5" stroke-width="0.002" d="{_path(pts)}"/>')
    for pts in cusp:
        out.append(f'<path class="cusp" stroke="#c0392b" stroke-width="0.006" d="{_path(pts)}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _cusp_x_max(beta):
    """Abscissa where the cusp arc leaves the unit disk."""
    return float(solve_t(R_EDGE, beta))


def cmd_grid(cfg, resolution):
    m = make_map(cfg.beta, ExponentPair(q=cfg.q, p=cfg.p))
    _emit(grid_svg(m, resolution), cfg.output_path)
    return EXIT_OK


def cmd_verify(cfg, suite, curve_path=None):
    names = SUITES if suite == "all" else (suite,)
    extra = {}
    if curve_path:
        extra["boundary"] = {"curve": read_curve_csv(curve_path)}
    out = {}
    ok = True
    for name in names:
        res = run_suite(name, **extra.get(name, {}))
        out[name] = {"passed": passed(res), "checks": res}
        ok &= passed(res)
    out["passed"] = bool(ok)
    _emit(json.dumps(out, indent=2) + "\n", cfg.output_path)
    return EXIT_OK if ok else EXIT_FAILED


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="cuspflat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def exps(p, beta=False, defaults=False):
        if beta:
            p.add_argument("--beta", type=_exponent, required=not defaults,
                           default=Fraction(2) if defaults else None)
        p.add_argument("--p", type=_exponent, required=not defaults,
                       default=Fraction(2) if defaults else None)
        p.add_argument("--q", type=_exponent, required=not defaults,
                       default=Fraction(2) if defaults else None)
        p.add_argument("--output", "-o", default=None, help="write here instead of stdout")

    p = sub.add_parser("betacr", help="critical cusp power for (p, q)")
    exps(p)

    p = sub.add_parser("energy", help="distortion integrals and spherical energy")
    exps(p, beta=True, defaults=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--k-max", type=int, default=40)
    p.add_argument("--radius", type=float, default=100.0, help="truncation radius R")
    p.add_argument("--identity", action="store_true", help="use the identity map")

    p = sub.add_parser("sweep", help="classification and annulus slopes over a beta grid")
    exps(p)
    p.add_argument("--betas", type=parse_beta_grid, default=parse_beta_grid("4.0:6.0:0.5"),
                   help="start:stop:step or a comma list")
    p.add_argument("--k-max", type=int, default=40)
    p.add_argument("--probes", type=int, default=32)

    p = sub.add_parser("grid", help="SVG of the image of a polar grid")
    exps(p, beta=True)
    p.add_argument("--resolution", type=int, default=32)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--curve", default=None, help='polyline CSV "x,y" added to the boundary suite')
    p.add_argument("--output", "-o", default=None)
    return parser


def _validate(args):
    cfg = RunConfig(
        command=args.command,
        beta=getattr(args, "beta", None),
        p=getattr(args, "p", None),
        q=getattr(args, "q", None),
        tolerance=getattr(args, "tol", 1e-9),
        k_max=getattr(args, "k_max", 40),
        output_path=args.output,
        format={"sweep": "csv", "grid": "svg"}.get(args.command, "json"),
    )
    if cfg.p is not None:
        ExponentPair(q=cfg.q, p=cfg.p)
    if not cfg.tolerance > 0:
        raise CuspflatError("tolerance must be positive")
    if cfg.k_max < 10:
        raise CuspflatError("k_max must be at least 10")
    if getattr(args, "resolution", 1) < 1:
        raise CuspflatError("resolution must be positive")
    if args.command == "sweep":
        for b in args.betas:
            classify(b, cfg.p, cfg.q)
    return cfg


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = _validate(args)
        if cfg.command == "betacr":
            return cmd_betacr(cfg)
        if cfg.command == "energy":
            return cmd_energy(cfg, identity=args.identity, radius=args.radius)
        if cfg.command == "sweep":
            return cmd_sweep(cfg, args.betas, args.probes)
        if cfg.command == "grid":
            return cmd_grid(cfg, args.resolution)
        return cmd_verify(cfg, args.suite, args.curve)
    except CuspflatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
