"""Compare the numba and numpy kernel backends.

Two measurements:

* kernel throughput: ``region_density`` on a block of quadrature nodes,
  both backends called directly in this process;
* end to end: ``integrate_distortion`` at (beta, p, q) = (2, 2, 2) in a
  fresh interpreter per backend, selected with ``CUSPFLAT_DISABLE_NUMBA``.

Run with ``python3 benchmarks/bench_kernels.py [--nodes N] [--repeat R]``.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from cuspflat import kernels

END_TO_END = """
import json, time
from cuspflat import kernels
from cuspflat.exponents import ExponentPair
from cuspflat.mapping import make_map
from cuspflat.quadrature import Region, integrate_distortion
m = make_map(2, ExponentPair(q=2, p=2))
integrate_distortion(m, Region.CUSP_INTERIOR, 2.0, 1e-6)  # warm up / jit
t0 = time.perf_counter()
a = integrate_distortion(m, Region.CUSP_INTERIOR, 2.0, 1e-9)
b = integrate_distortion(m, Region.COMPLEMENT, 2.0, 1e-9)
dt = time.perf_counter() - t0
print(json.dumps({"backend": kernels.backend(), "seconds": dt,
                  "cusp": a.value, "complement": b.value}))
"""


def kernel_timing(nodes, repeat):
    rng = np.random.default_rng(1)
    r = rng.uniform(1e-6, 1.0, nodes)
    s = rng.uniform(0.0, 1.0, nodes)
    args = (r, s, 2.0, 0.5, kernels.REGION_CUSP, 2.0, kernels.WEIGHT_PLANE)
    out = {}
    fns = {"numpy": kernels.region_density_np}
    if kernels.NUMBA_ENABLED:
        fns["numba"] = kernels.region_density_nb
        kernels.region_density_nb(*args)
    for name, fn in fns.items():
        t = min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))
        out[name] = t
    if "numba" in fns:
        diff = np.max(np.abs(fns["numba"](*args) / fns["numpy"](*args) - 1.0))
        out["max_rel_diff"] = float(diff)
    return out


def end_to_end(disable):
    env = dict(os.environ, CUSPFLAT_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run([sys.executable, "-c", END_TO_END], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    k = kernel_timing(args.nodes, args.repeat)
    print(f"region_density on {args.nodes} nodes (best of {args.repeat})")
    for name in ("numpy", "numba"):
        if name in k:
            print(f"  {name:6s} {k[name] * 1e3:9.2f} ms")
    if "numba" in k:
        print(f"  speedup {k['numpy'] / k['numba']:.1f}x, max rel diff {k['max_rel_diff']:.1e}")

    print("integrate_distortion (2, 2, 2), both regions, tol 1e-9")
    runs = [end_to_end(False), end_to_end(True)]
    for r in runs:
        print(f"  {r['backend']:6s} {r['seconds']:9.3f} s  cusp={r['cusp']:.12g}  complement={r['complement']:.12g}")
    if runs[0]["backend"] == "numba":
        print(f"  speedup {runs[1]['seconds'] / runs[0]['seconds']:.1f}x")


if __name__ == "__main__":
    main()
