"""Time one Picard assemble+solve with the compiled and the numpy kernel.

Usage: python3 benchmarks/bench_kernels.py [M ...]
"""

import sys
import timeit

import numpy as np

from willmore import kernels
from willmore.curves import curve_catalog


def bench(M: int, repeat: int = 5):
    s = curve_catalog("flower32", M)
    X = np.ascontiguousarray(s.X)
    S = -X
    rng = np.random.default_rng(0)
    ta, tb = rng.random(M), rng.random(M)
    args = (X, s.kappa, S, 1.0, 1e-3, ta, tb)
    out = {}
    solvers = {"python": kernels.python_picard_solve}
    if kernels.compiled_picard_solve is not None:
        solvers["cython"] = kernels.compiled_picard_solve
    for name, f in solvers.items():
        n = max(1, int(2000 / M))
        out[name] = min(timeit.repeat(lambda: f(*args), number=n, repeat=repeat)) / n
    if len(solvers) == 2:
        a = kernels.python_picard_solve(*args)
        b = kernels.compiled_picard_solve(*args)
        out["max_diff"] = max(float(np.max(np.abs(u - v) / (1 + np.abs(u)))) for u, v in zip(a, b))
    return out


def main(argv):
    sizes = [int(a) for a in argv] or [64, 128, 256, 512, 1024, 2048]
    print(f"backend in use: {kernels.BACKEND}")
    print(f"{'M':>6} {'python [ms]':>12} {'cython [ms]':>12} {'speedup':>8} {'rel diff':>10}")
    for M in sizes:
        r = bench(M)
        py = r["python"] * 1e3
        cy = r.get("cython", float("nan")) * 1e3
        print(f"{M:>6} {py:>12.3f} {cy:>12.3f} {py / cy:>8.2f} {r.get('max_diff', float('nan')):>10.2e}")


if __name__ == "__main__":
    main(sys.argv[1:])
