"""Compare the compiled coupling kernel with the numpy fallback.

    python3 benchmarks/bench_kernel.py [--points N] [--repeat R]
"""
import argparse
import time

import numpy as np

from qspp import _core, _kernel_py
from qspp.dispersion import max_matchable_frequency
from qspp.materials import SILVER, eval_lossless, eval_lossy


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    w = rng.uniform(1e15, max_matchable_frequency(SILVER, 1.51) * 0.999, args.points)
    d = 10 ** rng.uniform(-9, -4, args.points)
    ell, ely = eval_lossless(SILVER, w), eval_lossy(SILVER, w)

    kernels = {"numpy": _kernel_py.coupling_kernel}
    if _core.BACKEND != "python":
        kernels[_core.BACKEND] = _core.coupling_kernel
    else:
        print("compiled kernel not built; timing the numpy fallback only")

    results = {}
    for name, kernel in kernels.items():
        for geometry in (_kernel_py.OTTO, _kernel_py.KRETSCHMANN):
            t, out = best_of(lambda: kernel(geometry, 1.51, w, d, ell, ely), args.repeat)
            results[name, geometry] = (t, out)
            label = "otto" if geometry == _kernel_py.OTTO else "kr"
            print(f"{name:>7} {label:>4}: {t * 1e3:8.2f} ms  {args.points / t / 1e6:6.2f} Mpoint/s")

    if len(kernels) == 2:
        for geometry in (_kernel_py.OTTO, _kernel_py.KRETSCHMANN):
            tn, bn = results["numpy", geometry]
            tc, bc = results[_core.BACKEND, geometry]
            dev = np.abs(bn[0] - bc[0]).max()
            print(f"geometry {geometry}: speedup {tn / tc:5.2f}x, max |delta beta| {dev:.1e}")


if __name__ == "__main__":
    main()
