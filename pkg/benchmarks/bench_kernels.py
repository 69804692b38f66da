"""Compare the compiled and numpy particle kernels.

Usage::

    python benchmarks/bench_kernels.py [--particles 100000 1000000] [--repeat 7]

Prints the best-of-``repeat`` wall time per call for each kernel and backend,
the speed-up of the compiled backend, and the time of one full kinetic step
at the default run resolution.
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from kbmplasma.pic import PicConfig, kernels, run
from kbmplasma.profiles import PlasmaParams, make_profile

X_MAX, N_CELLS = 120.0, 4800


def kernel_calls(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    dx = 2 * X_MAX / N_CELLS
    x0, nn = -X_MAX, N_CELLS + 1
    x = rng.normal(0.0, 3.0, n)
    # thermal electrons move eps * u * dt = 0.01, i.e. about 0.2 cells, per step
    x1 = x + rng.normal(0.0, 0.2 * dx, n)
    w = np.full(n, 1.0 / n)
    field = np.sin(np.linspace(0.0, 20.0, nn))
    return {
        "deposit_cic": lambda: kernels.deposit_cic(x, w, x0, dx, nn),
        "gather_cic": lambda: kernels.gather_cic(x, field, x0, dx),
        "deposit_current": lambda: kernels.deposit_current(x, x1, w, x0, dx, nn, 0.1),
    }


def best(fn, repeat: int) -> float:
    number = 3
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def step_time(backend: str, n_steps: int = 50) -> float:
    params = PlasmaParams(eps=0.1, mu=math.sqrt(1 / 2000), gamma=0.1, b=1.0)
    cfg = PicConfig(params=params, profile=make_profile("gaussian", 1.0), dt=0.1, t_end=n_steps * 0.1, diag_every=n_steps)
    prev = kernels.use_backend(backend)
    try:
        t = min(timeit.repeat(lambda: run(cfg), number=1, repeat=2))
    finally:
        kernels.use_backend(prev)
    return t / n_steps


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--particles", type=int, nargs="+", default=[100_000, 1_000_000])
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args(argv)
    have = kernels.available_backends()
    print(f"backends: {', '.join(have)} (active: {kernels.backend()})")
    print(f"{'kernel':<16} {'N':>9} " + " ".join(f"{b + ' [ms]':>13}" for b in have) + ("  speed-up" if len(have) > 1 else ""))
    for n in args.particles:
        calls = kernel_calls(n)
        for name, fn in calls.items():
            times = {}
            for b in have:
                prev = kernels.use_backend(b)
                times[b] = best(fn, args.repeat)
                kernels.use_backend(prev)
            row = f"{name:<16} {n:>9} " + " ".join(f"{1e3 * times[b]:>13.3f}" for b in have)
            if "cython" in times:
                row += f"  {times['python'] / times['cython']:8.2f}x"
            print(row)
    print("full step (N = 1e5, 4800 cells, incl. field solve):")
    for b in have:
        print(f"  {b:<8} {1e3 * step_time(b):8.2f} ms/step")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
