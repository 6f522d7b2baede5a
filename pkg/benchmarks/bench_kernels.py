#!/usr/bin/env python3
"""Benchmark the compiled projected-SOR kernels against the pure-Python
fallback on representative obstacle solves.

Run from the repo root:

    python3 benchmarks/bench_kernels.py [--n 512] [--ns 96] [--nt 24]

Both backends execute the identical sweep schedule, so the iterates
(and sweep counts) must agree exactly; the script checks that before
timing.
"""

import argparse
import time

import numpy as np

from necrotumor import kernels
from necrotumor.params import ModelParams
from necrotumor.oracle import _radial_operator


def bench_tridiag(n, repeats):
    p = ModelParams(0.5, 1.0, 0.25)
    R = 5.776463954445257
    _, _, lower, diag, upper, rhs = _radial_operator(R, n)
    omega = 2.0 / (1.0 + np.sin(np.pi / n))

    def run(fn):
        x = np.full(n, 1.0)
        t0 = time.perf_counter()
        sweeps, upd = fn(lower, diag, upper, rhs, x, p.sigma_hat, omega,
                         1e-12, 50 * n)
        return time.perf_counter() - t0, sweeps, x

    from necrotumor import _psor_py

    t_py, s_py, x_py = run(_psor_py.psor_tridiag)
    times = []
    for _ in range(repeats):
        t, s, x = run(kernels.psor_tridiag)
        times.append(t)
    assert s == s_py and np.array_equal(x, x_py), "backends disagree"
    return t_py, min(times), s


def bench_grid(ns, nt, repeats):
    from necrotumor import _psor_py
    from necrotumor.oracle import solve_axisym_vi

    # reuse the production coefficient builder by timing full solves
    p = ModelParams(0.5, 1.0, 0.25)
    R = 5.776463954445257

    def run(backend):
        saved = kernels.psor_grid
        kernels.psor_grid = backend
        try:
            t0 = time.perf_counter()
            sol = solve_axisym_vi(R, p, 0.01, 2, ns=ns, nt=nt, tol=1e-10)
            return time.perf_counter() - t0, sol
        finally:
            kernels.psor_grid = saved

    t_py, sol_py = run(_psor_py.psor_grid)
    times = []
    for _ in range(repeats):
        t_c, sol_c = run(kernels.psor_grid)
        times.append(t_c)
    assert sol_c.sweeps == sol_py.sweeps
    assert np.array_equal(sol_c.u, sol_py.u), "backends disagree"
    return t_py, min(times), sol_c.sweeps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=512, help="tridiagonal size")
    ap.add_argument("--ns", type=int, default=96, help="grid radial size")
    ap.add_argument("--nt", type=int, default=24, help="grid angular size")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    print(f"active backend: {kernels.BACKEND}")
    if kernels.BACKEND != "compiled":
        print("compiled extension not available; timing fallback against itself")

    t_py, t_c, sweeps = bench_tridiag(args.n, args.repeats)
    print(f"psor_tridiag n={args.n} ({sweeps} sweeps): "
          f"python {t_py:.3f}s, active {t_c:.3f}s, speedup {t_py / t_c:.1f}x")

    t_py, t_c, sweeps = bench_grid(args.ns, args.nt, args.repeats)
    print(f"psor_grid {args.ns}x{args.nt} ({sweeps} sweeps): "
          f"python {t_py:.3f}s, active {t_c:.3f}s, speedup {t_py / t_c:.1f}x")


if __name__ == "__main__":
    main()
