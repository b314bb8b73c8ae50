#!/usr/bin/env python3
"""Benchmark: compiled Cython MLS table construction vs the pure-numpy
fallback, plus a short end-to-end shock-tube run with each backend.

Usage:  python3 benchmarks/benchmark_mls.py
"""

import time

import numpy as np

import mfhydro.backend as backend
from mfhydro import _mls_numpy
from mfhydro.shapes import quadrature_points
from mfhydro.sod import RunConfig, run


def time_call(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def table_benchmark():
    print("MLS table construction (best of 5, seconds):")
    print(f"{'N':>6} {'compiled':>12} {'numpy':>12} {'speedup':>9}")
    rng = np.random.default_rng(0)
    for n in (100, 300, 1000, 3000):
        sp = 1.0 / n
        x = sp * (np.arange(n) + 0.5) + rng.uniform(-0.3, 0.3, n) * sp
        h = 2.0 * np.full(n, sp)
        qy, qw = quadrature_points(x, 2.0 * h)
        t_numpy = time_call(_mls_numpy.mls_table, x, h, 1, qy, qw)
        if backend.COMPILED_AVAILABLE:
            t_comp = time_call(backend._mls_core.mls_table_deg1, x, h, qy, qw)
            print(f"{n:>6} {t_comp:>12.5f} {t_numpy:>12.5f} "
                  f"{t_numpy / t_comp:>8.1f}x")
        else:
            print(f"{n:>6} {'n/a':>12} {t_numpy:>12.5f}")


def end_to_end_benchmark():
    if not backend.COMPILED_AVAILABLE:
        print("\ncompiled extension unavailable; skipping end-to-end run")
        return
    config = RunConfig(scheme="mls", n_particles=150, t_end=0.05)
    print("\nEnd-to-end shock tube (mls, N=150, t_end=0.05):")
    for label, flag in (("compiled", True), ("pure numpy", False)):
        backend.USING_COMPILED = flag and backend.COMPILED_AVAILABLE
        t0 = time.perf_counter()
        report = run(config)
        elapsed = time.perf_counter() - t0
        print(f"  {label:>11}: {elapsed:7.2f} s  "
              f"({report.n_steps} steps, "
              f"Linf(P) = {report.linf_errors['P']:.4e})")
    backend.USING_COMPILED = backend.COMPILED_AVAILABLE


if __name__ == "__main__":
    print(f"compiled extension available: {backend.COMPILED_AVAILABLE}")
    table_benchmark()
    end_to_end_benchmark()
