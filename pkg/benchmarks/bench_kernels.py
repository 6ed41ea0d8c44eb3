#!/usr/bin/env python3
"""Benchmark: compiled kernels versus the NumPy fallback.

The pointwise truncation kernels and weighted reductions run once per time
step on the full quadrature grid, so they dominate the Python-level cost of
long runs. This script times both backends on representative grid sizes and
prints the speedups, plus an end-to-end stepper comparison.

Usage: python benchmarks/bench_kernels.py
"""

import os
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kvwave import _kernels_np

try:
    from kvwave import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pointwise():
    rng = np.random.default_rng(0)
    print(f"{'kernel':<34}{'size':>9}{'numpy':>12}{'cython':>12}{'speedup':>9}")
    for size in (4096, 65536, 262144):
        v = rng.uniform(-4, 4, size)
        w = rng.uniform(0.0, 1.0, size)
        cases = [
            ("truncated_power5", lambda m: m.truncated_power5(v, 2.0)),
            ("truncated_power5_antiderivative", lambda m: m.truncated_power5_antiderivative(v, 2.0)),
            ("weighted_abs_power_sum(p=10)", lambda m: m.weighted_abs_power_sum(v, w, 10.0)),
            ("potential_sum", lambda m: m.potential_sum(v, w, 2.0)),
        ]
        for name, call in cases:
            t_np = best_of(lambda: call(_kernels_np))
            if compiled is None:
                print(f"{name:<34}{size:>9}{t_np * 1e6:>10.1f}us{'-':>12}{'-':>9}")
                continue
            t_cy = best_of(lambda: call(compiled))
            print(
                f"{name:<34}{size:>9}{t_np * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us{t_np / t_cy:>8.1f}x"
            )


def bench_stepper():
    from kvwave.basis import Domain, build_basis
    from kvwave.damping import assemble_kv_matrix, make_profile
    from kvwave.dynamics import SchemeConfig, State, run
    from kvwave.nonlinearity import Truncation
    import kvwave.kernels as kernels

    b = build_basis(Domain((np.pi,)), 64, 256)
    prof = make_profile(b, "squared_bump", eta=1.0, center=np.pi / 2, radius=0.8)
    K = assemble_kv_matrix(prof, b)
    u0 = np.zeros(64)
    u0[0] = 0.5
    t0 = time.perf_counter()
    run(State(u0, np.zeros(64)), K, b, Truncation(10.0), SchemeConfig(dt=1e-3), 5.0, sample_every=100)
    elapsed = time.perf_counter() - t0
    print(f"\nstepper (M=64, 5000 steps, backend={kernels.BACKEND}): {elapsed:.2f}s")


if __name__ == "__main__":
    if compiled is None:
        print("compiled kernels unavailable; timing the fallback only\n")
    forced = os.environ.get("KVWAVE_FORCE_NUMPY")
    if forced:
        print(f"KVWAVE_FORCE_NUMPY={forced}: stepper uses the fallback\n")
    bench_pointwise()
    bench_stepper()
