#!/usr/bin/env python3
"""Benchmark the compiled core against the numpy fallback.

Times the two hot kernels on representative workloads: power-law strength
sums at planner scale and controlled-X pulse application at simulator scale.
Run after `pip install -e .`; prints one table row per workload.
"""
import argparse
import time

import numpy as np

from lrfanout import _core_py

try:
    from lrfanout import _core
except ImportError:
    _core = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_strength_1d(m):
    rng = np.random.default_rng(0)
    cluster = np.arange(m, dtype=np.int64)
    targets = np.arange(m, 2 * m, dtype=np.int64)
    powtab = np.concatenate(([0.0], rng.uniform(0.1, 1.0, size=2 * m)))
    return (
        f"strength_sums_1d m={m}",
        (cluster, targets, powtab),
        "strength_sums_1d",
    )


def bench_strength_nd(side):
    rng = np.random.default_rng(1)
    xs = np.stack(np.meshgrid(np.arange(side), np.arange(side), indexing="ij"), axis=-1)
    coords = xs.reshape(-1, 2).astype(np.int64)
    half = coords.shape[0] // 2
    powtab = np.concatenate(([0.0], rng.uniform(0.1, 1.0, size=2 * side * side)))
    return (
        f"strength_sums_nd {side}x{side}",
        (coords[:half], coords[half:], powtab),
        "strength_sums_nd",
    )


def bench_min_sqdist(side):
    xs = np.stack(np.meshgrid(np.arange(side), np.arange(side), indexing="ij"), axis=-1)
    coords = xs.reshape(-1, 2).astype(np.int64)
    half = coords.shape[0] // 2
    return (
        f"min_sqdist_nd {side}x{side}",
        (coords[:half], coords[half:]),
        "min_sqdist_nd",
    )


def bench_pulse(n, controls, batch):
    rng = np.random.default_rng(2)
    dim = 1 << n
    amps = rng.normal(size=(dim, batch)) + 1j * rng.normal(size=(dim, batch))
    shifts = np.arange(1, controls + 1, dtype=np.int64)
    strengths = rng.uniform(0.1, 1.0, size=controls)
    return (
        f"apply_ctrl_x n={n} ctrls={controls} batch={batch}",
        (np.ascontiguousarray(amps), shifts, strengths, 0, 0.7, -1),
        "apply_ctrl_x",
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    if args.quick:
        workloads = [
            bench_strength_1d(4096),
            bench_strength_nd(48),
            bench_min_sqdist(48),
            bench_pulse(16, 8, 1),
        ]
    else:
        workloads = [
            bench_strength_1d(32768),
            bench_strength_nd(128),
            bench_min_sqdist(128),
            bench_pulse(20, 12, 1),
            bench_pulse(12, 6, 1 << 12),
        ]

    print(f"{'workload':<44} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for label, call_args, name in workloads:
        # copy mutable inputs so both backends see identical data
        def run(impl):
            fresh = tuple(a.copy() if isinstance(a, np.ndarray) else a for a in call_args)
            return timeit(getattr(impl, name), *fresh)

        t_py = run(_core_py)
        if _core is None:
            print(f"{label:<44} {t_py * 1e3:>8.1f}ms {'n/a':>10} {'n/a':>8}")
            continue
        t_c = run(_core)
        print(f"{label:<44} {t_py * 1e3:>8.1f}ms {t_c * 1e3:>8.1f}ms {t_py / t_c:>7.1f}x")
    if _core is None:
        print("\ncompiled core not built; install with Cython available to compare")


if __name__ == "__main__":
    main()
