#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy fallbacks.

Usage:  python benchmarks/bench_kernels.py [--quick]

Covers the two hot paths:
  * horner_many: batched polynomial evaluation (inner loop of every
    envelope/field evaluation);
  * rotation_scan: the exhaustive rotation-grid search behind the
    brute-force canonical-form oracle.
Plus one end-to-end timing of the full verification pipeline.
"""
import argparse
import time

import numpy as np

from wintgen import bruteforce
from wintgen._backend import BACKEND, backends


def timeit(fun, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fun()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_horner(impls, quick):
    rng = np.random.default_rng(0)
    sizes = [(8, 7, 1000), (16, 7, 20000)] if quick else [(8, 7, 1000), (16, 7, 20000), (24, 7, 200000)]
    print("\nhorner_many  (degree x dim, N points; best of 5)")
    for deg, dim, n in sizes:
        coeffs = rng.standard_normal((deg + 1, dim)) + 1j * rng.standard_normal((deg + 1, dim))
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        row = f"  deg={deg:3d} N={n:7d}:"
        base = None
        for name, mod in impls.items():
            t = timeit(lambda: mod.horner_many(coeffs, z), 5)
            if name == "python":
                base = t
            speedup = f" ({base / t:4.1f}x)" if name != "python" and base else ""
            row += f"  {name} {t * 1e3:8.2f} ms{speedup}"
        print(row)


def bench_scan(impls, quick):
    rng = np.random.default_rng(1)
    pairs = [bruteforce.random_ideal_pair(rng) for _ in range(2)] + [
        bruteforce.random_generic_pair(rng) for _ in range(2)
    ]
    step = 6.0 if quick else 3.0
    print(f"\nrotation_scan  (step {step} degrees; best of 3, mean over 4 pairs)")
    base = None
    for name, mod in impls.items():
        def run():
            for a1, a2 in pairs:
                mod.rotation_scan(a1, a2, step)
        t = timeit(run, 3) / len(pairs)
        if name == "python":
            base = t
        speedup = f" ({base / t:4.1f}x)" if name != "python" and base else ""
        print(f"  {name}: {t * 1e3:8.1f} ms/pair{speedup}")


def bench_pipeline():
    from wintgen.pipeline import PipelineConfig, run_full

    t0 = time.perf_counter()
    report = run_full(PipelineConfig())
    t = time.perf_counter() - t0
    print(f"\nfull verification pipeline (9x9x8 grid, backend={BACKEND}): {t:.2f} s, "
          f"passed={report['passed']}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()
    impls = backends()
    print(f"available backends: {', '.join(impls)} (selected: {BACKEND})")
    bench_horner(impls, args.quick)
    bench_scan(impls, args.quick)
    bench_pipeline()


if __name__ == "__main__":
    main()
