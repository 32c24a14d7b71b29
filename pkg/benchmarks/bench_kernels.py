#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot kernels in isolation and one full joint solve per
backend.  Sizes default to the regime the solver actually runs in
(reduced dim ~100, a few thousand samples).

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --samples 20000 --dim 100 --clusters 10
"""

import argparse
import time

import numpy as np

from tkmeans import JointHyperparams, kernels, make_blobs, solve


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        tic = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - tic)
    return best


def bench_kernels(n, d, k, repeats):
    rng = np.random.default_rng(0)
    zt = np.ascontiguousarray(rng.standard_normal((n, d)))
    ct = np.ascontiguousarray(zt[rng.choice(n, size=k, replace=False)])
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)]).astype(np.int64)
    m = np.ascontiguousarray(zt.T)

    cases = {
        "assign_labels": lambda impl: impl.assign_labels(zt, ct),
        "centroid_sums": lambda impl: impl.centroid_sums(zt, labels, k),
        "group_mean_columns": lambda impl: impl.group_mean_columns(m, labels, k),
    }
    rows = []
    for name, call in cases.items():
        times = {}
        for backend in kernels.available_backends():
            impl = kernels._BACKENDS[backend]
            times[backend] = timeit(lambda: call(impl), repeats)
        rows.append((name, times))
    return rows


def bench_solve(n, d, k, iters):
    X, _ = make_blobs(n_samples=n, dim=d, clusters=k, seed=0)
    params = JointHyperparams(lam=1.0, mu=1.0, k=k, max_outer_iters=iters,
                              outer_tol=0.0, seed=0)
    times = {}
    current = kernels.backend_name()
    try:
        for backend in kernels.available_backends():
            kernels.set_backend(backend)
            times[backend] = timeit(lambda: solve(X, params), 1)
    finally:
        kernels.set_backend(current)
    return times


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=5000)
    parser.add_argument("--dim", type=int, default=100)
    parser.add_argument("--clusters", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--solve-iters", type=int, default=10)
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (active: {kernels.backend_name()})")
    print(f"kernel inputs: n={args.samples} d={args.dim} k={args.clusters}, "
          f"best of {args.repeats}\n")

    header = f"{'kernel':<22}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for name, times in bench_kernels(args.samples, args.dim, args.clusters,
                                     args.repeats):
        line = f"{name:<22}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
        if "numpy" in times and "cython" in times:
            line += f"{times['numpy'] / times['cython']:>9.1f}x"
        print(line)

    print(f"\nfull solve ({args.solve_iters} outer iterations):")
    times = bench_solve(args.samples, min(args.dim, args.clusters * 4),
                        args.clusters, args.solve_iters)
    for backend, t in times.items():
        print(f"  {backend:<8} {t:.3f}s")


if __name__ == "__main__":
    main()
