#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

The backend in use follows LEVELDOT_NO_NUMBA; this script times both
implementations directly, plus one realization-sized end-to-end slice
(sample + diagonalize + phase sums) so the kernel speedup can be read in
context of the LAPACK-dominated pipeline.

Run:  python benchmarks/bench_kernels.py [--sizes 400,1000] [--times 200]
"""

import argparse
import time

import numpy as np

from leveldot import _kernels
from leveldot.ensembles import EnsembleSpec, sample_realization
from leveldot.spectral import decompose, survival


def timeit(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_phase_survival(n_levels, n_times):
    rng = np.random.default_rng(0)
    w = rng.random(n_levels)
    w /= w.sum()
    e = rng.normal(size=n_levels)
    t = np.geomspace(1e-3, 50, n_times)
    rows = []
    numpy_t = timeit(_kernels._phase_survival_numpy, w, e, t)
    rows.append(("survival/numpy", numpy_t))
    if _kernels._phase_survival_numba is not None:
        _kernels._phase_survival_numba(w, e, t)  # warm the JIT
        rows.append(("survival/numba", timeit(_kernels._phase_survival_numba, w, e, t)))
    return rows


def bench_phase_sum(n_levels, n_taus):
    rng = np.random.default_rng(1)
    e = rng.normal(size=n_levels)
    taus = np.geomspace(0.01, 5, n_taus)
    rows = [("phase_sum/numpy", timeit(_kernels._phase_sum_numpy, e, taus))]
    if _kernels._phase_sum_numba is not None:
        _kernels._phase_sum_numba(e, taus)
        rows.append(("phase_sum/numba", timeit(_kernels._phase_sum_numba, e, taus)))
    return rows


def bench_realization(n, n_times):
    spec = EnsembleSpec.with_gamma("U", n, 4.6)
    tau = np.geomspace(1e-3, 10, n_times)
    t = spec.tau_to_time(tau)

    def one(idx=[0]):
        idx[0] += 1
        ov = decompose(sample_realization(spec, 1, idx[0]))
        survival(ov, t)

    return [("realization (sample+eigh+survival)", timeit(one, repeat=3))]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="400,1000",
                        help="comma-separated level counts")
    parser.add_argument("--times", type=int, default=200, help="time-grid points")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"active backend: {_kernels.BACKEND}")
    for n in sizes:
        print(f"\nn_levels={n}, time grid={args.times}")
        rows = bench_phase_survival(n, args.times) + bench_phase_sum(n, args.times)
        rows += bench_realization(n, args.times)
        base = dict(rows).get("survival/numpy")
        for name, t in rows:
            extra = ""
            if name == "survival/numba" and base:
                extra = f"  ({base / t:.1f}x vs numpy)"
            if name == "phase_sum/numba":
                extra = f"  ({dict(rows)['phase_sum/numpy'] / t:.1f}x vs numpy)"
            print(f"  {name:<36s} {t * 1e3:9.3f} ms{extra}")


if __name__ == "__main__":
    main()
