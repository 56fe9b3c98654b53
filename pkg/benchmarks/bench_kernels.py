#!/usr/bin/env python
"""Time the numba and numpy kernel backends on the same inputs.

    python benchmarks/bench_kernels.py --m 16 --k 3 --repeat 5

Both backends are imported directly, so MCOPT_NUMBA does not matter here.
The first numba call is done before timing (it may compile or load the cache).
"""
import argparse
import time

import numpy as np

from mcopt._kernels import numba_impl, numpy_impl
from mcopt.audit import subsets_array
from mcopt.dist import cube_points


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=16)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    bits = np.ascontiguousarray((cube_points(args.m) > 0).astype(np.uint8))
    N = bits.shape[0]
    w = np.full(N, 1.0 / N)
    a = w * rng.uniform(0, 1, N)
    r = w * rng.normal(size=N)
    subsets = subsets_array(args.m, args.k)
    coords = subsets[len(subsets) // 2]
    signal = rng.normal(size=N)

    cases = {
        "cell_index": lambda impl: impl.cell_index(bits, coords),
        f"subset_sse (C({args.m},{args.k})={len(subsets)} subsets)":
            lambda impl: impl.subset_sse(bits, w, a, subsets),
        "subset_abs_mass": lambda impl: impl.subset_abs_mass(bits, r, subsets),
        f"fwht (2^{args.m})": lambda impl: impl.fwht(signal),
    }

    print(f"N = 2^{args.m} = {N} points, best of {args.repeat}")
    print(f"{'kernel':<40}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}")
    for name, call in cases.items():
        ref = call(numpy_impl)
        got = call(numba_impl)  # warm-up
        if not np.allclose(ref, got, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree")
        t_np = best_of(lambda: call(numpy_impl), args.repeat)
        t_nb = best_of(lambda: call(numba_impl), args.repeat)
        print(f"{name:<40}{t_np * 1e3:12.2f}{t_nb * 1e3:12.2f}{t_np / t_nb:9.1f}")


if __name__ == "__main__":
    main()
