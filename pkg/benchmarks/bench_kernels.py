"""Compare the numba and numpy backends of the two hot kernels.

    python3 benchmarks/bench_kernels.py [--trials 200000] [--repeat 5]

The chain kernel is timed on identical pre-drawn inputs for both backends and
the labels are checked for equality; the Jacobi solver is timed on a batch of
random symmetric matrices.  The first numba call (compilation or cache load)
is reported separately.
"""
import argparse
import time

import numpy as np

from seqdisc.chain import plan_equal_split, stage_measurements
from seqdisc.kernels import run_chain
from seqdisc.linalg import sym_eigen


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_chain(n, s, m, trials, repeat):
    stages = stage_measurements(plan_equal_split(n, s, m))
    kraus = np.stack([x.kraus for x in stages])
    vectors = stages[0].input_family.vectors
    rng = np.random.default_rng(0)
    start = rng.integers(0, n, trials)
    uniforms = rng.random((trials, m))

    t0 = time.perf_counter()
    run_chain(kraus, vectors, start[:1], uniforms[:1], backend="numba")
    warm = time.perf_counter() - t0

    t_nb, a = best_of(lambda: run_chain(kraus, vectors, start, uniforms, backend="numba"), repeat)
    t_np, b = best_of(lambda: run_chain(kraus, vectors, start, uniforms, backend="numpy"), repeat)
    assert np.array_equal(a, b), "backends disagree"
    return warm, t_nb, t_np


def bench_jacobi(dim, count, repeat):
    rng = np.random.default_rng(1)
    mats = [0.5 * (x + x.T) for x in rng.normal(size=(count, dim, dim))]
    sym_eigen(mats[0], backend="numba")
    t_nb, _ = best_of(lambda: [sym_eigen(x, backend="numba") for x in mats], repeat)
    t_np, _ = best_of(lambda: [sym_eigen(x, backend="numpy") for x in mats], repeat)
    return t_nb, t_np


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"{'kernel':<28}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for n, m in ((3, 2), (8, 4)):
        warm, t_nb, t_np = bench_chain(n, 0.25, m, args.trials, args.repeat)
        label = f"chain N={n} M={m} T={args.trials}"
        print(f"{label:<28}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x  (first call {warm:.2f}s)")
    for dim in (4, 9):
        t_nb, t_np = bench_jacobi(dim, 200, args.repeat)
        label = f"jacobi {dim}x{dim} x200"
        print(f"{label:<28}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
