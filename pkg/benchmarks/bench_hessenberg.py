"""Benchmark the shifted-Hessenberg solve kernel: numba vs numpy vs dense LU.

Many-point evaluations on the upper half-plane reduce, after a one-time
Hessenberg reduction, to one shifted solve per point.  This script times the
JIT kernel against the vectorized numpy fallback and against re-factoring
the dense matrix for every shift, which is what the kernel replaces.

Run:  python benchmarks/bench_hessenberg.py [--sizes 500,1000,2000] [--shifts 16]
Set BOX_NUMBA=0 to benchmark with the JIT disabled package-wide.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from boeq.accel import hessenberg_solve_numpy, hessenberg_solve_shifted, numba_enabled


def random_hessenberg(n: int, rng) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = np.triu(a, -1)
    h[np.arange(n), np.arange(n)] += 4.0  # keep the solves well conditioned
    return np.ascontiguousarray(h)


def timed(fn, shifts, repeats=1):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for z in shifts:
            fn(z)
        best = min(best, time.perf_counter() - t0)
    return best / len(shifts)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="500,1000,2000")
    parser.add_argument("--shifts", type=int, default=16)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(11)
    shifts = rng.standard_normal(args.shifts) + 1j * (1.0 + rng.random(args.shifts))

    print(f"numba kernel active: {numba_enabled()}")
    print(f"{'n':>6} {'jit-or-dispatch':>16} {'numpy-fallback':>15} {'dense LU':>10}  (s per shift)")
    for n in sizes:
        h = random_hessenberg(n, rng)
        b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        eye = np.eye(n)
        # warm-up (JIT compilation, caches)
        hessenberg_solve_shifted(h, shifts[0], b)

        t_dispatch = timed(lambda z: hessenberg_solve_shifted(h, z, b), shifts)
        t_numpy = timed(lambda z: hessenberg_solve_numpy(h, z, b), shifts)
        t_lu = timed(lambda z: np.linalg.solve(h - z * eye, b), shifts[: max(2, len(shifts) // 4)])

        x1 = hessenberg_solve_shifted(h, shifts[0], b)
        x2 = np.linalg.solve(h - shifts[0] * eye, b)
        err = np.linalg.norm(x1 - x2) / np.linalg.norm(x2)
        print(f"{n:>6} {t_dispatch:>16.4f} {t_numpy:>15.4f} {t_lu:>10.4f}   agreement {err:.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
