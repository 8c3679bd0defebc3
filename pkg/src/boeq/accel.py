"""Hot numeric kernels, numba-compiled with a pure-numpy fallback.

The one kernel that dominates many-point resolvent evaluations is the
shifted upper-Hessenberg solve: after a one-time Hessenberg reduction
A = Q H Q*, each evaluation point z costs one O(n^2) elimination of
(H - z I) instead of an O(n^3) LU.  Everything else in the package is
BLAS/FFT bound and gains nothing from JIT.

Kernel selection:

- numba is used when importable and the environment variable ``BOX_NUMBA``
  is not set to ``"0"``.
- otherwise a vectorized numpy implementation of the same elimination runs.

``benchmarks/bench_hessenberg.py`` compares the two paths against per-shift
dense LU.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = [
    "hessenberg_solve_shifted",
    "numba_enabled",
    "worker_count",
]


def _numba_requested() -> bool:
    return os.environ.get("BOX_NUMBA", "1") != "0"


def worker_count() -> int:
    """Worker cap for embarrassingly parallel scans (BOX_THREADS)."""
    raw = os.environ.get("BOX_THREADS", "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def hessenberg_solve_numpy(hess: np.ndarray, shift: complex, rhs: np.ndarray) -> np.ndarray:
    """Solve (H - shift*I) x = rhs for upper-Hessenberg H, O(n^2).

    Row-pivoted elimination of the single subdiagonal followed by back
    substitution.  Vectorized row operations; the numba twin performs the
    same arithmetic element-wise.
    """
    n = hess.shape[0]
    r = hess.astype(np.complex128, copy=True)
    r[np.arange(n), np.arange(n)] -= shift
    x = rhs.astype(np.complex128, copy=True)
    for i in range(n - 1):
        if abs(r[i + 1, i]) > abs(r[i, i]):
            r[[i, i + 1], i:] = r[[i + 1, i], i:]
            x[i], x[i + 1] = x[i + 1], x[i]
        piv = r[i, i]
        if piv == 0:
            raise ZeroDivisionError("singular shifted Hessenberg system")
        m = r[i + 1, i] / piv
        if m != 0:
            r[i + 1, i + 1:] -= m * r[i, i + 1:]
            x[i + 1] -= m * x[i]
        r[i + 1, i] = 0
    if r[n - 1, n - 1] == 0:
        raise ZeroDivisionError("singular shifted Hessenberg system")
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - np.dot(r[i, i + 1:], x[i + 1:])) / r[i, i]
    return x


def _hessenberg_solve_loops(hess, shift, rhs):  # pragma: no cover - numba twin
    n = hess.shape[0]
    r = hess.copy()
    x = rhs.copy()
    for i in range(n):
        r[i, i] -= shift
    for i in range(n - 1):
        if abs(r[i + 1, i]) > abs(r[i, i]):
            for k in range(i, n):
                tmp = r[i, k]
                r[i, k] = r[i + 1, k]
                r[i + 1, k] = tmp
            tmp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = tmp
        piv = r[i, i]
        if piv == 0:
            raise ZeroDivisionError("singular shifted Hessenberg system")
        m = r[i + 1, i] / piv
        if m != 0:
            for k in range(i + 1, n):
                r[i + 1, k] -= m * r[i, k]
            x[i + 1] -= m * x[i]
        r[i + 1, i] = 0
    if r[n - 1, n - 1] == 0:
        raise ZeroDivisionError("singular shifted Hessenberg system")
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for k in range(i + 1, n):
            acc -= r[i, k] * x[k]
        x[i] = acc / r[i, i]
    return x


_NUMBA_KERNEL = None
if _numba_requested():
    try:
        from numba import njit

        _NUMBA_KERNEL = njit(cache=True, nogil=True)(_hessenberg_solve_loops)
    except ImportError:
        _NUMBA_KERNEL = None


def numba_enabled() -> bool:
    """True when the JIT path is active for this process."""
    return _NUMBA_KERNEL is not None


def hessenberg_solve_shifted(hess: np.ndarray, shift: complex, rhs: np.ndarray) -> np.ndarray:
    """Solve (H - shift*I) x = rhs for upper-Hessenberg H.

    Dispatches to the numba kernel when enabled, else to the numpy fallback.
    """
    if _NUMBA_KERNEL is not None:
        return _NUMBA_KERNEL(
            np.ascontiguousarray(hess, dtype=np.complex128),
            np.complex128(shift),
            np.ascontiguousarray(rhs, dtype=np.complex128),
        )
    return hessenberg_solve_numpy(hess, shift, rhs)
