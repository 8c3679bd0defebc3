"""Truncated shift and Lax-pair operators on the torus Hardy space.

All matrices act on coefficient vectors (v_0, ..., v_N) of span{e^{ikx},
0 <= k <= N}.  Identities among banded operators hold exactly on columns at
distance >= 2m from the truncation edge, where m is the symbol band; the
validation module asserts them there.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidFieldError, TruncationWarning
from .spectral import SYMMETRY_TOL, OperatorMatrix, TorusField

__all__ = [
    "toeplitz_matrix",
    "lax_matrix",
    "b_matrix",
    "shift_adjoint",
    "abs_derivative_field",
    "LaxPairTorus",
    "lax_pair",
]


def _diagonal_values(b: TorusField, n: int, tol: float) -> tuple[np.ndarray, bool]:
    """Coefficients b_hat(d) for d = -n..n, symmetrized when b is real.

    Returns (values indexed by d + n, is_real).  Symmetrizing the coefficient
    array (not the assembled matrix) makes the Toeplitz matrix of a real
    symbol exactly Hermitian.
    """
    is_real = b.symmetry_defect() <= tol
    vals = np.zeros(2 * n + 1, dtype=np.complex128)
    top = min(n, b.max_mode)
    ks = np.arange(top + 1)
    pos = b.coeffs[b.max_mode + ks]
    if is_real:
        pos = 0.5 * (pos + np.conj(b.coeffs[b.max_mode - ks]))
        pos[0] = pos[0].real
        vals[n:n + top + 1] = pos
        vals[n - top:n] = np.conj(pos[1:][::-1])
    else:
        vals[n:n + top + 1] = pos
        vals[n - top:n] = b.coeffs[b.max_mode - top:b.max_mode]
    return vals, is_real


def toeplitz_matrix(b: TorusField, n: int, tol: float = SYMMETRY_TOL) -> OperatorMatrix:
    """Truncated Toeplitz operator f -> P(b f): entries b_hat(j - k).

    Modes of ``b`` beyond +-2n cannot reach the truncation and are ignored
    (with a warning when nonzero).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if b.max_mode > 2 * n:
        beyond = b.coeffs[np.abs(np.arange(-b.max_mode, b.max_mode + 1)) > 2 * n]
        if np.any(np.abs(beyond) > 0):
            warnings.warn(
                f"symbol has nonzero modes beyond +-{2 * n}; they are ignored",
                TruncationWarning,
                stacklevel=2,
            )
    vals, is_real = _diagonal_values(b, n, tol)
    j = np.arange(n + 1)
    t = vals[j[:, None] - j[None, :] + n]
    return OperatorMatrix(t, tag="hermitian" if is_real else "general")


def lax_matrix(u: TorusField, n: int, tol: float = SYMMETRY_TOL) -> OperatorMatrix:
    """Truncated L_u = D - T_u with D = diag(0..n); exactly Hermitian."""
    if u.symmetry_defect() > tol:
        raise InvalidFieldError("lax_matrix requires a real (conjugate-symmetric) field")
    t = toeplitz_matrix(u, n, tol=tol)
    entries = np.diag(np.arange(n + 1).astype(np.complex128)) - t.entries
    return OperatorMatrix(entries, tag="hermitian")


def abs_derivative_field(u: TorusField) -> TorusField:
    """Coefficient map c_k -> |k| c_k, the field |D|u."""
    ks = np.abs(np.arange(-u.max_mode, u.max_mode + 1))
    return TorusField(u.max_mode, u.coeffs * ks)


def b_matrix(u: TorusField, n: int, tol: float = SYMMETRY_TOL) -> OperatorMatrix:
    """Truncated B_u = i (T_{|D|u} - T_u^2); exactly anti-Hermitian.

    The square uses the truncated T_u, so both inner matrices are exactly
    Hermitian and the result is anti-Hermitian by construction.  The product
    is evaluated as its own symmetric part to remove matmul reassociation
    roundoff.
    """
    if u.symmetry_defect() > tol:
        raise InvalidFieldError("b_matrix requires a real (conjugate-symmetric) field")
    t_disp = toeplitz_matrix(abs_derivative_field(u), n, tol=tol)
    t = toeplitz_matrix(u, n, tol=tol).entries
    sq = t @ t
    sq = 0.5 * (sq + sq.conj().T)
    return OperatorMatrix(1j * (t_disp.entries - sq), tag="antihermitian")


def shift_adjoint(n: int) -> OperatorMatrix:
    """Adjoint shift (v_0, ..., v_n) -> (v_1, ..., v_n, 0): superdiagonal ones."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = np.zeros((n + 1, n + 1), dtype=np.complex128)
    s[np.arange(n), np.arange(1, n + 1)] = 1.0
    return OperatorMatrix(s, tag="general")


@dataclass(frozen=True)
class LaxPairTorus:
    """The pair (L_u, B_u) truncated to modes 0..N, with its source field."""

    L: OperatorMatrix
    B: OperatorMatrix
    source: TorusField
    dim: int


def lax_pair(u: TorusField, n: int, tol: float = SYMMETRY_TOL) -> LaxPairTorus:
    return LaxPairTorus(
        L=lax_matrix(u, n, tol=tol),
        B=b_matrix(u, n, tol=tol),
        source=u,
        dim=n + 1,
    )
