"""Frequency-domain discretization of the line Hardy space.

Functions live on the half-line frequency grid ``xi_j = j h``, ``j = 0..M``,
``Xi = M h``.  Two frames are in play:

- the *collocation* frame of raw samples ``fhat(xi_j)``, in which the
  generator ``G`` acts as ``i d/dxi`` through finite differences and the
  Toeplitz operator as a trapezoid-weighted convolution;
- the *weighted* frame ``g_j = sqrt(wt_j) fhat_j`` with trapezoid weights
  ``wt = (1/2, 1, ..., 1, 1/2)``, related by the exact diagonal similarity
  ``S = diag(sqrt(wt))``.

Operator matrices returned by :func:`toeplitz_line` and :func:`lax_line`
live in the weighted frame, where the convolution of a real symbol is
*exactly* Hermitian (kernel conjugate symmetry times the symmetric weight
``sqrt(wt_j wt_k)``).  Applying ``S^-1 T S`` to raw samples reproduces the
plain trapezoid collocation sum bit-for-bit, so no quadrature accuracy is
traded for the symmetry.

The resolvent system ``(G - 2t L_{u0} - z) f = Pu0`` is solved in gauge
variables ``ghat = e^{i t xi^2} fhat``, which removes the ``-2t xi`` diagonal
of ``G - 2t D`` exactly and moves phases ``e^{i t (xi^2 - eta^2)}`` into the
convolution kernel.  The only boundary condition is the decay closure
``ghat(Xi) = 0``; no condition is imposed at ``xi = 0`` where a one-sided
stencil runs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .accel import hessenberg_solve_shifted
from .errors import ConditioningError, ConfigurationError, DomainError, IngestionError
from .spectral import TWO_PI, HalfLineSpectrum

__all__ = [
    "LineGrid",
    "LineField",
    "abs_frequency_field",
    "g_matrix",
    "to_weighted",
    "weight_vector",
    "unweight_vector",
    "toeplitz_line",
    "lax_line",
    "iplus",
    "LineResolventSystem",
    "resolvent_system",
    "resolvent_solve",
    "ResolventEvaluator",
]

DEFAULT_CUTOFF = 40.0
DEFAULT_STEP = 0.02
SPECTRAL_TAIL_TOL = 1e-10
SOLVE_TOL = 1e-6


@dataclass(frozen=True)
class LineGrid:
    """Half-line frequency grid xi_j = j*h, j = 0..M, with Xi = M*h."""

    cutoff: float = DEFAULT_CUTOFF
    step: float = DEFAULT_STEP

    def __post_init__(self):
        if self.cutoff <= 0 or self.step <= 0:
            raise ValueError("cutoff and step must be positive")
        if self.count < 3:
            raise ValueError("grid needs at least 3 nodes")

    @property
    def count(self) -> int:
        return int(round(self.cutoff / self.step)) + 1

    @property
    def last(self) -> int:
        return self.count - 1

    @property
    def xi(self) -> np.ndarray:
        return np.arange(self.count) * self.step

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights divided by h: (1/2, 1, ..., 1, 1/2)."""
        w = np.ones(self.count)
        w[0] = 0.5
        w[-1] = 0.5
        return w

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def refined(self, factor: int = 2) -> "LineGrid":
        return LineGrid(self.cutoff, self.step / factor)

    def spectrum(self, values: np.ndarray) -> HalfLineSpectrum:
        return HalfLineSpectrum(self.cutoff, self.step, values)


@dataclass(frozen=True)
class LineField:
    """Real decaying field on the line, stored through its transform.

    ``two_sided(grid)`` evaluates uhat on the mirrored grid
    ``zeta = d*h, d = -M..M`` (needed by the convolution); the Hardy datum
    is its non-negative half.
    """

    spectrum_fn: Callable[[np.ndarray], np.ndarray]
    label: str = "line-field"

    def two_sided(self, grid: LineGrid) -> np.ndarray:
        """uhat on zeta = d*h for d = -M..M, conjugate-symmetric exactly."""
        pos = np.asarray(self.spectrum_fn(grid.xi), dtype=np.complex128)
        if pos.shape != (grid.count,):
            raise ValueError("spectrum_fn must return one value per node")
        out = np.empty(2 * grid.count - 1, dtype=np.complex128)
        m = grid.last
        out[m:] = pos
        out[:m] = np.conj(pos[1:][::-1])
        return out

    def hardy(self, grid: LineGrid) -> HalfLineSpectrum:
        """Transform of the Hardy part Pu0 on the half-line grid."""
        pos = np.asarray(self.spectrum_fn(grid.xi), dtype=np.complex128)
        return grid.spectrum(pos)

    @classmethod
    def from_spectrum(cls, fn: Callable[[np.ndarray], np.ndarray], label: str = "line-field") -> "LineField":
        return cls(spectrum_fn=fn, label=label)

    @classmethod
    def from_samples(cls, x: np.ndarray, u: np.ndarray, label: str = "sampled") -> "LineField":
        """Trapezoid Fourier transform of uniformly sampled decaying data."""
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if x.ndim != 1 or x.shape != u.shape or x.size < 8:
            raise IngestionError("need matching 1-d x and u arrays with >= 8 samples")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
            raise IngestionError("samples contain non-finite values")
        dx = np.diff(x)
        if np.max(np.abs(dx - dx[0])) > 1e-9 * abs(dx[0]):
            raise IngestionError("x grid must be uniform")
        w = np.full(x.size, dx[0])
        w[0] *= 0.5
        w[-1] *= 0.5

        def fn(xi: np.ndarray) -> np.ndarray:
            phase = np.exp(-1j * np.outer(xi, x))
            vals = phase @ (w * u)
            return vals

        return cls(spectrum_fn=fn, label=label)


def abs_frequency_field(u: LineField) -> LineField:
    """The field with transform |zeta| uhat(zeta), i.e. |D|u."""

    def fn(xi: np.ndarray) -> np.ndarray:
        return np.abs(xi) * np.asarray(u.spectrum_fn(xi), dtype=np.complex128)

    return LineField(spectrum_fn=fn, label=f"|D|({u.label})")


# ---------------------------------------------------------------------------
# operator matrices
# ---------------------------------------------------------------------------

def g_matrix(grid: LineGrid) -> np.ndarray:
    """i * d/dxi: second-order central, one-sided closures at 0 and Xi.

    Collocation frame (raw samples).  Needs M >= 8 so the boundary stencils
    stay clear of each other.
    """
    n = grid.count
    if n < 9:
        raise ConfigurationError("differentiation needs M >= 8 nodes")
    h = grid.step
    g = np.zeros((n, n), dtype=np.complex128)
    c = 1.0 / (2.0 * h)
    idx = np.arange(1, n - 1)
    g[idx, idx - 1] = -c
    g[idx, idx + 1] = c
    g[0, 0] = -1.5 / h
    g[0, 1] = 2.0 / h
    g[0, 2] = -0.5 / h
    g[n - 1, n - 1] = 1.5 / h
    g[n - 1, n - 2] = -2.0 / h
    g[n - 1, n - 3] = 0.5 / h
    return 1j * g


def to_weighted(mat: np.ndarray, grid: LineGrid) -> np.ndarray:
    """Similarity S A S^-1 into the weighted frame."""
    s = grid.sqrt_weights
    return (s[:, None] / s[None, :]) * mat


def weight_vector(f: np.ndarray, grid: LineGrid) -> np.ndarray:
    return grid.sqrt_weights * f


def unweight_vector(g: np.ndarray, grid: LineGrid) -> np.ndarray:
    return g / grid.sqrt_weights


def toeplitz_line(u0: LineField, grid: LineGrid) -> np.ndarray:
    """Convolution matrix of T_{u0} in the weighted frame; exactly Hermitian
    for real u0.

    Entries ``(1/2pi) uhat(xi_j - xi_k) h sqrt(wt_j wt_k)``; applying
    ``S^-1 T S`` to raw samples is the trapezoid collocation sum with
    endpoint weights h/2.
    """
    vals = u0.two_sided(grid)
    m = grid.last
    j = np.arange(grid.count)
    kernel = vals[j[:, None] - j[None, :] + m]
    s = grid.sqrt_weights
    return (grid.step / TWO_PI) * kernel * (s[:, None] * s[None, :])


def lax_line(u0: LineField, grid: LineGrid) -> np.ndarray:
    """L_{u0} = D - T_{u0} with D = diag(xi_j); Hermitian in the weighted frame."""
    t = toeplitz_line(u0, grid)
    out = -t
    out[np.arange(grid.count), np.arange(grid.count)] += grid.xi
    return out


def iplus(f: HalfLineSpectrum, extrapolate: bool = False) -> complex:
    """Boundary value fhat(0+).

    Reads node 0 directly; with ``extrapolate=True`` a quadratic through
    nodes 1, 2, 3 is evaluated at 0, used for resolvent outputs whose
    boundary row folds node 0 into the one-sided closure.  Either form
    assumes the transform is smooth across the first few nodes.
    """
    v = f.values
    if extrapolate:
        if v.size < 4:
            raise ValueError("extrapolation needs at least 4 nodes")
        return complex(3.0 * v[1] - 3.0 * v[2] + v[3])
    return complex(v[0])


# ---------------------------------------------------------------------------
# gauge resolvent system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineResolventSystem:
    """Dense gauge-frame discretization of (G - 2t L_{u0} - z) f = Pu0.

    ``matrix`` includes the -z shift on the first M diagonal entries and the
    decay closure row ``g(Xi) = 0`` in place of the last equation; ``rhs`` is
    the gauge-transformed weighted Hardy datum; ``gauge`` the unit-modulus
    diagonal ``e^{i t xi^2}``.
    """

    t: float
    z: complex
    grid: LineGrid
    matrix: np.ndarray
    rhs: np.ndarray
    gauge: np.ndarray

    def __post_init__(self):
        if complex(self.z).imag <= 0:
            raise DomainError(f"Im z = {complex(self.z).imag:.6g} must be positive")


def _gauge_phase(grid: LineGrid, t: float) -> np.ndarray:
    return np.exp(1j * t * grid.xi ** 2)


def _weighted_generator(grid: LineGrid) -> np.ndarray:
    return to_weighted(g_matrix(grid), grid)


def _gauge_operator(u0: LineField, t: float, grid: LineGrid) -> np.ndarray:
    """A = G_w + 2t P T_w P* in the weighted gauge frame (without -z)."""
    a = _weighted_generator(grid)
    if t != 0.0:
        phase = _gauge_phase(grid, t)
        t_w = toeplitz_line(u0, grid)
        a = a + 2.0 * t * (phase[:, None] * t_w * np.conj(phase)[None, :])
    return a


def _gauge_rhs(u0: LineField, t: float, grid: LineGrid) -> np.ndarray:
    hardy = u0.hardy(grid).values
    return grid.sqrt_weights * (_gauge_phase(grid, t) * hardy)


def _check_tail(u0: LineField, grid: LineGrid, tol: float):
    tail = u0.hardy(grid).tail_fraction()
    if tail > tol:
        raise ConfigurationError(
            f"spectral tail {tail:.3e} at Xi = {grid.cutoff:g} exceeds {tol:g}; "
            "enlarge the cutoff"
        )


def resolvent_system(u0: LineField, t: float, z: complex, grid: LineGrid) -> LineResolventSystem:
    """Assemble the dense square system with closure row, for inspection."""
    z = complex(z)
    if z.imag <= 0:
        raise DomainError(f"Im z = {z.imag:.6g} must be positive")
    n = grid.count
    a = _gauge_operator(u0, t, grid).copy()
    a[np.arange(n - 1), np.arange(n - 1)] -= z
    a[n - 1, :] = 0.0
    a[n - 1, n - 1] = 1.0
    rhs = _gauge_rhs(u0, t, grid)
    rhs[-1] = 0.0
    return LineResolventSystem(
        t=t, z=z, grid=grid, matrix=a, rhs=rhs, gauge=_gauge_phase(grid, t)
    )


def _banded_reduced(grid: LineGrid) -> np.ndarray:
    """Weighted generator rows/cols 0..M-1 as solve_banded diagonals.

    Assembled directly from the stencil (never densified), so t = 0 solves
    stay O(M) in memory at any resolution.  Bandwidths are (l, u) = (1, 2):
    the one-sided row at xi = 0 contributes the second superdiagonal.
    """
    n = grid.count - 1
    h = grid.step
    c = 1.0 / (2.0 * h)
    sw = grid.sqrt_weights
    # diagonals u2, u1, d, l1 in the scipy (u..l) layout
    ab = np.zeros((4, n), dtype=np.complex128)
    ab[2, 0] = -1.5j / h
    ab[1, 1] = 2.0j / h * (sw[0] / sw[1])
    if n > 2:
        ab[1, 2:] = 1j * c * (sw[1:n - 1] / sw[2:n])
        ab[0, 2] = -0.5j / h * (sw[0] / sw[2])
    ab[3, :n - 1] = -1j * c * (sw[1:n] / sw[:n - 1])
    return ab


def _banded_matvec(ab: np.ndarray, g: np.ndarray) -> np.ndarray:
    out = ab[2] * g
    out[:-1] += ab[1, 1:] * g[1:]
    out[:-2] += ab[0, 2:] * g[2:]
    out[1:] += ab[3, :-1] * g[:-1]
    return out


def _solve_reduced_banded(grid: LineGrid, z: complex, rhs: np.ndarray) -> np.ndarray:
    ab = _banded_reduced(grid)
    ab[2, :] -= z
    g = sla.solve_banded((1, 2), ab, rhs)
    scale = max(float(np.linalg.norm(rhs)), np.finfo(float).tiny)
    residual = float(np.linalg.norm(_banded_matvec(ab, g) - rhs)) / scale
    if residual > SOLVE_TOL:
        raise ConditioningError("banded resolvent solve is ill-conditioned", residual)
    return g


def resolvent_solve(
    u0: LineField,
    t: float,
    z: complex,
    grid: LineGrid | None = None,
    tail_tol: float = SPECTRAL_TAIL_TOL,
) -> HalfLineSpectrum:
    """Solve (G - 2t L_{u0} - z) f = Pu0 and return fhat samples.

    Gauge variables remove the -2t*xi diagonal exactly; the decay closure
    ``ghat(Xi) = 0`` is eliminated, leaving a shifted square system.  At
    t = 0 the convolution coefficient 2t vanishes and the system is banded;
    otherwise a dense LU runs.
    """
    grid = grid or LineGrid()
    z = complex(z)
    if z.imag <= 0:
        raise DomainError(f"Im z = {z.imag:.6g} must be positive")
    _check_tail(u0, grid, tail_tol)
    n = grid.count
    rhs_full = _gauge_rhs(u0, t, grid)
    rhs = rhs_full[:n - 1]
    if t == 0.0:
        g = _solve_reduced_banded(grid, z, rhs)
        a_red = None
    else:
        a_full = _gauge_operator(u0, t, grid)
        a_red = a_full[:n - 1, :n - 1].copy()
        a_red[np.arange(n - 1), np.arange(n - 1)] -= z
        g = np.linalg.solve(a_red, rhs)
    if a_red is not None:
        scale = max(float(np.linalg.norm(rhs)), np.finfo(float).tiny)
        residual = float(np.linalg.norm(a_red @ g - rhs)) / scale
        if residual > SOLVE_TOL:
            raise ConditioningError("gauge resolvent solve is ill-conditioned", residual)
    g_full = np.append(g, 0.0)
    fhat = np.conj(_gauge_phase(grid, t)) * unweight_vector(g_full, grid)
    return grid.spectrum(fhat)


class ResolventEvaluator:
    """Many-z resolvent evaluations for one (u0, t, grid).

    At t = 0 every shift is a banded O(M) solve.  Otherwise a one-time
    Hessenberg reduction ``A = Q H Q*`` is computed and each shift costs one
    O(M^2) elimination of ``(H - z I)`` in the accelerated kernel.
    """

    def __init__(
        self,
        u0: LineField,
        t: float,
        grid: LineGrid | None = None,
        tail_tol: float = SPECTRAL_TAIL_TOL,
    ):
        self.grid = grid or LineGrid()
        self.t = float(t)
        _check_tail(u0, self.grid, tail_tol)
        n = self.grid.count
        self._rhs = _gauge_rhs(u0, self.t, self.grid)[:n - 1]
        self._phase_conj = np.conj(_gauge_phase(self.grid, self.t))
        if self.t == 0.0:
            self._hess = None
            self._q = None
        else:
            a_red = _gauge_operator(u0, self.t, self.grid)[:n - 1, :n - 1]
            hess, q = sla.hessenberg(a_red, calc_q=True)
            self._hess = np.ascontiguousarray(hess)
            self._q = q
            self._qh_rhs = q.conj().T @ self._rhs

    def hardy_solution(self, z: complex) -> HalfLineSpectrum:
        z = complex(z)
        if z.imag <= 0:
            raise DomainError(f"Im z = {z.imag:.6g} must be positive")
        if self._hess is None:
            g = _solve_reduced_banded(self.grid, z, self._rhs)
        else:
            y = hessenberg_solve_shifted(self._hess, z, self._qh_rhs)
            g = self._q @ y
        g_full = np.append(g, 0.0)
        fhat = self._phase_conj * unweight_vector(g_full, self.grid)
        return self.grid.spectrum(fhat)

    def value(self, z: complex) -> complex:
        """(1/2i pi) I+ of the resolvent output, extrapolated stencil."""
        f = self.hardy_solution(z)
        return iplus(f, extrapolate=True) / (2j * np.pi)
