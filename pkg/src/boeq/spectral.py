"""Discrete representations of fields on the torus and the line.

Conventions used throughout the package:

- Torus inner product ``<f|g> = (1/2pi) int_0^{2pi} f conj(g) dx`` so the
  exponentials ``e^{ikx}`` are orthonormal and coefficients are
  ``c_k = <u|e^{ikx}>``.
- A real field satisfies ``c_{-k} = conj(c_k)`` with real ``c_0``.
- The Hardy part of a field is the vector ``(c_0, ..., c_N)``.
- On the line, spectra are sampled on the half-line frequency grid
  ``xi_j = j*h``, ``j = 0..M``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import IngestionError, InvalidFieldError, LinearAlgebraError

TWO_PI = 2.0 * np.pi

SYMMETRY_TOL = 1e-12
UNITARY_TOL = 1e-12
EIG_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# torus types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusField:
    """Real periodic field stored as two-sided coefficients c_k, k = -N..N."""

    max_mode: int
    coeffs: np.ndarray  # complex128, length 2*max_mode + 1, index k + max_mode

    def __post_init__(self):
        if self.max_mode < 1:
            raise ValueError("max_mode must be >= 1")
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (2 * self.max_mode + 1,):
            raise ValueError("coeffs must have length 2*max_mode + 1")
        object.__setattr__(self, "coeffs", _readonly(c))

    @classmethod
    def zero(cls, max_mode: int) -> "TorusField":
        return cls(max_mode, np.zeros(2 * max_mode + 1, dtype=np.complex128))

    @classmethod
    def from_modes(cls, max_mode: int, modes: Mapping[int, complex]) -> "TorusField":
        """Build a real field from coefficients on modes k >= 0.

        Negative modes are filled with conjugates, so conjugate symmetry is
        exact by construction.  The k = 0 entry must be real.
        """
        c = np.zeros(2 * max_mode + 1, dtype=np.complex128)
        for k, val in modes.items():
            if k < 0:
                raise ValueError("specify modes k >= 0; negatives are implied")
            if k > max_mode:
                raise ValueError(f"mode {k} exceeds max_mode {max_mode}")
            if k == 0:
                if abs(complex(val).imag) > 0:
                    raise ValueError("c_0 must be real")
                c[max_mode] = complex(val).real
            else:
                c[max_mode + k] = val
                c[max_mode - k] = np.conj(val)
        return cls(max_mode, c)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.max_mode:
            return 0.0 + 0.0j
        return complex(self.coeffs[self.max_mode + k])

    def symmetry_defect(self) -> float:
        """Max deviation from c_{-k} = conj(c_k), including |Im c_0|."""
        c = self.coeffs
        return float(np.max(np.abs(c[::-1] - np.conj(c))))

    def effective_band(self, rel_tol: float = 1e-12) -> int:
        """Largest |k| whose coefficient exceeds rel_tol * max |c|."""
        mags = np.abs(self.coeffs)
        top = mags.max()
        if top == 0.0:
            return 0
        ks = np.abs(np.arange(-self.max_mode, self.max_mode + 1))
        live = mags > rel_tol * top
        return int(ks[live].max()) if live.any() else 0

    def scaled(self, factor: float) -> "TorusField":
        return TorusField(self.max_mode, self.coeffs * factor)


@dataclass(frozen=True)
class HardyTorusVector:
    """One-sided coefficient vector (v_0, ..., v_N) of a Hardy-space function."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a non-empty 1-d array")
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def dim(self) -> int:
        return self.coeffs.size

    @property
    def max_mode(self) -> int:
        return self.coeffs.size - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


# ---------------------------------------------------------------------------
# operator matrices
# ---------------------------------------------------------------------------

_TAGS = ("hermitian", "antihermitian", "unitary", "general")


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense truncated operator with a structural tag.

    Tags ``hermitian``/``antihermitian`` assert the symmetry *exactly*;
    constructors must therefore produce symmetric entries by construction
    (coefficient symmetrization, symmetric products), not by patching the
    matrix afterwards.  ``unitary`` is checked to ``UNITARY_TOL``.
    """

    entries: np.ndarray
    tag: str = "general"

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("entries must be a square matrix")
        if self.tag not in _TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")
        if self.tag == "hermitian" and not np.array_equal(a, a.conj().T):
            raise ValueError("hermitian tag requires exact A == A^dagger")
        if self.tag == "antihermitian" and not np.array_equal(a, -a.conj().T):
            raise ValueError("antihermitian tag requires exact A == -A^dagger")
        if self.tag == "unitary":
            defect = np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])))
            if defect > UNITARY_TOL:
                raise ValueError(f"unitary defect {defect:.3e} above {UNITARY_TOL:g}")
        object.__setattr__(self, "entries", _readonly(a))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def adjoint_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


@dataclass(frozen=True)
class EigenSystem:
    """Eigendecomposition of a Hermitian OperatorMatrix."""

    eigenvalues: np.ndarray
    eigenvectors: OperatorMatrix

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _readonly(np.asarray(self.eigenvalues, float)))


# ---------------------------------------------------------------------------
# line spectrum samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfLineSpectrum:
    """Samples of a line Hardy-space transform on xi_j = j*h, j = 0..M."""

    cutoff: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("values must be a 1-d array with at least 2 samples")
        m = v.size - 1
        if not np.isclose(self.cutoff, m * self.step, rtol=1e-12, atol=1e-12):
            raise ValueError("cutoff must equal M * step")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def xi(self) -> np.ndarray:
        return np.arange(self.size) * self.step

    def tail_fraction(self) -> float:
        top = float(np.max(np.abs(self.values)))
        if top == 0.0:
            return 0.0
        return float(np.abs(self.values[-1])) / top


# ---------------------------------------------------------------------------
# layout helpers
# ---------------------------------------------------------------------------

def to_fft_layout(coeffs: np.ndarray) -> np.ndarray:
    """Natural order (k = -N..N) -> numpy fft order (0..N, -N..-1)."""
    n = (coeffs.size - 1) // 2
    return np.concatenate([coeffs[n:], coeffs[:n]])


def from_fft_layout(cf: np.ndarray) -> np.ndarray:
    """Numpy fft order -> natural order (k = -N..N)."""
    n = (cf.size - 1) // 2
    return np.concatenate([cf[n + 1:], cf[:n + 1]])


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def project_hardy(u: TorusField, tol: float = SYMMETRY_TOL) -> HardyTorusVector:
    """Orthogonal projection onto non-negative modes: (c_0, ..., c_N)."""
    defect = u.symmetry_defect()
    if defect > tol:
        raise InvalidFieldError(
            f"conjugate-symmetry defect {defect:.3e} exceeds {tol:g}"
        )
    return HardyTorusVector(u.coeffs[u.max_mode:])


def synthesize_torus(p: HardyTorusVector, mean: float, n_samples: int) -> np.ndarray:
    """Samples of ``p + conj(p) - mean`` on the uniform grid of [0, 2pi).

    ``mean`` is the conserved zeroth coefficient of the underlying real field.
    """
    n_modes = p.max_mode
    if n_samples < 2 * n_modes + 1:
        raise ValueError(
            f"need at least {2 * n_modes + 1} samples to resolve {n_modes} modes"
        )
    spec = np.zeros(n_samples, dtype=np.complex128)
    spec[0] = p.coeffs[0] + np.conj(p.coeffs[0]) - mean
    if n_modes >= 1:
        spec[1:n_modes + 1] = p.coeffs[1:]
        spec[-n_modes:] = np.conj(p.coeffs[1:][::-1])
    samples = np.fft.ifft(spec) * n_samples
    residue = float(np.max(np.abs(samples.imag)))
    scale = max(1.0, float(np.max(np.abs(samples.real))))
    if residue > 1e-12 * scale:
        raise LinearAlgebraError("synthesis produced a non-real field", residue)
    return samples.real


def field_from_samples(samples: np.ndarray, max_mode: int | None = None) -> TorusField:
    """Discrete Fourier coefficients of real samples on a uniform [0, 2pi) grid.

    Uses ``c_k = (1/2pi) int u e^{-ikx} dx`` realized as an FFT; conjugate
    symmetry is enforced exactly by averaging ``c_k`` with ``conj(c_{-k})``.
    """
    s = np.asarray(samples)
    if not np.all(np.isfinite(s)):
        raise IngestionError("samples contain non-finite values")
    s = s.astype(np.float64)
    n = s.size
    if max_mode is None:
        max_mode = (n - 2) // 2
    if max_mode < 1:
        raise IngestionError("too few samples for a single mode")
    if n < 2 * max_mode + 2:
        raise IngestionError(
            f"need at least {2 * max_mode + 2} samples for max_mode {max_mode}"
        )
    spec = np.fft.fft(s) / n
    ks = np.arange(max_mode + 1)
    pos = 0.5 * (spec[ks] + np.conj(spec[(-ks) % n]))
    pos[0] = pos[0].real
    c = np.empty(2 * max_mode + 1, dtype=np.complex128)
    c[max_mode:] = pos
    c[:max_mode] = np.conj(pos[1:][::-1])
    return TorusField(max_mode, c)


def eigen_system(a: OperatorMatrix, tol: float = EIG_TOL) -> EigenSystem:
    """Hermitian eigendecomposition with a reconstruction residual check."""
    if a.tag != "hermitian":
        raise ValueError("eigen_system requires a hermitian-tagged matrix")
    w, v = np.linalg.eigh(a.entries)
    scale = max(float(np.max(np.abs(a.entries))), np.finfo(float).tiny)
    residual = float(np.max(np.abs((v * w) @ v.conj().T - a.entries)))
    if residual > tol * scale:
        raise LinearAlgebraError("eigendecomposition residual above tolerance", residual)
    return EigenSystem(w, OperatorMatrix(v, tag="unitary"))


def hermitian_evolution(a: OperatorMatrix, tau: float, tol: float = EIG_TOL) -> OperatorMatrix:
    """Unitary ``exp(i tau A)`` of a Hermitian matrix via eigendecomposition."""
    es = eigen_system(a, tol=tol)
    v = es.eigenvectors.entries
    u = (v * np.exp(1j * tau * es.eigenvalues)) @ v.conj().T
    return OperatorMatrix(u, tag="unitary")
