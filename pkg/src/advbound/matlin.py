"""Dense hermitian linear algebra: Hadamard/tensor products, spectral
decompositions, norms, matrix square roots, and fidelity.

Matrices are plain numpy arrays (real symmetric or complex hermitian).
All functions are pure; nothing is mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERM_TOL = 1e-12
SQRT_CLAMP = 1e-9


class DimensionMismatchError(ValueError):
    pass


class DomainError(ValueError):
    pass


def require_hermitian(a: np.ndarray, tol: float = HERM_TOL) -> np.ndarray:
    """Validate hermitian symmetry entrywise (relative to the largest entry)."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.conj().T).max() > tol * scale:
        raise DomainError("matrix is not hermitian within tolerance")
    return a


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise (Schur) product."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor (Kronecker) product."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_power(a: np.ndarray, k: int) -> np.ndarray:
    out = np.asarray(a)
    for _ in range(k - 1):
        out = np.kron(out, a)
    return out


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigendecomposition of a hermitian matrix, eigenvalues descending.

    Columns of ``vectors`` are orthonormal eigenvectors with a deterministic
    phase: the first component of largest magnitude is made real positive.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def op_norm(self) -> float:
        return float(np.abs(self.values).max())

    @property
    def trace_norm(self) -> float:
        return float(np.abs(self.values).sum())

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        pivot = col[i]
        if np.abs(pivot) > 0:
            out[:, j] = col * (np.abs(pivot) / pivot)
    if np.isrealobj(vectors):
        out = out.real
    return out


def spectral(a: np.ndarray) -> SpectralDecomp:
    """Full eigendecomposition, eigenvalues sorted descending."""
    a = require_hermitian(a)
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(vals)[::-1]
    return SpectralDecomp(values=vals[order], vectors=_fix_phases(vecs[:, order]))


def op_norm(a: np.ndarray) -> float:
    return spectral(a).op_norm


def trace_norm(a: np.ndarray) -> float:
    return spectral(a).trace_norm


def min_eig(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(require_hermitian(a))[0])


def psd_check(a: np.ndarray, tol: float = 0.0) -> tuple[bool, float]:
    """Whether min eigenvalue >= -tol; returns (verdict, min eigenvalue)."""
    lo = min_eig(a)
    return lo >= -tol, lo


def mat_sqrt(a: np.ndarray) -> np.ndarray:
    """PSD square root; eigenvalues in [-1e-9, 0) are clamped to 0."""
    dec = spectral(a)
    lo = float(dec.values.min())
    if lo < -SQRT_CLAMP:
        raise DomainError(f"matrix is not PSD: min eigenvalue {lo:.3e}")
    vals = np.clip(dec.values, 0.0, None)
    return (dec.vectors * np.sqrt(vals)) @ dec.vectors.conj().T


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Tr sqrt(sqrt(rho) sigma sqrt(rho)) for unit-trace PSD rho, sigma."""
    rho = require_hermitian(rho)
    sigma = require_hermitian(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatchError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    for m in (rho, sigma):
        if abs(float(np.trace(m).real) - 1.0) > 1e-8:
            raise DomainError("state must have unit trace")
    r = mat_sqrt(rho)
    inner = r @ sigma @ r
    inner = (inner + inner.conj().T) / 2
    return float(min(1.0, np.trace(mat_sqrt(inner)).real))


def psd_fidelity(x: np.ndarray, y: np.ndarray) -> float:
    """Tr sqrt(sqrt(x) y sqrt(x)) without the unit-trace requirement."""
    r = mat_sqrt(x)
    inner = r @ np.asarray(y) @ r
    inner = (inner + inner.conj().T) / 2
    return float(np.trace(mat_sqrt(inner)).real)
