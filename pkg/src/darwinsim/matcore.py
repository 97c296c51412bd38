"""Dense complex-matrix kernel.

Everything here works on plain ``numpy`` arrays. Residuals are measured in
the entrywise max-norm throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
EIG_CLIP = -1e-12
MAX_DIM = 2 ** 14

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


class ShapeError(ValueError):
    pass


class ContractError(ValueError):
    pass


class CapacityError(ValueError):
    pass


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractError("matrix has non-finite entries")
    return m


def max_norm(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermiticity_residual(a) -> float:
    a = np.asarray(a)
    return max_norm(a - a.conj().T)


@dataclass(frozen=True)
class HermitianSpectrum:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns match eigenvalues

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def tensor(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > MAX_DIM:
        raise CapacityError(f"tensor product of dimension {rows}x{cols} exceeds cap {MAX_DIM}")
    return np.kron(a, b)


def tensor_all(mats: Sequence) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = tensor(out, m)
    return out


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists subsystem dimensions in tensor order; the kept subsystems
    stay in their original relative order.
    """
    rho = as_matrix(rho)
    dims = [int(d) for d in dims]
    n = rho.shape[0]
    if rho.shape[0] != rho.shape[1]:
        raise ShapeError("partial_trace needs a square matrix")
    if int(np.prod(dims)) != n:
        raise ShapeError(f"dims {dims} do not multiply to {n}")
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise ShapeError(f"invalid keep set {keep} for {len(dims)} subsystems")

    k = len(dims)
    t = rho.reshape(dims + dims)
    drop = [i for i in range(k) if i not in keep]
    # trace pairs from the highest axis down so remaining axis numbers stay valid
    for i in sorted(drop, reverse=True):
        nleft = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + nleft)
    d = int(np.prod([dims[i] for i in keep]))
    return t.reshape(d, d)


def eig_hermitian(a) -> HermitianSpectrum:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError("eig_hermitian needs a square matrix")
    if hermiticity_residual(a) > HERMITIAN_TOL:
        raise ContractError(f"matrix is not Hermitian (residual {hermiticity_residual(a):.3e})")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return HermitianSpectrum(w[::-1].copy(), v[:, ::-1].copy())


def clip_spectrum(w) -> np.ndarray:
    """Zero eigenvalues in [EIG_CLIP, 0); anything more negative is an error."""
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < EIG_CLIP:
        raise ContractError(f"eigenvalue {w.min():.3e} below clip threshold {EIG_CLIP}")
    return np.where(w < 0, 0.0, w)


def psd_sqrt(a) -> np.ndarray:
    spec = eig_hermitian(a)
    w = np.sqrt(clip_spectrum(spec.eigenvalues))
    v = spec.eigenvectors
    return (v * w) @ v.conj().T


def expm_hermitian_generator(h, t: float) -> np.ndarray:
    """Return exp(-i h t) for Hermitian ``h``."""
    spec = eig_hermitian(h)
    v = spec.eigenvectors
    phases = np.exp(-1j * spec.eigenvalues * t)
    return (v * phases) @ v.conj().T


def commutator_residual(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ShapeError(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return max_norm(a @ b - b @ a)


def normality_residual(a) -> float:
    a = as_matrix(a)
    return commutator_residual(a, a.conj().T)


def is_normal(a, tol: float = 1e-10) -> bool:
    return normality_residual(a) <= tol
