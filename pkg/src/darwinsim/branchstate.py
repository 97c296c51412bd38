"""Closed-form global state of two coupled qubits dephased by N spectator qubits.

The state is stored as four branches, one per computational basis state of
the system pair. Each branch carries a complex amplitude and the single
environment-qubit ket that every one of the N environment qubits shares in
that branch, so the 2^(N+2)-dimensional vector is never formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import matcore
from .matcore import CapacityError

LABELS = ("00", "01", "10", "11")
BITS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class ModelParams:
    theta1: float = np.pi / 6
    theta2: float = np.pi / 6
    J: float = 10.0
    Jz: float = 0.0
    Jse: float = 1.0
    N: int = 6
    t: float = np.pi / 4

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        vals = (self.theta1, self.theta2, self.J, self.Jz, self.Jse, self.t)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("parameters must be finite")
        if self.t < 0:
            raise ValueError(f"t must be nonnegative, got {self.t}")

    def replace(self, **changes) -> "ModelParams":
        d = dict(self.__dict__)
        d.update(changes)
        return ModelParams(**d)

    def angle_products(self) -> Tuple[float, float, float, float]:
        """(alpha, beta, gamma, delta) products of the initial qubit angles."""
        c1, s1 = np.cos(self.theta1), np.sin(self.theta1)
        c2, s2 = np.cos(self.theta2), np.sin(self.theta2)
        return c1 * c2, c1 * s2, s1 * c2, s1 * s2


DEFAULT_PRESET = ModelParams()


@dataclass(frozen=True)
class Branch:
    label: str
    amplitude: complex
    env_ket: np.ndarray

    @property
    def bits(self) -> Tuple[int, int]:
        return BITS[LABELS.index(self.label)]


@dataclass(frozen=True)
class BranchState:
    branches: Tuple[Branch, Branch, Branch, Branch]
    N: int

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([b.amplitude for b in self.branches], dtype=complex)

    @property
    def env_kets(self) -> np.ndarray:
        return np.array([b.env_ket for b in self.branches], dtype=complex)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def with_amplitudes(self, amps) -> "BranchState":
        """Copy with replaced amplitudes (no renormalisation); used for fault injection."""
        bs = tuple(Branch(b.label, complex(a), b.env_ket) for b, a in zip(self.branches, amps))
        return BranchState(bs, self.N)

    def to_vector(self) -> np.ndarray:
        """Explicit state vector in S1, S2, E_1..E_N order. Only for small N."""
        dim = 2 ** (self.N + 2)
        if dim > matcore.MAX_DIM:
            raise CapacityError(f"explicit vector of dimension {dim} exceeds cap")
        out = np.zeros(dim, dtype=complex)
        for b in self.branches:
            sys = np.zeros(4, dtype=complex)
            sys[LABELS.index(b.label)] = 1.0
            v = sys
            for _ in range(self.N):
                v = np.kron(v, b.env_ket)
            out += b.amplitude * v
        return out


@dataclass(frozen=True)
class SubsystemSelector:
    keep_s1: bool = False
    keep_s2: bool = False
    env_kept: int = 0

    def __post_init__(self):
        if self.env_kept < 0:
            raise ValueError("env_kept must be nonnegative")
        if not (self.keep_s1 or self.keep_s2 or self.env_kept > 0):
            raise ValueError("selector keeps nothing")

    @property
    def n_sys(self) -> int:
        return int(self.keep_s1) + int(self.keep_s2)

    def dims(self):
        return [2] * (self.n_sys + self.env_kept)


def select(spec: str, m: int = 0) -> SubsystemSelector:
    """Shorthand: ``select("s1s2", 3)`` keeps both system qubits and three env qubits."""
    spec = spec.lower()
    return SubsystemSelector("s1" in spec, "s2" in spec, m)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    dims: Tuple[int, ...]

    def __post_init__(self):
        m = self.matrix
        if m.shape[0] != int(np.prod(self.dims)):
            raise matcore.ShapeError("dims do not match matrix size")
        if matcore.hermiticity_residual(m) > matcore.HERMITIAN_TOL:
            raise matcore.ContractError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > 1e-10:
            raise matcore.ContractError(f"density matrix trace {np.trace(m).real:.12f} != 1")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        return matcore.clip_spectrum(matcore.eig_hermitian(self.matrix).eigenvalues)

    def reduce(self, keep) -> "DensityMatrix":
        keep = sorted(keep)
        mat = matcore.partial_trace(self.matrix, self.dims, keep)
        return DensityMatrix(mat, tuple(self.dims[k] for k in keep))


def build_state(p: ModelParams) -> BranchState:
    alpha, beta, gamma, delta = p.angle_products()
    jt, ph, st = p.J * p.t, np.exp(-1j * p.N * p.Jz * p.t), p.Jse * p.t
    amps = (
        ph * alpha,
        np.conj(ph) * (beta * np.cos(jt) - 1j * gamma * np.sin(jt)),
        np.conj(ph) * (gamma * np.cos(jt) - 1j * beta * np.sin(jt)),
        ph * delta,
    )
    r2 = np.sqrt(0.5)
    kick = np.exp(-2j * st)
    kets = (
        r2 * np.array([kick, np.conj(kick)]),
        r2 * np.array([1, 1], dtype=complex),
        r2 * np.array([1, 1], dtype=complex),
        r2 * np.array([np.conj(kick), kick]),
    )
    return BranchState(tuple(Branch(l, complex(a), k) for l, a, k in zip(LABELS, amps, kets)), int(p.N))


def _branch_index(i) -> int:
    return LABELS.index(i) if isinstance(i, str) else int(i)


def branch_env_overlap(s: BranchState, i, j, m: int) -> complex:
    """<env_j|env_i>^m for branches ``i`` and ``j`` (labels or indices)."""
    if not 0 <= m <= s.N:
        raise ValueError(f"m={m} outside [0, {s.N}]")
    return complex(_overlap_matrix(s, m)[_branch_index(i), _branch_index(j)])


def _overlap_matrix(s: BranchState, m: int) -> np.ndarray:
    """O[i, j] = <env_j|env_i>^m."""
    k = s.env_kets
    base = (k.conj() @ k.T).T  # base[i, j] = <k_j|k_i>
    # identical unit kets overlap to exactly 1; rounding here would grow like N * eps
    same = np.all(k[:, None, :] == k[None, :, :], axis=-1)
    base[same] = 1.0
    return base ** m


def _sys_mask(sel_bits) -> np.ndarray:
    """mask[i, j] = 1 if branches i and j agree on every listed system bit."""
    mask = np.ones((4, 4))
    for q in sel_bits:
        col = np.array([b[q] for b in BITS])
        mask *= col[:, None] == col[None, :]
    return mask


def _kept_sys_bits(sel: SubsystemSelector):
    return [q for q, keep in ((0, sel.keep_s1), (1, sel.keep_s2)) if keep]


def _traced_sys_bits(sel: SubsystemSelector):
    return [q for q, keep in ((0, sel.keep_s1), (1, sel.keep_s2)) if not keep]


def _coefficients(s: BranchState, sel: SubsystemSelector) -> np.ndarray:
    """A[i, j] = a_i a_j^* <traced_j|traced_i>."""
    if sel.env_kept > s.N:
        raise ValueError(f"selector keeps {sel.env_kept} env qubits, environment has {s.N}")
    a = s.amplitudes
    return np.outer(a, a.conj()) * _sys_mask(_traced_sys_bits(sel)) * _overlap_matrix(s, s.N - sel.env_kept)


def reduce(s: BranchState, sel: SubsystemSelector) -> DensityMatrix:
    """Explicit reduced density matrix (kept subsystems in S1, S2, E_1.. order)."""
    dim = 2 ** (sel.n_sys + sel.env_kept)
    if dim > matcore.MAX_DIM:
        raise CapacityError(
            f"reduction of dimension {dim} exceeds cap {matcore.MAX_DIM}; use reduced_spectrum instead"
        )
    coeff = _coefficients(s, sel)
    kept_bits = _kept_sys_bits(sel)
    vecs = []
    for b, br in zip(BITS, s.branches):
        v = np.ones(1, dtype=complex)
        for q in kept_bits:
            v = np.kron(v, np.eye(2)[b[q]])
        for _ in range(sel.env_kept):
            v = np.kron(v, br.env_ket)
        vecs.append(v)
    K = np.array(vecs).T  # columns are kept branch vectors
    rho = K @ coeff @ K.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho, tuple(sel.dims()))


def reduced_spectrum(s: BranchState, sel: SubsystemSelector) -> np.ndarray:
    """Spectrum of the reduction from a 4x4 problem, valid for any N.

    With kept branch vectors |k_i> and coefficients A, the reduction is
    K A K^dagger; its nonzero spectrum equals that of G^1/2 A G^1/2 with
    G = K^dagger K.
    """
    coeff = _coefficients(s, sel)
    gram = _sys_mask(_kept_sys_bits(sel)) * _overlap_matrix(s, sel.env_kept).T  # G[i, j] = <k_i|k_j>
    gram = (gram + gram.conj().T) / 2
    root = matcore.psd_sqrt(gram)
    small = root @ coeff @ root
    small = (small + small.conj().T) / 2
    return matcore.clip_spectrum(matcore.eig_hermitian(small).eigenvalues)
