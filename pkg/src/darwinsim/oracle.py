"""Brute-force evolution in the full 2^(N+2)-dimensional space.

Used to validate the branch representation and to explore Jx != Jy, where the
system-system and system-environment Hamiltonians stop commuting.

Coupling convention: the S1-S2 term is assembled as
``(Jx/2) XX + (Jy/2) YY + (N Jz) ZZ``. With Jx = Jy = J this gives exactly the
cos(Jt) population exchange and exp(-/+ i N Jz t) phases of the branch form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import matcore
from .branchstate import DensityMatrix, ModelParams
from .matcore import I2, SX, SY, SZ, CapacityError

MAX_ENV = 8


@dataclass(frozen=True)
class DenseParams:
    theta1: float = np.pi / 6
    theta2: float = np.pi / 6
    Jx: float = 10.0
    Jy: float = 10.0
    Jz: float = 0.0
    Jse: float = 1.0
    N: int = 6
    t: float = np.pi / 4

    def __post_init__(self):
        if self.N > MAX_ENV:
            raise CapacityError(f"dense evolution capped at N={MAX_ENV}, got {self.N}")
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.t < 0:
            raise ValueError("t must be nonnegative")

    @classmethod
    def from_model(cls, p: ModelParams, Jx: Optional[float] = None, Jy: Optional[float] = None):
        return cls(p.theta1, p.theta2, p.J if Jx is None else Jx, p.J if Jy is None else Jy,
                   p.Jz, p.Jse, p.N, p.t)


def _site_op(op, site: int, n_sites: int) -> np.ndarray:
    return matcore.tensor_all([op if k == site else I2 for k in range(n_sites)])


def hamiltonian(p: DenseParams) -> np.ndarray:
    n = p.N + 2
    h = (p.Jx / 2) * _site_op(SX, 0, n) @ _site_op(SX, 1, n)
    h = h + (p.Jy / 2) * _site_op(SY, 0, n) @ _site_op(SY, 1, n)
    h = h + (p.N * p.Jz) * _site_op(SZ, 0, n) @ _site_op(SZ, 1, n)
    z_sys = _site_op(SZ, 0, n) + _site_op(SZ, 1, n)
    for k in range(p.N):
        h = h + p.Jse * z_sys @ _site_op(SZ, 2 + k, n)
    return h


def initial_state(p: DenseParams) -> np.ndarray:
    phi1 = np.array([np.cos(p.theta1), np.sin(p.theta1)], dtype=complex)
    phi2 = np.array([np.cos(p.theta2), np.sin(p.theta2)], dtype=complex)
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    v = np.kron(phi1, phi2)
    for _ in range(p.N):
        v = np.kron(v, plus)
    return v


def dense_evolve(p: DenseParams) -> np.ndarray:
    psi0 = initial_state(p)
    if p.t == 0:
        return psi0
    u = matcore.expm_hermitian_generator(hamiltonian(p), p.t)
    psi = u @ psi0
    return psi / np.linalg.norm(psi)


def dense_reduce(psi, dims: Sequence[int], keep) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size != int(np.prod(dims)):
        raise matcore.ShapeError(f"state of size {psi.size} does not match dims {list(dims)}")
    keep = sorted(keep)
    # contract the ket directly instead of forming |psi><psi|
    t = psi.reshape(dims)
    drop = [i for i in range(len(dims)) if i not in keep]
    t = np.transpose(t, keep + drop).reshape(int(np.prod([dims[k] for k in keep])), -1)
    rho = t @ t.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho, tuple(dims[k] for k in keep))


def fidelity(psi, phi) -> float:
    return float(abs(np.vdot(psi, phi)) ** 2)


def selector_keep(sel) -> list:
    """Subsystem indices (S1=0, S2=1, E_k=1+k) matching a SubsystemSelector."""
    keep = [i for i, k in ((0, sel.keep_s1), (1, sel.keep_s2)) if k]
    return keep + list(range(2, 2 + sel.env_kept))


class DenseState:
    """Explicit state vector exposing the same reduction surface as a BranchState."""

    def __init__(self, psi, N: int):
        self.psi = np.asarray(psi, dtype=complex)
        self.N = int(N)
        if self.psi.size != 2 ** (self.N + 2):
            raise matcore.ShapeError(f"vector of size {self.psi.size} is not a {self.N}-qubit-environment state")

    @classmethod
    def evolve(cls, p: DenseParams) -> "DenseState":
        return cls(dense_evolve(p), p.N)

    def reduce(self, sel) -> DensityMatrix:
        if sel.env_kept > self.N:
            raise ValueError(f"selector keeps {sel.env_kept} env qubits, environment has {self.N}")
        return dense_reduce(self.psi, [2] * (self.N + 2), selector_keep(sel))

    def reduced_spectrum(self, sel) -> np.ndarray:
        return self.reduce(sel).spectrum()
