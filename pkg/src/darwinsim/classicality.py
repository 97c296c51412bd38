"""Objectivity and classicality verdicts for the system pair and one environment qubit.

Zero one-way discord is certified by block structure: writing rho_{S1S2E1}
in blocks indexed by the measured side, the blocks must be normal and commute
pairwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from . import matcore
from .branchstate import BranchState, DensityMatrix, SubsystemSelector
from .infomeasures import mutual_information, state_entropy

NULLITY_TOL = 1e-8
PLATEAU_TOL = 1e-3


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class BlockDecomposition:
    blocks_sys: np.ndarray  # (2, 2, 4, 4): [i, j] is the S1S2 operator paired with |e_i><e_j|
    blocks_env: np.ndarray  # (4, 4, 2, 2): [k, l] is the E1 operator paired with |s_k><s_l|

    def reassemble_sys(self) -> np.ndarray:
        return np.transpose(self.blocks_sys, (2, 0, 3, 1)).reshape(8, 8)

    def reassemble_env(self) -> np.ndarray:
        return np.transpose(self.blocks_env, (0, 2, 1, 3)).reshape(8, 8)


@dataclass(frozen=True)
class ClassicalityReport:
    max_residual_forward: float
    max_residual_backward: float
    forward_classical: bool
    backward_classical: bool
    tolerance: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class PlateauReport:
    fraction_curve: List[Tuple[float, float]]
    plateau_detected: bool
    plateau_level: float
    deviation: float
    tolerance: float = PLATEAU_TOL

    def to_dict(self) -> dict:
        return {
            "fraction_curve": [list(p) for p in self.fraction_curve],
            "plateau_detected": self.plateau_detected,
            "plateau_level": self.plateau_level,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
        }


def decompose(rho) -> BlockDecomposition:
    m = rho.matrix if isinstance(rho, DensityMatrix) else matcore.as_matrix(rho)
    if m.shape != (8, 8):
        raise matcore.ShapeError(f"expected an 8x8 S1S2E1 matrix, got {m.shape}")
    if isinstance(rho, DensityMatrix) and int(np.prod(rho.dims[:-1])) != 4:
        raise matcore.ShapeError(f"expected dims (4, 2) or (2, 2, 2), got {rho.dims}")
    t = m.reshape(4, 2, 4, 2)  # (sys, env, sys', env')
    blocks_sys = np.transpose(t, (1, 3, 0, 2)).copy()
    blocks_env = np.transpose(t, (0, 2, 1, 3)).copy()
    return BlockDecomposition(blocks_sys, blocks_env)


def family_residual(blocks) -> float:
    """Largest normality or pairwise-commutator residual over a block family."""
    b = np.asarray(blocks, dtype=complex)
    b = b.reshape((-1,) + b.shape[-2:])
    prod = np.einsum("pij,qjk->pqik", b, b)
    comm = np.max(np.abs(prod - np.transpose(prod, (1, 0, 2, 3))))
    bh = np.conj(np.transpose(b, (0, 2, 1)))
    norm = np.max(np.abs(b @ bh - bh @ b))
    return float(max(comm, norm))


def nullity_certificate(bd: BlockDecomposition, tol: float = NULLITY_TOL) -> ClassicalityReport:
    fwd = family_residual(bd.blocks_sys)
    bwd = family_residual(bd.blocks_env)
    return ClassicalityReport(fwd, bwd, fwd <= tol, bwd <= tol, tol)


def mi_fraction_curve(s: BranchState, system: SubsystemSelector) -> List[Tuple[float, float]]:
    """(f, I(system : E_f) / S(system)) for f = m/N, m = 1..N."""
    s_sys = state_entropy(s, system)
    if s_sys < 1e-12:
        raise DegenerateInputError("system entropy is zero; no information to proliferate")
    return [(m / s.N, mutual_information(s, system, SubsystemSelector(env_kept=m)) / s_sys)
            for m in range(1, s.N + 1)]


def detect_plateau(s: BranchState, tol: float = PLATEAU_TOL) -> PlateauReport:
    if s.N < 3:
        raise ValueError("plateau detection needs N >= 3")
    curve = mi_fraction_curve(s, SubsystemSelector(True, True))
    interior = np.array([v for _, v in curve[:-1]])
    deviation = float(np.max(np.abs(interior - 1)))
    return PlateauReport(curve, deviation <= tol, float(interior.mean()), deviation, tol)
