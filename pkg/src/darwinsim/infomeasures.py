"""Entropies, mutual information, coherence, Holevo information and discord.

All logarithms are base 2, so every information quantity is in bits.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize

from . import matcore
from .branchstate import BranchState, DensityMatrix, SubsystemSelector, reduce, reduced_spectrum
from .matcore import ContractError

GRID_SIZE = 64


class UnsupportedMeasurementError(ValueError):
    pass


@dataclass(frozen=True)
class MeasurementBasis:
    theta: float
    phi: float

    def kets(self) -> np.ndarray:
        """Rows are the two orthonormal measurement kets."""
        c, s = np.cos(self.theta / 2), np.sin(self.theta / 2)
        e = np.exp(1j * self.phi)
        return np.array([[c, e * s], [-np.conj(e) * s, c]], dtype=complex)

    def projectors(self) -> np.ndarray:
        k = self.kets()
        return np.einsum("ki,kj->kij", k, k.conj())


@dataclass(frozen=True)
class DiscordResult:
    mutual_info: float
    holevo: float
    discord: float
    optimal_basis: MeasurementBasis


def entropy(spectrum) -> float:
    w = np.asarray(spectrum, dtype=float)
    w = matcore.clip_spectrum(w)
    if abs(w.sum() - 1) > 1e-9:
        raise ContractError(f"spectrum sums to {w.sum():.12f}, expected 1")
    w = w[w > 0]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def entropy_of(rho) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else matcore.as_matrix(rho)
    return entropy(matcore.eig_hermitian(m).eigenvalues)


def _spectrum(s, sel: SubsystemSelector) -> np.ndarray:
    if isinstance(s, BranchState):
        return reduced_spectrum(s, sel)
    return s.reduced_spectrum(sel)  # oracle.DenseState


def _reduce(s, sel: SubsystemSelector) -> DensityMatrix:
    return reduce(s, sel) if isinstance(s, BranchState) else s.reduce(sel)


def state_entropy(s, sel: SubsystemSelector) -> float:
    """Entropy of a reduction of a BranchState (Gram path) or an oracle DenseState."""
    return entropy(_spectrum(s, sel))


def _union(a: SubsystemSelector, b: SubsystemSelector, n_env: int) -> SubsystemSelector:
    if (a.keep_s1 and b.keep_s1) or (a.keep_s2 and b.keep_s2):
        raise ValueError("selectors share a system qubit")
    if a.env_kept + b.env_kept > n_env:
        raise ValueError(f"selectors need {a.env_kept + b.env_kept} env qubits, environment has {n_env}")
    return SubsystemSelector(a.keep_s1 or b.keep_s1, a.keep_s2 or b.keep_s2, a.env_kept + b.env_kept)


def mutual_information(s, sel_a: SubsystemSelector, sel_b: SubsystemSelector) -> float:
    """I(A:B) = S(A) + S(B) - S(AB).

    Environment qubits of the two selectors are taken as disjoint blocks; by
    permutation symmetry of the environment only their sizes matter.
    """
    joint = _union(sel_a, sel_b, s.N)
    return state_entropy(s, sel_a) + state_entropy(s, sel_b) - state_entropy(s, joint)


def matrix_mutual_information(rho: DensityMatrix, part_a) -> float:
    """I(A:B) for an explicit matrix, with A the listed subsystems and B the rest."""
    part_a = sorted(part_a)
    part_b = [i for i in range(len(rho.dims)) if i not in part_a]
    return entropy_of(rho.reduce(part_a)) + entropy_of(rho.reduce(part_b)) - entropy_of(rho)


def l1_coherence(rho) -> float:
    """Sum of |rho_ij| over one triangle (i > j)."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else matcore.as_matrix(rho)
    return float(np.sum(np.abs(np.tril(m, -1))))


# -- discord ---------------------------------------------------------------

def _bloch_kets(theta, phi) -> np.ndarray:
    """Outcome-0 kets for arrays of Bloch angles, shape (..., 2)."""
    theta, phi = np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
    return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def _unnormalised_entropy(sig: np.ndarray) -> np.ndarray:
    """p * S(sig / p) with p = tr sig, batched over leading axes."""
    d = sig.shape[-1]
    if d == 2:
        a, c = sig[..., 0, 0].real, sig[..., 1, 1].real
        b = np.abs(sig[..., 0, 1])
        tr = a + c
        rad = np.sqrt((a - c) ** 2 + 4 * b * b)
        lam = np.stack([(tr + rad) / 2, (tr - rad) / 2], axis=-1)
    else:
        lam = np.linalg.eigvalsh(sig)
        tr = lam.sum(axis=-1)
    return _unnormalised_entropy_from_eigs(lam, tr)


class _Conditional:
    """Averaged conditional entropy of B after a projective qubit measurement on A."""

    def __init__(self, blocks: np.ndarray):
        self.blocks = blocks  # (2, dB, 2, dB)
        self.rho_b = blocks[0, :, 0, :] + blocks[1, :, 1, :]

    def __call__(self, theta, phi) -> np.ndarray:
        n = _bloch_kets(theta, phi)
        d = self.blocks.shape[1]
        w = (n.conj()[..., :, None] * n[..., None, :]).reshape(-1, 4)  # conj(n_a) n_b, (a, b) row-major
        flat = np.transpose(self.blocks, (0, 2, 1, 3)).reshape(4, d * d)
        sig0 = (w @ flat).reshape(np.shape(theta) + (d, d))
        sig1 = self.rho_b - sig0
        return _unnormalised_entropy(sig0) + _unnormalised_entropy(sig1)

    def scalar(self):
        """Plain-float objective for the polishing step; numpy call overhead dominates otherwise."""
        if self.blocks.shape[1] != 2:
            return lambda x: float(self(x[0], x[1]))
        bl = self.blocks.tolist()
        rb = self.rho_b.tolist()

        def xlog(v):
            return v * math.log2(v) if v > 0 else 0.0

        def part(a, c, b):
            tr = a + c
            rad = math.sqrt((a - c) ** 2 + 4 * b * b)
            return xlog(tr) - xlog((tr + rad) / 2) - xlog((tr - rad) / 2)

        b00, b01, b10, b11 = (bl[a][0][b][0] for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)))
        c00, c01, c10, c11 = (bl[a][1][b][1] for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)))
        o00, o01, o10, o11 = (bl[a][0][b][1] for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)))
        r00, r11, r01 = rb[0][0].real, rb[1][1].real, rb[0][1]

        def f(x):
            ct, st = math.cos(x[0] / 2), math.sin(x[0] / 2)
            e = cmath.exp(1j * x[1])
            cc, ss, cs, cs_c = ct * ct, st * st, ct * st * e, ct * st * e.conjugate()
            # sig0 = sum_ab conj(n_a) n_b B[a, :, b, :] with n = (ct, e st)
            d0 = (cc * b00 + cs * b01 + cs_c * b10 + ss * b11).real
            d1 = (cc * c00 + cs * c01 + cs_c * c10 + ss * c11).real
            off = cc * o00 + cs * o01 + cs_c * o10 + ss * o11
            return part(d0, d1, abs(off)) + part(r00 - d0, r11 - d1, abs(r01 - off))

        return f


def _measured_first(rho: DensityMatrix, measured_side: int) -> np.ndarray:
    dims = list(rho.dims)
    if not 0 <= measured_side < len(dims):
        raise ValueError(f"measured_side {measured_side} outside {len(dims)} subsystems")
    if dims[measured_side] != 2:
        raise UnsupportedMeasurementError(
            f"measured subsystem has dimension {dims[measured_side]}; only qubit measurements are supported"
        )
    k = len(dims)
    order = [measured_side] + [i for i in range(k) if i != measured_side]
    t = rho.matrix.reshape(dims + dims)
    t = np.transpose(t, order + [k + i for i in order])
    d_b = rho.dim // 2
    return t.reshape(2, d_b, 2, d_b)


def discord_measured_on_qubit(rho: DensityMatrix, measured_side: int,
                              grid_size: int = GRID_SIZE) -> DiscordResult:
    """One-way discord with rank-1 projective measurements on a qubit subsystem.

    The unmeasured side is every other subsystem of ``rho``. The measurement
    direction is found on a ``grid_size`` x ``grid_size`` Bloch-angle grid and
    polished with Nelder-Mead.
    """
    blocks = _measured_first(rho, measured_side)
    if blocks.shape[1] > 2 ** 6:
        raise UnsupportedMeasurementError("unmeasured side larger than 2^6")
    cond = _Conditional(blocks)

    thetas = np.linspace(0.0, np.pi, grid_size)
    phis = np.linspace(0.0, 2 * np.pi, grid_size, endpoint=False)
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    vals = cond(tg, pg)
    order = np.argsort(vals, axis=None)

    objective = cond.scalar()
    # the objective is symmetric under swapping outcomes, (theta, phi) -> (pi - theta, phi + pi),
    # so polish from the best grid point and from the best point that is not its mirror
    starts = [np.unravel_index(order[0], vals.shape)]
    i0, j0 = starts[0]
    mirror = (grid_size - 1 - i0, (j0 + grid_size // 2) % grid_size)
    for idx in order[1:4]:
        ij = np.unravel_index(idx, vals.shape)
        if ij != mirror:
            starts.append(ij)
            break
    step = np.pi / grid_size
    best_val, best_x = np.inf, None
    for i, j in starts:
        x0 = np.array([tg[i, j], pg[i, j]])
        simplex = x0 + np.array([[0.0, 0.0], [step, 0.0], [0.0, step]])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": 1e-6, "fatol": 1e-12, "maxiter": 4000, "initial_simplex": simplex})
        val, x = (res.fun, res.x) if res.fun < vals[i, j] else (vals[i, j], x0)
        if val < best_val:
            best_val, best_x = val, x

    s_b = entropy(matcore.eig_hermitian(cond.rho_b).eigenvalues)
    holevo = s_b - float(best_val)
    mi = matrix_mutual_information(rho, [measured_side])
    theta, phi = _canonical_angles(*best_x)
    return DiscordResult(mi, holevo, mi - holevo, MeasurementBasis(theta, phi))


def _canonical_angles(theta: float, phi: float):
    theta = float(np.mod(theta, 2 * np.pi))
    if theta > np.pi:
        theta, phi = 2 * np.pi - theta, phi + np.pi
    return theta, float(np.mod(phi, 2 * np.pi))


# -- gap identity and bounds -------------------------------------------------

class DeltaI(NamedTuple):
    lhs: float
    rhs: float


class KWGap(NamedTuple):
    lower: float
    upper: Optional[float]
    delta: float


def _mi_with_env(s, sys_sel: SubsystemSelector, m: int) -> float:
    return mutual_information(s, sys_sel, SubsystemSelector(env_kept=m)) if m > 0 else 0.0


def delta_I(s, m: int) -> DeltaI:
    """Both sides of the gap identity for an environment fraction of size m.

    lhs = I(S1S2:E_f) - I(S1:E_f), rhs = I(S2:E) - I(S2:complement of E_f).
    """
    if not 0 <= m <= s.N:
        raise ValueError(f"m={m} outside [0, {s.N}]")
    s1s2, s1, s2 = SubsystemSelector(True, True), SubsystemSelector(True), SubsystemSelector(False, True)
    lhs = _mi_with_env(s, s1s2, m) - _mi_with_env(s, s1, m)
    rhs = _mi_with_env(s, s2, s.N) - _mi_with_env(s, s2, s.N - m)
    return DeltaI(lhs, rhs)


def backward_discord(s, grid_size: int = GRID_SIZE) -> DiscordResult:
    """Discord of rho_{S1S2:E1} with the measurement on E1."""
    return discord_measured_on_qubit(_reduce(s, SubsystemSelector(True, True, 1)), 2, grid_size)


def kw_gap_bounds(s, m: int) -> KWGap:
    """0 <= Delta I <= S(rho_S1S2) + D<-(rho_S1S2:E_f); upper is None unless m == 1."""
    delta = delta_I(s, m).lhs
    upper = None
    if m == 1:
        upper = state_entropy(s, SubsystemSelector(True, True)) + backward_discord(s).discord
    return KWGap(0.0, upper, delta)


# -- Koashi-Winter equality check ---------------------------------------------

def concurrence(rho) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else matcore.as_matrix(rho)
    yy = np.kron(matcore.SY, matcore.SY)
    r = m @ yy @ m.conj() @ yy
    lam = np.sqrt(np.clip(np.sort(np.linalg.eigvals(r).real)[::-1], 0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _binary_entropy(p: float) -> float:
    return entropy([p, 1 - p]) if 0 < p < 1 else 0.0


def entanglement_of_formation(rho) -> float:
    """Two-qubit entanglement of formation from the concurrence."""
    c = concurrence(rho)
    return _binary_entropy((1 + np.sqrt(max(0.0, 1 - c * c))) / 2)


def min_average_entanglement(rho, n_elements: int = 4, restarts: int = 3, seed: int = 0) -> float:
    """Minimum over n-element pure-state decompositions of a two-qubit state of
    the average entropy of the first qubit's reduced state.

    Decompositions are generated from the eigen-decomposition by n x r
    isometries. For a pure tripartite state this is S(A) - J<-(rho_AC), the
    Holevo quantity with rank-1 measurements on the purifying party.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else matcore.as_matrix(rho)
    spec = matcore.eig_hermitian(m)
    w = matcore.clip_spectrum(spec.eigenvalues)
    keep = w > 1e-14
    v = spec.eigenvectors[:, keep] * np.sqrt(w[keep])  # columns: subnormalised eigenvectors
    r = v.shape[1]
    n = max(n_elements, r)

    def avg(x):
        z = (x[: n * r] + 1j * x[n * r:]).reshape(n, r)
        q, _ = np.linalg.qr(z)
        states = (q @ v.T).reshape(n, 2, 2)  # row k: sum_j U_kj v_j as a 2x2 coefficient matrix
        sv = np.linalg.svd(states, compute_uv=False) ** 2
        p = sv.sum(axis=1)
        return float(_unnormalised_entropy_from_eigs(sv, p).sum())

    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(restarts):
        res = minimize(avg, rng.normal(size=2 * n * r), method="BFGS", options={"gtol": 1e-12})
        res = minimize(avg, res.x, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
        best = min(best, res.fun)
    return float(best)


def _unnormalised_entropy_from_eigs(lam, p) -> np.ndarray:
    lam = np.clip(lam, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        xlogx = np.where(lam > 0, lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0)
        plogp = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -xlogx.sum(axis=-1) + plogp
