import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darwinsim import matcore
from darwinsim.branchstate import DEFAULT_PRESET, build_state, reduce, select
from darwinsim.matcore import I2, SX, SY, SZ


def rand_herm(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def rand_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def test_tensor_examples():
    assert np.allclose(matcore.tensor(I2, I2), np.eye(4))
    assert np.allclose(matcore.tensor(SZ, SZ), np.diag([1, -1, -1, 1]))
    # <00| X (x) Y |11> = X[0,1] * Y[0,1] = 1 * (-i)
    assert matcore.tensor(SX, SY)[0, 3] == -1j




def test_tensor_capacity_exceeded():
    with pytest.raises(matcore.CapacityError):
        matcore.tensor(np.eye(2 ** 8), np.eye(2 ** 7))


def test_partial_trace_bell():
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(phi, phi)
    assert np.allclose(matcore.partial_trace(rho, [2, 2], [0]), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_product(rng):
    ra, rb = rand_density(rng, 2), rand_density(rng, 3)
    out = matcore.partial_trace(np.kron(ra, rb), [2, 3], [0])
    assert np.max(np.abs(out - ra)) < 1e-12
    out = matcore.partial_trace(np.kron(ra, rb), [2, 3], [1])
    assert np.max(np.abs(out - rb)) < 1e-12


def test_partial_trace_plateau_gives_x_state(angles):
    a, b, g, d = angles
    rho = reduce(build_state(DEFAULT_PRESET), select("s1s2", 1)).matrix
    out = matcore.partial_trace(rho, [2, 2, 2], [0, 1])
    expected = np.array([[a * a, 0, 0, a * d], [0, b * b, b * g, 0], [0, b * g, g * g, 0], [a * d, 0, 0, d * d]])
    assert np.max(np.abs(out - expected)) < 1e-12


def test_partial_trace_shape_errors():
    with pytest.raises(matcore.ShapeError):
        matcore.partial_trace(np.eye(4), [2, 3], [0])
    with pytest.raises(matcore.ShapeError):
        matcore.partial_trace(np.eye(4), [2, 2], [])
    with pytest.raises(matcore.ShapeError):
        matcore.partial_trace(np.ones((4, 2)), [2, 2], [0])


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_partial_trace_composes(seed):
    rng = np.random.default_rng(seed)
    rho = rand_herm(rng, 8)
    rho = rho / np.max(np.abs(rho))
    one_shot = matcore.partial_trace(rho, [2, 2, 2], [0])
    two_step = matcore.partial_trace(matcore.partial_trace(rho, [2, 2, 2], [0, 1]), [2, 2], [0])
    assert np.max(np.abs(one_shot - two_step)) <= 1e-12
    assert abs(np.trace(one_shot) - np.trace(rho)) <= 1e-12


def test_eig_examples():
    assert np.allclose(matcore.eig_hermitian(np.diag([0.75, 0.25])).eigenvalues, [0.75, 0.25])
    a, d = 0.75, 0.25
    w = matcore.eig_hermitian(np.array([[a * a, a * d], [a * d, d * d]])).eigenvalues
    assert np.allclose(w, [5 / 8, 0], atol=1e-15)
    assert np.allclose(matcore.eig_hermitian(SX).eigenvalues, [1, -1])


def test_eig_rejects_non_hermitian():
    with pytest.raises(matcore.ContractError):
        matcore.eig_hermitian(np.array([[0, 1], [0, 0]]))


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=5))
def test_eig_reconstruction_and_orthonormality(seed, n):
    rng = np.random.default_rng(seed)
    a = rand_herm(rng, 2 ** n)
    a = a / np.max(np.abs(a))
    spec = matcore.eig_hermitian(a)
    v = spec.eigenvectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(len(a)))) <= 1e-10
    assert np.max(np.abs(spec.reconstruct() - a)) <= 1e-10
    assert abs(spec.eigenvalues.sum() - np.trace(a).real) <= 1e-10
    assert np.all(np.diff(spec.eigenvalues) <= 0)


def test_clip_spectrum():
    assert np.array_equal(matcore.clip_spectrum([0.5, -1e-13]), [0.5, 0.0])
    with pytest.raises(matcore.ContractError):
        matcore.clip_spectrum([1.0, -1e-6])


def test_expm_examples():
    assert np.allclose(matcore.expm_hermitian_generator(np.zeros((3, 3)), 1.7), np.eye(3))
    assert np.allclose(matcore.expm_hermitian_generator(SZ, np.pi / 2), np.diag([-1j, 1j]))
    h = np.kron(SX, SX) + np.kron(SY, SY)
    u = matcore.expm_hermitian_generator(h, np.pi / 4)
    ket01 = np.array([0, 1, 0, 0])
    assert np.allclose(u @ ket01, [0, 0, -1j, 0], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0, 5), st.floats(0, 5))
def test_expm_group_property_and_unitarity(seed, t1, t2):
    rng = np.random.default_rng(seed)
    h = rand_herm(rng, 4)
    u1 = matcore.expm_hermitian_generator(h, t1)
    u2 = matcore.expm_hermitian_generator(h, t2)
    u12 = matcore.expm_hermitian_generator(h, t1 + t2)
    assert np.max(np.abs(u1 @ u2 - u12)) <= 1e-9
    assert np.max(np.abs(u1.conj().T @ u1 - np.eye(4))) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_tensor_mixed_product(seed):
    rng = np.random.default_rng(seed)
    a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    lhs = matcore.tensor(a, b) @ matcore.tensor(c, d)
    rhs = matcore.tensor(a @ c, b @ d)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_commutator_examples():
    assert matcore.commutator_residual(SZ, SZ) == 0
    assert matcore.commutator_residual(SX, SZ) == pytest.approx(2)
    with pytest.raises(matcore.ShapeError):
        matcore.commutator_residual(SX, np.eye(3))


def _quadrants(rho):
    return {(i, j): rho[4 * i:4 * i + 4, 4 * j:4 * j + 4] for i in (0, 1) for j in (0, 1)}


def test_quadrant_blocks_of_the_plateau_matrix():
    # the 4x4 quadrants of rho_S1S2E1 written with S1S2 as the leading factor
    rho = reduce(build_state(DEFAULT_PRESET), select("s1s2", 1)).matrix
    q = _quadrants(rho)
    assert matcore.commutator_residual(q[0, 0], q[1, 1]) < 1e-15
    assert matcore.is_normal(q[0, 0]) and matcore.is_normal(q[1, 1])
    assert not matcore.is_normal(q[0, 1], tol=1e-8)


def test_is_normal():
    rng = np.random.default_rng(3)
    assert matcore.is_normal(rand_herm(rng, 4))
    assert not matcore.is_normal(np.array([[0, 1], [0, 0]]))
