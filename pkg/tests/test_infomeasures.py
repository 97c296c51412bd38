import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darwinsim import matcore
from darwinsim.branchstate import DEFAULT_PRESET, DensityMatrix, SubsystemSelector, build_state, reduce, select
from darwinsim.infomeasures import (UnsupportedMeasurementError, MeasurementBasis, backward_discord, concurrence,
                                    delta_I, discord_measured_on_qubit, entanglement_of_formation, entropy,
                                    kw_gap_bounds, l1_coherence, matrix_mutual_information,
                                    min_average_entanglement, mutual_information, state_entropy)
from darwinsim.oracle import DenseParams, DenseState
from darwinsim.verification import random_params

S_PLATEAU = -(5 / 8) * math.log2(5 / 8) - (3 / 8) * math.log2(3 / 8)
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def density(m, dims):
    return DensityMatrix(np.asarray(m, dtype=complex), dims)


def bell():
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return density(np.outer(phi, phi), (2, 2))


def random_mixed(rng, d, rank=None):
    a = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def test_entropy_examples():
    assert entropy([1, 0]) == 0
    assert entropy([0.5, 0.5]) == pytest.approx(1)
    assert entropy([5 / 8, 3 / 8]) == pytest.approx(0.95443, abs=1e-5)
    with pytest.raises(matcore.ContractError):
        entropy([1.1, -0.1])


def test_mutual_information_examples(plateau_state):
    s1s2 = SubsystemSelector(True, True)
    t0 = build_state(DEFAULT_PRESET.replace(t=0.0))
    assert abs(mutual_information(t0, s1s2, SubsystemSelector(env_kept=1))) < 1e-12
    mi = mutual_information(plateau_state, s1s2, SubsystemSelector(env_kept=1))
    assert abs(mi - S_PLATEAU) < 1e-9
    assert abs(state_entropy(plateau_state, s1s2) - S_PLATEAU) < 1e-12
    full = mutual_information(plateau_state, s1s2, SubsystemSelector(env_kept=6))
    assert abs(full - 2 * S_PLATEAU) < 1e-9


def test_mutual_information_overlap_error(plateau_state):
    with pytest.raises(ValueError):
        mutual_information(plateau_state, SubsystemSelector(True), SubsystemSelector(True, True))
    with pytest.raises(ValueError):
        mutual_information(plateau_state, SubsystemSelector(True, False, 4), SubsystemSelector(env_kept=3))


def test_matrix_mutual_information(plateau_state):
    rho = reduce(plateau_state, select("s1s2", 1))
    assert abs(matrix_mutual_information(rho, [0, 1]) - S_PLATEAU) < 1e-9
    assert matrix_mutual_information(bell(), [0]) == pytest.approx(2)


def test_coherence_examples(plateau_state):
    assert l1_coherence(np.diag([0.3, 0.7])) == 0
    assert abs(l1_coherence(reduce(plateau_state, select("s1s2"))) - 0.375) < 1e-9
    assert abs(l1_coherence(reduce(plateau_state, SubsystemSelector(env_kept=1))) - 0.125) < 1e-9


def test_measurement_basis_projectors():
    b = MeasurementBasis(0.7, 2.1)
    p = b.projectors()
    assert np.allclose(p[0] + p[1], np.eye(2))
    assert np.allclose(p[0] @ p[0], p[0])


def test_discord_bell():
    r = discord_measured_on_qubit(bell(), 0)
    assert r.mutual_info == pytest.approx(2, abs=1e-9)
    assert r.holevo == pytest.approx(1, abs=1e-6)
    assert r.discord == pytest.approx(1, abs=1e-6)


def test_discord_classical_states(rng):
    p = rng.dirichlet(np.ones(8))
    for side in range(3):
        assert abs(discord_measured_on_qubit(density(np.diag(p), (2, 2, 2)), side).discord) < 1e-9


def test_discord_plateau(plateau_state):
    r = reduce(plateau_state, SubsystemSelector(True, False, 1))
    assert discord_measured_on_qubit(r, 0).discord <= 1e-6
    fwd = discord_measured_on_qubit(reduce(plateau_state, select("s1s2")), 0).discord
    assert fwd > 1e-3
    back = discord_measured_on_qubit(reduce(plateau_state, select("s1s2", 1)), 2).discord
    assert back <= 1e-6


def test_discord_unsupported():
    with pytest.raises(UnsupportedMeasurementError):
        discord_measured_on_qubit(density(np.eye(8) / 8, (4, 2)), 0)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_discord_bounds(seed):
    rng = np.random.default_rng(seed)
    rho = density(random_mixed(rng, 4, rank=int(rng.integers(1, 5))), (2, 2))
    r = discord_measured_on_qubit(rho, int(rng.integers(0, 2)))
    assert r.holevo >= -1e-9
    assert r.discord >= -1e-9
    assert r.discord <= r.mutual_info + 1e-9


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_product_state_has_no_discord(seed):
    rng = np.random.default_rng(seed)
    rho = density(np.kron(random_mixed(rng, 2), random_mixed(rng, 4)), (2, 2, 2))
    assert abs(discord_measured_on_qubit(rho, 0).discord) < 1e-9


def test_discord_grid_refinement_stable():
    for t in (0.3, 0.6, np.pi / 4, 1.2):
        s = build_state(DEFAULT_PRESET.replace(t=t))
        for rho, side in ((reduce(s, select("s1s2")), 0), (reduce(s, SubsystemSelector(True, False, 1)), 0),
                          (reduce(s, select("s1s2", 1)), 2)):
            coarse = discord_measured_on_qubit(rho, side).discord
            fine = discord_measured_on_qubit(rho, side, grid_size=128).discord
            assert abs(coarse - fine) < 1e-6


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_nonnegativity_and_monotonicity(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(1, 40))
    s = build_state(random_params(rng, N).replace(t=float(rng.uniform(0, 3))))
    s1, s1s2 = SubsystemSelector(True), SubsystemSelector(True, True)
    for m in range(1, N + 1):
        env = SubsystemSelector(env_kept=m)
        big, small = mutual_information(s, s1s2, env), mutual_information(s, s1, env)
        assert small >= -1e-9 and state_entropy(s, env) >= -1e-9
        assert big >= small - 1e-9


def test_delta_examples(plateau_state):
    t0 = build_state(DEFAULT_PRESET.replace(t=0.0))
    for m in range(7):
        lhs, rhs = delta_I(t0, m)
        assert abs(lhs) < 1e-12 and abs(rhs) < 1e-12
    lhs, rhs = delta_I(plateau_state, 6)
    i_s2_env = mutual_information(plateau_state, SubsystemSelector(False, True), SubsystemSelector(env_kept=6))
    assert abs(rhs - i_s2_env) < 1e-9
    assert abs(lhs - rhs) < 1e-9
    with pytest.raises(ValueError):
        delta_I(plateau_state, 7)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_delta_identity_holds_for_non_commuting_dynamics(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng, 4).replace(t=float(rng.uniform(0, 2)))
    dense = DenseState.evolve(DenseParams.from_model(p, Jy=float(rng.uniform(-5, 5))))
    for m in range(5):
        lhs, rhs = delta_I(dense, m)
        assert abs(lhs - rhs) < 1e-9


def test_kw_examples(plateau_state):
    lower, upper, delta = kw_gap_bounds(build_state(DEFAULT_PRESET.replace(t=0.0)), 1)
    assert abs(delta) < 1e-12 and lower - 1e-9 <= delta <= upper + 1e-6
    lower, upper, delta = kw_gap_bounds(plateau_state, 1)
    assert abs(backward_discord(plateau_state).discord) < 1e-6
    assert abs(upper - 0.95443) < 1e-4
    assert lower - 1e-9 <= delta <= upper + 1e-6
    assert kw_gap_bounds(plateau_state, 2).upper is None


def test_kw_bound_random_times():
    rng = np.random.default_rng(11)
    p = random_params(rng, 6)
    for t in np.linspace(0, 2, 10):
        lower, upper, delta = kw_gap_bounds(build_state(p.replace(t=float(t))), 1)
        assert lower - 1e-6 <= delta <= upper + 1e-6


def test_concurrence_examples():
    assert concurrence(bell()) == pytest.approx(1, abs=1e-12)
    assert concurrence(density(np.eye(4) / 4, (2, 2))) == pytest.approx(0, abs=1e-12)
    assert entanglement_of_formation(bell()) == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("seed,N", [(0, 1), (1, 2), (2, 3), (3, 4)])
def test_koashi_winter_equality(seed, N):
    rng = np.random.default_rng(seed)
    p = random_params(rng, N).replace(t=float(rng.uniform(0.1, 2)))
    s = build_state(p)
    rho = reduce(s, select("s1s2"))
    s1 = state_entropy(s, SubsystemSelector(True))
    # a rank-1 measurement on E of the pure S1 S2 E state prepares a pure-state ensemble of rho_S1S2,
    # so J<-(S1:E) is S(S1) minus the least average S1 entropy over such ensembles
    j_back = s1 - min_average_entanglement(rho)
    rhs = s1 - j_back
    assert abs(entanglement_of_formation(rho) - rhs) < 1e-6
