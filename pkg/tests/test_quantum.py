import math

import numpy as np
import pytest

from harper_ratchet.analysis import asymmetry, fit_rate
from harper_ratchet.classical import classical_current_series
from harper_ratchet.model import HBAR_GOLDEN, ModelParams
from harper_ratchet.quantum import (
    LeakageError,
    MomentumGrid,
    QuantumState,
    apply_floquet,
    current,
    initial_state,
    momentum_distribution,
    quantum_current_series,
)
from oracles import dense_kick_matrix, dense_propagate


@pytest.mark.parametrize("size", [0, 16, 31, 48, 100])
def test_grid_size_must_be_power_of_two(size):
    with pytest.raises(ValueError):
        MomentumGrid(size, 1.0)


def test_grid_defaults_center_lattice():
    g = MomentumGrid(64, 0.5)
    assert g.m_min == -32
    assert g.indices[0] == -32 and g.indices[-1] == 31
    assert g.momenta[40] == 8 * 0.5


def test_initial_state():
    g = MomentumGrid(128, HBAR_GOLDEN)
    s = initial_state(g)
    assert s.norm() == 1.0
    assert current(s) == 0.0
    psi = s.position_amplitudes()
    np.testing.assert_allclose(np.abs(psi), 1 / math.sqrt(128), atol=1e-15)


def test_initial_state_needs_zero_momentum():
    with pytest.raises(ValueError):
        initial_state(MomentumGrid(64, 1.0, m_min=5))


def test_current_of_eigenstate():
    g = MomentumGrid(64, 0.9495)
    c = np.zeros(64, complex)
    c[32 + 5] = 1.0
    assert current(QuantumState(g, c)) == pytest.approx(5 * 0.9495, rel=1e-15)


def test_no_kick_keeps_moduli():
    g = MomentumGrid(256, HBAR_GOLDEN)
    rng = np.random.default_rng(1)
    c = np.zeros(256, complex)
    c[100:150] = rng.normal(size=50) + 1j * rng.normal(size=50)
    c /= np.linalg.norm(c)
    out = apply_floquet(ModelParams(0.0, 1.5, hbar=HBAR_GOLDEN), QuantumState(g, c))
    np.testing.assert_allclose(np.abs(out.amplitudes), np.abs(c), atol=1e-14)
    assert out.kick_count == 1


@pytest.mark.parametrize("params", [
    ModelParams(3.0, 1.5, 0.0, 0.0, 1.0, HBAR_GOLDEN),
    ModelParams(1.0, 0.5, 0.7, -0.2, 0.4, 1.1),
])
def test_first_kick_has_zero_current(params):
    s = apply_floquet(params, initial_state(MomentumGrid(1024, params.hbar)))
    assert abs(current(s)) < 1e-10


@pytest.mark.parametrize("params", [
    ModelParams(0.2, 0.1, 0.0, 0.0, 1.0, HBAR_GOLDEN),
    ModelParams(0.2, 0.1, 0.4, 1.3, 0.6, HBAR_GOLDEN),
])
def test_matches_dense_kick_matrix(params):
    grid = MomentumGrid(64, params.hbar)
    kick = dense_kick_matrix(params, grid)
    state = initial_state(grid)
    ref = state.amplitudes
    for _ in range(10):
        state = apply_floquet(params, state)
        ref = dense_propagate(params, grid, ref, 1, kick)
        assert np.max(np.abs(state.amplitudes - ref)) < 1e-10


def test_recentered_lattice_gives_same_dynamics():
    params = ModelParams(0.5, 0.25, hbar=HBAR_GOLDEN)
    a = quantum_current_series(params, MomentumGrid(512, HBAR_GOLDEN), 30)
    b = quantum_current_series(params, MomentumGrid(512, HBAR_GOLDEN, m_min=-200), 30)
    np.testing.assert_allclose(a.values, b.values, atol=1e-11)


def test_unitarity(chaotic):
    g = MomentumGrid(2**14, chaotic.hbar)
    state = initial_state(g)
    for _ in range(20):
        before = state.norm()
        state = apply_floquet(chaotic, state)
        assert abs(state.norm() - before) < 1e-12
    _, final = quantum_current_series(chaotic, g, 1000, return_state=True)
    assert abs(1 - final.norm()) < 1e-9


def test_small_hbar_follows_classical_ensemble():
    # correspondence fixes the Fourier sign convention: first nontrivial kick
    params = ModelParams(3.0, 1.5, 0.0, 0.0, 1.0)
    q = quantum_current_series(params.with_hbar(0.005), MomentumGrid(2**16, 0.005), 2)
    c = classical_current_series(params, 10**5, 2)
    assert q.values[1] == pytest.approx(c.values[1], abs=2e-3)
    assert q.values[1] < -0.3


def test_zero_kick_strength_series():
    s = quantum_current_series(ModelParams(0.0, 1.5, hbar=HBAR_GOLDEN), MomentumGrid(64, HBAR_GOLDEN), 20)
    assert np.all(s.values == 0.0)


def test_leakage_is_a_hard_error(chaotic):
    with pytest.raises(LeakageError) as info:
        quantum_current_series(chaotic, MomentumGrid(64, chaotic.hbar), 100)
    err = info.value
    assert err.kick is not None and err.kick < 100
    assert err.leakage > 1e-8
    assert "enlarge" in str(err)


def test_apply_floquet_checks_leakage(chaotic):
    g = MomentumGrid(64, chaotic.hbar)
    c = np.zeros(64, complex)
    c[0] = 1.0
    with pytest.raises(LeakageError):
        apply_floquet(chaotic, QuantumState(g, c))


def test_series_needs_kicks(chaotic):
    with pytest.raises(ValueError):
        quantum_current_series(chaotic, MomentumGrid(64, chaotic.hbar), 0)


def test_mismatched_hbar_rejected(chaotic):
    with pytest.raises(ValueError):
        quantum_current_series(chaotic, MomentumGrid(1024, 1.0), 5)


def test_distribution_of_initial_state():
    g = MomentumGrid(64, 0.7)
    p, prob = momentum_distribution(initial_state(g))
    assert prob.sum() == 1.0
    assert p[np.argmax(prob)] == 0.0
    assert np.count_nonzero(prob) == 1


def test_symmetric_potential_null(symmetric):
    g = MomentumGrid(2**12, symmetric.hbar)
    s, state = quantum_current_series(symmetric, g, 300, return_state=True)
    assert np.max(np.abs(s.values)) < 1e-9
    assert abs(asymmetry(momentum_distribution(state))) < 1e-9


def test_plain_harper_has_zero_current_and_symmetric_distribution():
    params = ModelParams(3.0, 1.5, 0.0, 0.0, 0.0, HBAR_GOLDEN)
    g = MomentumGrid(2**13, HBAR_GOLDEN)
    s, state = quantum_current_series(params, g, 200, return_state=True)
    assert np.max(np.abs(s.values)) < 1e-9
    prob = state.probabilities()
    zero = -g.m_min
    np.testing.assert_allclose(prob[zero + 1:zero + 500], prob[zero - 1:zero - 500:-1], atol=1e-12)


def test_chaotic_distribution_asymmetry_tracks_current(chaotic):
    g = MomentumGrid(2**14, chaotic.hbar)
    s, state = quantum_current_series(chaotic, g, 1000, return_state=True)
    dist = momentum_distribution(state)
    assert dist[1].sum() == pytest.approx(1.0, abs=1e-10)
    a = asymmetry(dist)
    slope = fit_rate(s).slope
    assert abs(a) > 0.1
    assert np.sign(a) == np.sign(slope) == np.sign(s.values[-1])
