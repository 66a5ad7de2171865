import math

import numpy as np
import pytest

from harper_ratchet.classical import (
    ClassicalEnsemble,
    classical_current_series,
    diagonal_seeds,
    evolve_ensemble,
    inverse_kick_map_step,
    kick_map_step,
    phase_portrait,
)
from harper_ratchet.model import ModelParams, is_ratchet_symmetric
from oracles import harper_map, jacobian_det, ols_slope

FIG1A = ModelParams(3.0, 1.5, 0.0, 0.0, 1.0)
FIG1C = ModelParams(0.4, 0.2, 0.0, 0.0, 1.0)
FIG1D = ModelParams(1.0, 0.5, math.pi / 2, math.pi / 2, 1.0)


def test_identity_map_when_no_dynamics():
    q, p = np.array([0.3, -2.0, 10.0]), np.array([1.0, 0.0, -7.0])
    q2, p2 = kick_map_step(ModelParams(0.0, 0.0), q, p)
    assert np.array_equal(q2, q) and np.array_equal(p2, p)


def test_hand_evaluated_step():
    q, p = kick_map_step(FIG1A, 0.0, 0.0)
    # V'(0) = 2 so p' = -6, q' = -1.5 sin(-6)
    assert p == -6.0
    assert q == pytest.approx(-1.5 * math.sin(-6.0), abs=1e-15)


def test_reduces_to_plain_kicked_harper():
    rng = np.random.default_rng(3)
    q, p = rng.uniform(-10, 10, 500), rng.uniform(-10, 10, 500)
    params = ModelParams(1.7, 0.9, 0.0, 0.0, 0.0)
    got = kick_map_step(params, q, p)
    want = harper_map(1.7, 0.9, q, p)
    np.testing.assert_allclose(got[0], want[0], atol=1e-13)
    np.testing.assert_allclose(got[1], want[1], atol=1e-13)


def test_evolve_zero_kicks_is_identity():
    e = ClassicalEnsemble.from_qp([0.1, 2.0], [0.5, -1.0], kick_count=4)
    out = evolve_ensemble(FIG1A, e, 0)
    np.testing.assert_array_equal(out.q, e.q)
    np.testing.assert_array_equal(out.p, e.p)
    assert out.kick_count == 4


def test_evolve_matches_repeated_steps():
    e = ClassicalEnsemble.from_qp([0.7], [0.2])
    out = evolve_ensemble(FIG1A, e, 2)
    q, p = kick_map_step(FIG1A, 0.7, 0.2)
    q, p = kick_map_step(FIG1A, q, p)
    assert out.kick_count == 2
    assert out.q[0] == pytest.approx(q, abs=1e-12)
    assert out.p[0] == pytest.approx(p, abs=1e-12)


def test_negative_kicks_rejected():
    with pytest.raises(ValueError):
        evolve_ensemble(FIG1A, ClassicalEnsemble.equally_spaced(4), -1)


def test_empty_ensemble_rejected():
    with pytest.raises(ValueError):
        ClassicalEnsemble.from_qp([], [])


def test_one_kick_mean_vanishes_for_uniform_ensemble():
    e = evolve_ensemble(FIG1A, ClassicalEnsemble.equally_spaced(4096), 1)
    # -K <V'> over a period is zero
    assert abs(e.mean_momentum()) < 1e-10


def test_equally_spaced_ensemble_covers_period():
    e = ClassicalEnsemble.equally_spaced(8)
    q = np.sort(np.mod(e.q, 2 * np.pi))
    np.testing.assert_allclose(np.diff(q), 2 * np.pi / 8, atol=1e-14)
    assert np.all(e.p == 0)


def test_symplectic_jacobian():
    rng = np.random.default_rng(11)
    q, p = rng.uniform(0, 2 * np.pi, 1000), rng.uniform(-10, 10, 1000)
    for params in (FIG1A, FIG1C, FIG1D):
        det = jacobian_det(lambda a, b: kick_map_step(params, a, b), q, p)
        assert np.max(np.abs(det - 1.0)) < 1e-6


def test_time_reversal():
    rng = np.random.default_rng(5)
    q, p = rng.uniform(0, 2 * np.pi, 1000), rng.uniform(-5, 5, 1000)
    q1, p1 = kick_map_step(FIG1A, q, p)
    q0, p0 = inverse_kick_map_step(FIG1A, q1, p1)
    assert np.max(np.abs(q0 - q)) < 1e-10
    assert np.max(np.abs(p0 - p)) < 1e-10


def test_zero_kick_strength_gives_zero_current():
    s = classical_current_series(ModelParams(0.0, 1.5), 1000, 50)
    assert np.all(s.values == 0.0)
    assert s.kind == "classical" and len(s) == 50


@pytest.mark.parametrize("params", [
    FIG1D,
    ModelParams(3.0, 1.5, math.pi / 2, math.pi / 2, 1.0),
    ModelParams(3.0, 1.5, 0.0, 0.0, 0.0),
    ModelParams(2.0, 1.0, 0.3, 0.6 + math.pi / 2, 0.7),
])
def test_symmetry_null(params):
    assert is_ratchet_symmetric(params)
    s = classical_current_series(params, 20_000, 400)
    n = s.kicks
    assert np.all(np.abs(s.values) < 1e-8 * n)


def test_chaotic_current_has_no_acceleration():
    s = classical_current_series(FIG1A, 100_000, 1000)
    slope = ols_slope(s.kicks[99:], s.values[99:])
    assert abs(slope) < 0.01
    assert np.max(np.abs(s.values)) < 5


def test_current_series_needs_kicks():
    with pytest.raises(ValueError):
        classical_current_series(FIG1A, 10, 0)


def test_portrait_fixed_points_without_dynamics():
    q0, p0 = diagonal_seeds(5)
    pts = phase_portrait(ModelParams(0.0, 0.0), q0, p0, 30)
    assert pts.shape == (5 * 31, 2)
    for k in range(5):
        orbit = pts[k * 31:(k + 1) * 31]
        assert np.all(orbit == orbit[0])


def test_portrait_reduced_to_unit_cell():
    q0, p0 = diagonal_seeds(10)
    pts = phase_portrait(FIG1A, q0, p0, 500)
    assert np.all((pts >= 0) & (pts < 2 * np.pi))


def _cell_coverage(points, bins=40):
    hist, _, _ = np.histogram2d(points[:, 0], points[:, 1], bins=bins, range=[[0, 2 * np.pi]] * 2)
    return np.count_nonzero(hist) / hist.size


def test_chaotic_portrait_fills_cell_and_integrable_does_not():
    q0, p0 = diagonal_seeds()
    chaotic = _cell_coverage(phase_portrait(FIG1A, q0, p0, 2000))
    regular = _cell_coverage(phase_portrait(FIG1C, q0, p0, 2000))
    assert chaotic > 0.98
    assert regular < 0.8


def test_portrait_needs_seeds():
    with pytest.raises(ValueError):
        phase_portrait(FIG1A, [], [], 10)
