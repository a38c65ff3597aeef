"""Metric assembly and frame-identity tests."""

import numpy as np
import pytest

from charshock.errors import DegenerateSoundSpeed
from charshock.geometry import (
    FluidPointState,
    assemble_metric,
    build_frames,
    jacobian_factor,
    metric_dot,
    random_subsonic_states,
)


def test_rest_state_metric_is_minkowski():
    g, g_inv = assemble_metric(FluidPointState(v=np.zeros(3), eta=1.0))
    assert np.array_equal(g, np.diag([-1.0, 1.0, 1.0, 1.0]))
    assert np.array_equal(g_inv, np.diag([-1.0, 1.0, 1.0, 1.0]))


def test_moving_state_metric_entries():
    g, _ = assemble_metric(FluidPointState(v=np.array([0.3, 0.0, 0.0]), eta=1.0))
    assert g[0, 0] == pytest.approx(-0.91, abs=1e-15)
    assert g[0, 1] == pytest.approx(-0.3, abs=1e-15)
    assert g[1, 0] == g[0, 1]


def test_metric_inverse_random_states():
    for state in random_subsonic_states(200, rng=7):
        g, g_inv = assemble_metric(state)
        assert np.max(np.abs(g @ g_inv - np.eye(4))) <= 1e-12
        # closed form vs numeric inversion
        assert np.max(np.abs(g_inv - np.linalg.inv(g))) <= 1e-12


def test_degenerate_sound_speed_raises():
    with pytest.raises(DegenerateSoundSpeed):
        assemble_metric(FluidPointState(v=np.zeros(3), eta=0.0))


def test_rest_state_frames_hand_values():
    state = FluidPointState(v=np.zeros(3), eta=1.0, mu=1.0, that=np.array([1.0, 0.0, 0.0]))
    fr = build_frames(state)
    assert np.array_equal(fr.L, [1.0, -1.0, 0.0, 0.0])
    assert np.array_equal(fr.N, [1.0, 0.0, 0.0, 0.0])
    assert np.array_equal(fr.T, [0.0, 1.0, 0.0, 0.0])
    g, _ = assemble_metric(state)
    assert metric_dot(g, fr.L, fr.T) == pytest.approx(-1.0, abs=1e-15)


def test_mu_zero_frames_degenerate():
    state = FluidPointState(v=np.array([0.1, 0.0, 0.0]), eta=1.2, mu=0.0,
                            that=np.array([0.0, 1.0, 0.0]))
    fr = build_frames(state)
    g, _ = assemble_metric(state)
    assert abs(metric_dot(g, fr.L, fr.Lbar)) <= 1e-15


def test_frame_identity_suite():
    """All algebraic frame identities over many random admissible states."""
    for state in random_subsonic_states(10_000, rng=42):
        g, _ = assemble_metric(state)
        fr = build_frames(state)
        scale = max(1.0, np.max(np.abs(fr.L)), np.max(np.abs(fr.Lbar)))
        tol = 1e-12 * scale**2
        assert abs(metric_dot(g, fr.L, fr.L)) <= tol
        assert abs(metric_dot(g, fr.Lbar, fr.Lbar)) <= tol
        assert abs(metric_dot(g, fr.L, fr.T) + state.mu) <= tol
        assert abs(metric_dot(g, fr.T, fr.T) - fr.kappa**2) <= tol
        assert abs(metric_dot(g, fr.L, fr.Lbar) + 2.0 * state.mu) <= tol
        assert abs(metric_dot(g, fr.N, fr.N) + state.eta**2) <= tol
        assert fr.N[0] == 1.0 and fr.L[0] == 1.0
        assert np.max(np.abs(fr.L - (fr.N - state.eta * np.concatenate(([0.0], state.that))))) <= tol


def test_jacobian_factor():
    state = FluidPointState(v=np.zeros(3), eta=1.0, mu=1.0)
    assert jacobian_factor(state, 4.0) == pytest.approx(4.0)
    state0 = FluidPointState(v=np.zeros(3), eta=1.3, mu=0.0)
    assert jacobian_factor(state0, 4.0) == 0.0
