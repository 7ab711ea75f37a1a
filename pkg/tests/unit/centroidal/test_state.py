import numpy as np
import scipy.integrate

from stride.centroidal import (
    CentroidalState,
    ContactConfig,
    centroidal_rates,
    cd_step_exact,
    centroidal_pose_integrate,
)
from stride.kinematics import centroidal_matrix, centroidal_momentum, load_model

import pytest


def _config(forces, positions=None, p_c=(0.0, 0.0, 0.4), mass=10.0):
    if positions is None:
        positions = [[0.0, 0.1, 0.0], [0.0, -0.1, 0.0]]
    return ContactConfig(forces, np.zeros((2, 3)), positions, p_c, mass)


def test_free_fall():
    state = CentroidalState(np.zeros(6), np.zeros(6))
    config = _config(np.zeros((2, 3)))
    result = cd_step_exact(state, config, 0.1)
    assert np.allclose(result.h, [0.0, 0.0, -9.81, 0.0, 0.0, 0.0])
    assert np.allclose(result.H, 0.0)


def test_pose_integrates_momentum():
    state = CentroidalState(np.ones(6), np.arange(6.0))
    result = cd_step_exact(state, _config(np.zeros((2, 3))), 0.05)
    assert np.allclose(result.H, np.ones(6) + 0.05 * np.arange(6.0))


def test_balanced_support():
    forces = [[0.0, 0.0, 49.05], [0.0, 0.0, 49.05]]
    l_dot, k_dot = centroidal_rates(_config(forces))
    assert np.allclose(l_dot, 0.0)
    assert np.allclose(k_dot, 0.0)


def test_angular_rate():
    forces = [[0.0, 0.0, 98.1], [0.0, 0.0, 0.0]]
    positions = [[0.1, 0.0, 0.0], [0.0, 0.0, 0.0]]
    _, k_dot = centroidal_rates(_config(forces, positions))
    # (0.1, 0, -0.4) x (0, 0, 98.1)
    assert np.allclose(k_dot, [0.0, -9.81, 0.0])


@pytest.mark.parametrize("dt", [0.0, -0.01])
def test_invalid_dt(dt):
    state = CentroidalState(np.zeros(6), np.zeros(6))
    with pytest.raises(ValueError):
        cd_step_exact(state, _config(np.zeros((2, 3))), dt)


def test_state_vector():
    state = CentroidalState.from_vector(np.arange(12.0))
    assert np.array_equal(state.H, np.arange(6.0))
    assert np.array_equal(state.l_G, [6.0, 7.0, 8.0])
    assert np.array_equal(state.as_vector(), np.arange(12.0))
    assert state.is_finite()
    assert not CentroidalState(np.full(6, np.nan), np.zeros(6)).is_finite()


def test_pose_integrate_tracks_momentum():
    model = load_model("biped2d")
    dt = 1e-3
    q0 = np.zeros(model.nq)
    q0[2] = 0.45
    q0[[6, 7, 8, 9]] = [0.3, -0.6, 0.3, -0.6]
    qd = np.zeros(model.nq)
    qd[[0, 2, 4, 6, 7]] = [0.4, 0.1, 0.2, 1.0, -0.5]
    q_traj = np.array([q0 + k * dt * qd for k in range(20)])
    qd_traj = np.tile(qd, (20, 1))
    poses = centroidal_pose_integrate(q_traj, qd_traj, model, dt)
    assert poses.shape == (20, 6)
    first = centroidal_momentum(model, q0, qd)
    assert np.allclose(poses[0], first.A_G @ q0)
    momenta = np.array([centroidal_momentum(model, q, qd).h for q in q_traj])
    assert np.allclose(np.diff(poses, axis=0) / dt, momenta[:-1], atol=1e-2)


def test_pose_integrate_shape_mismatch():
    model = load_model("biped2d")
    with pytest.raises(ValueError):
        centroidal_pose_integrate(np.zeros((3, model.nq)), np.zeros((4, model.nq)), model, 0.01)


def _swinging_legs(model, t):
    omega = 2.0 * np.pi
    q = np.zeros((t.size, model.nq))
    qd = np.zeros((t.size, model.nq))
    q[:, 2] = 0.45
    q[:, 6] = 0.3 + 0.4 * np.sin(omega * t)
    q[:, 7] = -0.6 - 0.3 * np.sin(omega * t)
    q[:, 8] = 0.3 - 0.4 * np.sin(omega * t)
    q[:, 9] = -0.6
    qd[:, 6] = 0.4 * omega * np.cos(omega * t)
    qd[:, 7] = -0.3 * omega * np.cos(omega * t)
    qd[:, 8] = -0.4 * omega * np.cos(omega * t)
    return q, qd


def test_pose_integrate_constant_matrix_is_exact():
    model = load_model("biped2d")
    dt = 0.01
    q0 = np.zeros(model.nq)
    q0[2] = 0.45
    q0[[6, 7, 8, 9]] = [0.3, -0.6, 0.3, -0.6]
    qd = np.zeros(model.nq)
    qd[[0, 2]] = [0.7, -0.2]
    q_traj = np.array([q0 + k * dt * qd for k in range(30)])
    poses = centroidal_pose_integrate(q_traj, np.tile(qd, (30, 1)), model, dt)
    h = centroidal_momentum(model, q0, qd).h
    assert np.allclose(poses - poses[0], np.outer(np.arange(30) * dt, h), atol=1e-9)


def test_pose_integrate_first_order_convergence():
    model = load_model("biped2d")
    duration = 0.4
    fine = np.linspace(0.0, duration, 8001)
    q_fine, qd_fine = _swinging_legs(model, fine)
    momenta = np.array([centroidal_matrix(model, q)[0] @ qd for q, qd in zip(q_fine, qd_fine)])
    exact = scipy.integrate.trapezoid(momenta, fine, axis=0)
    errors = []
    for steps in (20, 40, 80, 160):
        t = np.linspace(0.0, duration, steps + 1)
        q_traj, qd_traj = _swinging_legs(model, t)
        poses = centroidal_pose_integrate(q_traj, qd_traj, model, duration / steps)
        errors.append(np.linalg.norm(poses[-1] - poses[0] - exact))
    ratios = np.array(errors[:-1]) / np.array(errors[1:])
    assert np.all(np.abs(ratios - 2.0) <= 0.3)
