import numpy as np

from stride.centroidal import (
    ContactSchedule,
    build_reference,
    check_command,
    landing_target,
    standing_configuration,
    update_reference_from_solution,
)
from stride.errors import CommandError, OutOfReachError
from stride.kinematics import com_position, forward_kinematics, load_model
from stride.terrain import Terrain

import pytest


class _State(object):
    def __init__(self, q, qd):
        self.q = q
        self.qd = qd


@pytest.fixture(scope="module")
def model():
    return load_model("biped2d")


@pytest.fixture(scope="module")
def standing(model):
    feet = np.array([[0.0, leg.r_c1[1], 0.0] for leg in model.legs])
    q = standing_configuration(model, np.array([0.0, 0.0, 0.38]), feet)
    return _State(q, np.zeros(model.nq))


def test_standing_configuration(model, standing):
    assert np.allclose(com_position(model, standing.q), [0.0, 0.0, 0.38], atol=1e-9)
    kin = forward_kinematics(model, standing.q)
    for leg in model.legs:
        assert np.allclose(kin.contact_position(leg.contact), [0.0, 0.0, 0.0], atol=1e-9)
        assert standing.q[leg.joints[1]] <= 0.0


@pytest.mark.parametrize("command", [0.0, 0.5, -1.0, 1.0])
def test_check_command(command):
    assert check_command(command) == command


@pytest.mark.parametrize("command", [1.5, -2.0, float('nan'), float('inf')])
def test_check_command_invalid(command):
    with pytest.raises(CommandError):
        check_command(command)


def test_build_reference_shapes(model, standing):
    schedule = ContactSchedule.walking(h=10, h_swing=5, swing_leg=0)
    bundle = build_reference(standing, 0.5, schedule, 0.05, Terrain.flat(), model)
    assert bundle.q_ref.shape == (11, model.nq)
    assert bundle.h_ref.shape == (11, 6)
    assert bundle.H_ref.shape == (11, 6)
    assert bundle.p_f_ref.shape == (10, 2, 3)
    assert bundle.p_f_path.shape == (11, 2, 3)
    assert np.array_equal(bundle.q_ref[0], standing.q)
    assert not bundle.q_ref.flags.writeable


def test_build_reference_velocity_ramp(model, standing):
    schedule = ContactSchedule.walking(h=10, h_swing=5, swing_leg=0)
    bundle = build_reference(standing, 0.5, schedule, 0.05, Terrain.flat(), model, max_ref_accel=1.0)
    expected = np.minimum(0.5, 0.05 * np.arange(11))
    assert np.allclose(bundle.velocity, expected)
    assert np.all(np.diff(bundle.p_c_ref[:, 0]) >= 0.0)


def test_build_reference_feet(model, standing):
    schedule = ContactSchedule.walking(h=10, h_swing=5, swing_leg=0)
    bundle = build_reference(standing, 0.3, schedule, 0.05, Terrain.flat(), model)
    # stance foot stays planted while the other swings
    assert np.allclose(bundle.p_f_ref[0:5, 1], bundle.feet0[1])
    # swinging foot is referenced at its landing target
    assert np.allclose(bundle.p_f_ref[0:5, 0], bundle.p_f_ref[5:10, 0])
    assert bundle.targets[0][0] > bundle.feet0[0][0]
    for k in range(1, 11):
        kin = forward_kinematics(model, bundle.q_ref[k])
        for index, leg in enumerate(model.legs):
            assert np.allclose(kin.contact_position(leg.contact), bundle.p_f_path[k, index], atol=1e-9)


def test_build_reference_invalid_command(model, standing):
    schedule = ContactSchedule.walking(h=10, h_swing=5)
    with pytest.raises(CommandError):
        build_reference(standing, 2.0, schedule, 0.05, Terrain.flat(), model)


def test_landing_target_avoids_gap():
    terrain = Terrain.from_dict({"patches": [
        {"x_start": -100.0, "x_end": 0.3},
        {"x_start": 0.45, "x_end": 100.0, "height": 0.02},
    ]})
    target = landing_target(terrain, "left", (0.35, 0.0, 0.38), 0.0, 0.25, np.zeros(3), 0.0, 0.02)
    assert np.allclose(target, [0.28, 0.0, 0.0])
    target = landing_target(terrain, "left", (0.42, 0.0, 0.38), 0.0, 0.25, np.zeros(3), 0.0, 0.02)
    assert np.allclose(target, [0.47, 0.0, 0.02])


def test_landing_target_allowed_feet():
    terrain = Terrain.from_dict({"patches": [
        {"x_start": -100.0, "x_end": 0.3},
        {"x_start": 0.3, "x_end": 0.6, "allowed_feet": "right"},
        {"x_start": 0.6, "x_end": 100.0},
    ]})
    assert np.isclose(landing_target(terrain, "right", (0.4, 0.0, 0.38), 0.0, 0.25, np.zeros(3), 0.0, 0.0)[0], 0.4)
    assert np.isclose(landing_target(terrain, "left", (0.4, 0.0, 0.38), 0.0, 0.25, np.zeros(3), 0.0, 0.0)[0], 0.3)


def test_update_reference_from_solution(model, standing):
    schedule = ContactSchedule.walking(h=10, h_swing=5, swing_leg=0)
    bundle = build_reference(standing, 0.3, schedule, 0.05, Terrain.flat(), model)
    p_f_sol = np.array(bundle.p_f_ref)
    p_f_sol[0:5, 0, 0] += 0.02
    p_c_sol = np.array(bundle.p_c_ref[:10])
    updated = update_reference_from_solution(bundle, p_f_sol, p_c_sol, 0.06, model)
    assert updated.dt == 0.06
    assert np.isclose(updated.targets[0][0], bundle.targets[0][0] + 0.02)
    assert np.allclose(updated.p_f_path[5, 0], updated.targets[0])
    assert np.array_equal(updated.q_ref[0], bundle.q_ref[0])
    with pytest.raises(ValueError):
        update_reference_from_solution(bundle, p_f_sol[:5], p_c_sol, 0.06, model)


@pytest.mark.parametrize("shift", [
    (0.0, 0.0, 0.0),
    (0.01, 0.0, -0.005),
    (-0.02, 0.0, 0.01),
])
def test_update_reference_ignores_solution_com(model, standing, shift):
    schedule = ContactSchedule.walking(h=10, h_swing=5, swing_leg=0)
    bundle = build_reference(standing, 0.0, schedule, 0.05, Terrain.flat(), model)
    p_f_sol = np.array(bundle.p_f_ref)
    base = update_reference_from_solution(bundle, p_f_sol, np.array(bundle.p_c_ref[:10]), 0.05, model)
    moved = update_reference_from_solution(bundle, p_f_sol, bundle.p_c_ref[:10] + np.array(shift), 0.05, model)
    assert np.allclose(moved.h_ref, base.h_ref)
    assert np.allclose(moved.H_ref, base.H_ref)
    assert np.allclose(moved.q_ref, base.q_ref)


@pytest.mark.parametrize("dt", [0.04, 0.05, 0.06])
def test_joint_references_track_com_reference(model, standing, dt):
    schedule = ContactSchedule.walking(h=10, h_swing=5, swing_leg=0)
    bundle = build_reference(standing, 0.5, schedule, 0.05, Terrain.flat(), model)
    updated = update_reference_from_solution(bundle, np.array(bundle.p_f_ref), np.array(bundle.p_c_ref[:10]), dt, model)
    for k in range(1, 11):
        assert np.allclose(com_position(model, updated.q_ref[k]), updated.p_c_ref[k], atol=1e-6)


def test_update_reference_solution_com_out_of_reach(model, standing):
    schedule = ContactSchedule.walking(h=10, h_swing=5, swing_leg=0)
    bundle = build_reference(standing, 0.0, schedule, 0.05, Terrain.flat(), model)
    p_c_sol = np.array(bundle.p_c_ref[:10])
    p_c_sol[3, 2] += 0.5
    with pytest.raises(OutOfReachError) as info:
        update_reference_from_solution(bundle, np.array(bundle.p_f_ref), p_c_sol, 0.05, model)
    assert info.value.step == 3
    clamped = update_reference_from_solution(bundle, np.array(bundle.p_f_ref), p_c_sol, 0.05, model, clamp=True)
    assert np.all(np.isfinite(clamped.h_ref))
