import numpy as np

from stride.centroidal import standing_configuration
from stride.dynamics import dynamics_terms
from stride.kinematics import contact_jacobian, forward_kinematics, load_model
from stride.sim import ControlGains, ControlPlan, low_level_control, swing_joint_targets

import pytest


class _State(object):
    def __init__(self, q, qd):
        self.q = q
        self.qd = qd


@pytest.fixture(scope="module")
def biped():
    return load_model("biped2d")


@pytest.fixture(scope="module")
def standing(biped):
    feet = np.array([[0.0, leg.r_c1[1], 0.0] for leg in biped.legs])
    q = standing_configuration(biped, np.array([0.0, 0.0, 0.38]), feet)
    return _State(q, np.zeros(biped.nq))


def test_gains_from_config():
    gains = ControlGains.from_config({"control": {"kp": 80.0}})
    assert gains.kp == 80.0
    assert gains.kd == 2.4
    assert gains.torso_kp == 60.0


def test_zero_wrench_level_torso(biped, standing):
    plan = ControlPlan((True, True), np.zeros((2, 3)))
    tau = low_level_control(biped, standing, plan, 0.0, ControlGains(stance_bias=False))
    assert tau.shape == (biped.n_j,)
    assert np.allclose(tau, 0.0)


def test_stance_wrench_mapping(biped, standing):
    forces = np.array([[5.0, 0.0, 40.0], [-5.0, 0.0, 40.0]])
    plan = ControlPlan((True, True), forces)
    tau = low_level_control(biped, standing, plan, 0.0, ControlGains(stance_bias=False))
    expected = np.zeros(biped.n_j)
    for leg_index, leg in enumerate(biped.legs):
        joints = np.asarray(leg.joints)
        jac = contact_jacobian(biped, standing.q, leg.contact)
        wrench = np.concatenate([forces[leg_index], np.zeros(3)])
        expected[joints - biped.actuated[0]] = -(jac[:, joints].T @ wrench)
    limits = biped.torque_limits()
    assert np.allclose(tau, np.clip(expected, -limits, limits))


def test_torque_saturation(biped, standing):
    plan = ControlPlan((True, True), np.full((2, 3), 1e5))
    tau = low_level_control(biped, standing, plan, 0.0, ControlGains())
    limits = biped.torque_limits()
    assert np.all(np.abs(tau) <= limits + 1e-12)
    assert np.any(np.isclose(np.abs(tau), limits))


def test_feedforward_replaces_stance_mapping(biped, standing):
    feedforward = np.array([1.0, -2.0, 3.0, -4.0])
    plan = ControlPlan((True, True), np.full((2, 3), 50.0), feedforward=feedforward)
    tau = low_level_control(biped, standing, plan, 0.0, ControlGains())
    assert np.allclose(tau, feedforward)


@pytest.mark.parametrize("offset, rate", [(0.1, 0.0), (0.0, 0.5), (-0.05, -0.2)])
def test_feedforward_tracks_planned_joints(biped, standing, offset, rate):
    feedforward = np.array([1.0, -2.0, 3.0, -4.0])
    joints = standing.q[biped.actuated] + offset
    joint_rates = np.full(biped.n_j, rate)
    plan = ControlPlan((True, True), np.zeros((2, 3)), feedforward=feedforward, joints=joints,
                       joint_rates=joint_rates)
    gains = ControlGains(ff_kp=80.0, ff_kd=2.0)
    tau = low_level_control(biped, standing, plan, 0.0, gains)
    assert np.allclose(tau, feedforward + 80.0 * offset + 2.0 * rate)


def test_stance_bias_compensation(biped, standing):
    plan = ControlPlan((True, True), np.zeros((2, 3)))
    tau = low_level_control(biped, standing, plan, 0.0, ControlGains())
    bias = dynamics_terms(biped, standing.q, standing.qd).C[-biped.n_j:]
    limits = biped.torque_limits()
    assert np.allclose(tau, np.clip(bias, -limits, limits))


def test_weight_split_holds_standing_pose(biped, standing):
    weight = biped.total_mass * biped.gravity
    forces = np.array([[0.0, 0.0, 0.5 * weight], [0.0, 0.0, 0.5 * weight]])
    plan = ControlPlan((True, True), forces)
    tau = low_level_control(biped, standing, plan, 0.0, ControlGains())
    assert np.all(np.abs(tau) < biped.torque_limits())
    terms = dynamics_terms(biped, standing.q, standing.qd)
    generalized = terms.S @ tau - terms.C
    for leg_index, leg in enumerate(biped.legs):
        jac = contact_jacobian(biped, standing.q, leg.contact)
        generalized += jac[0:3, terms.dofs].T @ forces[leg_index]
    qdd = np.linalg.solve(terms.M, generalized)
    assert np.allclose(qdd, 0.0, atol=1e-8)


def test_torso_correction_on_stance_hips(biped, standing):
    q = standing.q.copy()
    q[4] = 0.1
    plan = ControlPlan((True, True), np.zeros((2, 3)))
    gains = ControlGains(torso_kp=60.0, torso_kd=0.0, stance_bias=False)
    tau = low_level_control(biped, _State(q, standing.qd), plan, 0.0, gains)
    hips = [leg.joints[0] - biped.actuated[0] for leg in biped.legs]
    knees = [leg.joints[1] - biped.actuated[0] for leg in biped.legs]
    assert np.allclose(tau[hips], 3.0)
    assert np.allclose(tau[knees], 0.0)


def test_swing_targets_current_foot(biped, standing):
    kin = forward_kinematics(biped, standing.q)
    for leg_index, leg in enumerate(biped.legs):
        foot = kin.contact_position(leg.contact)
        targets = swing_joint_targets(biped, standing.q, leg_index, foot)
        assert np.allclose(targets, standing.q[np.asarray(leg.joints)], atol=1e-6)


def test_swing_targets_clamped(biped, standing):
    targets = swing_joint_targets(biped, standing.q, 0, [2.0, 0.0, -1.0])
    assert targets.shape == (2,)
    assert np.all(np.isfinite(targets))


def test_swing_leg_pd(biped, standing):
    class _Swing(object):
        def evaluate(self, phase):
            kin = forward_kinematics(biped, standing.q)
            return kin.contact_position(biped.legs[0].contact), np.zeros(3)

    plan = ControlPlan((False, True), np.zeros((2, 3)), swings={0: _Swing()}, duration=0.25)
    tau = low_level_control(biped, standing, plan, 0.5, ControlGains(torso_kp=0.0, torso_kd=0.0, stance_bias=False))
    # the swing foot already sits on its curve at rest
    assert np.allclose(tau, 0.0, atol=1e-4)
