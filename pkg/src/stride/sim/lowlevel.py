"""
Low-level joint control.

Stance legs realize the planned contact wrench through the transposed
contact Jacobian (tau = -J^T [f; tau_c] on the leg joints), compensate
their own bias torques and share a torso pitch correction among the
stance hips. Swing legs track the swing curve with joint PD about its
inverse kinematics. Feedforward plans replace the stance mapping by the
planned torques plus joint PD about the planned joint trajectory.
"""

import logging

import numpy as np

from ..config import get_config_section, register_config
from ..dynamics import dynamics_terms
from ..errors import OutOfReachError
from ..kinematics import contact_jacobian, forward_kinematics
from ..kinematics.ik import LegParams3D, leg_ik_3d, leg_ik_planar
from ..utils import rotation_zyx

__all__ = [
    "ControlGains",
    "ControlPlan",
    "low_level_control",
    "swing_joint_targets",
]

LOG = logging.getLogger(__name__)

REACH_FRACTION = 0.999

register_config(
    name="control",
    default={
        "kp": 120.0,
        "kd": 2.4,
        "torso_kp": 60.0,
        "torso_kd": 4.0,
        "stance_bias": True,
        "ff_kp": 80.0,
        "ff_kd": 2.0,
        "apex": 0.06,
        "replan_rate": 100.0,
        "fall_pitch": 0.5,
        "fall_height": 0.3,
        "log_every": 10,
    })


class ControlGains(object):
    KEYS = ("kp", "kd", "torso_kp", "torso_kd", "stance_bias", "ff_kp", "ff_kd")

    def __init__(self, kp=120.0, kd=2.4, torso_kp=60.0, torso_kd=4.0, stance_bias=True, ff_kp=80.0, ff_kd=2.0):
        self.kp = float(kp)
        self.kd = float(kd)
        self.torso_kp = float(torso_kp)
        self.torso_kd = float(torso_kd)
        self.stance_bias = bool(stance_bias)
        self.ff_kp = float(ff_kp)
        self.ff_kd = float(ff_kd)

    @classmethod
    def from_config(cls, config=None):
        section = get_config_section("control", config)
        return cls(**{key: section[key] for key in cls.KEYS if key in section})


class ControlPlan(object):
    """What the low level realizes until the next solve.

       ``stance`` flags per leg, stance ``forces`` and ``moments`` (2, 3),
       ``swings`` maps a swing leg to its SwingTrajectory traversed in
       ``duration`` seconds. ``feedforward`` joint torques replace the
       stance mapping when given, with ``joints`` and ``joint_rates`` (n_j)
       the planned joint positions and velocities tracked on top of them.
    """

    def __init__(self, stance, forces, moments=None, swings=None, duration=None, feedforward=None, joints=None,
                 joint_rates=None):
        self.stance = tuple(bool(flag) for flag in stance)
        self.forces = np.asarray(forces, dtype=float)
        self.moments = np.zeros_like(self.forces) if moments is None else np.asarray(moments, dtype=float)
        self.swings = {} if swings is None else dict(swings)
        self.duration = duration
        self.feedforward = None if feedforward is None else np.asarray(feedforward, dtype=float)
        self.joints = None if joints is None else np.asarray(joints, dtype=float)
        self.joint_rates = None if joint_rates is None else np.asarray(joint_rates, dtype=float)

    @property
    def stance_count(self):
        return sum(self.stance)


def _leg_hip(model, kin, leg):
    hip_joint = int(np.flatnonzero(model.q_index == leg.joints[0])[0])
    return kin.origins[hip_joint]


def _pitch_hip(model, leg):
    """q index of the first pitch joint of ``leg``"""
    for q_index in leg.joints:
        joint = model.joints[int(np.flatnonzero(model.q_index == q_index)[0])]
        if np.allclose(np.abs(joint.axis), (0.0, 1.0, 0.0)):
            return q_index
    return None


def swing_joint_targets(model, q, leg_index, foot_target, kin=None):
    """Leg joint angles placing the foot at ``foot_target`` for the current base pose.

       Targets beyond reach are pulled back to the reach boundary.
    """
    if kin is None:
        kin = forward_kinematics(model, q)
    leg = model.legs[leg_index]
    foot_target = np.asarray(foot_target, dtype=float)
    if model.planar:
        hip = _leg_hip(model, kin, leg)
        offset = foot_target[[0, 2]] - hip[[0, 2]]
        reach = np.linalg.norm(offset)
        max_reach = REACH_FRACTION * (model.l1 + model.l2)
        if reach > max_reach:
            LOG.warning("%s swing target %.3f m from the hip, clamping to reach", leg.side, reach)
            offset = offset * (max_reach / reach)
        q_hip, q_knee = leg_ik_planar(model.l1, model.l2, hip[[0, 2]], hip[[0, 2]] + offset)
        return np.array([q_hip - q[4], q_knee])
    params = LegParams3D.from_model(model, leg.side)
    rotation = rotation_zyx(q[3], q[4], q[5])
    try:
        return leg_ik_3d(params, rotation, 0.0, q[0:3], foot_target)
    except OutOfReachError:
        anchor = q[0:3] + rotation @ params.r_c1
        offset = foot_target - anchor
        LOG.warning("%s swing target out of reach, clamping", leg.side)
        return leg_ik_3d(params, rotation, 0.0, q[0:3],
                         anchor + offset * (REACH_FRACTION * 2.0 * params.l / np.linalg.norm(offset)))


def low_level_control(model, state, plan, phase, gains=None):
    """Joint torques realizing ``plan`` at swing phase ``phase`` in [0, 1].

       Returns
       -------
       array
           joint torques saturated at the model limits
    """
    if gains is None:
        gains = ControlGains.from_config()
    q, qd = model.check_state(state.q, state.qd)
    kin = forward_kinematics(model, q)
    tau = np.zeros(model.n_j)
    actuated = model.actuated
    rows = (0, 2) if model.planar else (0, 1, 2)
    joint_bias = None
    if plan.feedforward is None and gains.stance_bias and plan.stance_count:
        joint_bias = dynamics_terms(model, q, qd, kin=kin).C[-model.n_j:]
    for leg_index, leg in enumerate(model.legs):
        joints = np.asarray(leg.joints)
        columns = joints - actuated[0]
        if plan.stance[leg_index]:
            if plan.feedforward is not None:
                tau[columns] = plan.feedforward[columns]
                if plan.joints is not None:
                    tau[columns] += gains.ff_kp * (plan.joints[columns] - q[joints])
                if plan.joint_rates is not None:
                    tau[columns] += gains.ff_kd * (plan.joint_rates[columns] - qd[joints])
                continue
            jac = contact_jacobian(model, q, leg.contact, kin=kin)
            wrench = np.concatenate([plan.forces[leg_index], plan.moments[leg_index]])
            tau[columns] = -(jac[:, joints].T @ wrench)
            if joint_bias is not None:
                tau[columns] += joint_bias[columns]
            continue
        swing = plan.swings.get(leg_index)
        if swing is None:
            continue
        position, rate = swing.evaluate(phase)
        velocity = rate / plan.duration if plan.duration else np.zeros(3)
        q_des = swing_joint_targets(model, q, leg_index, position, kin=kin)
        jac = contact_jacobian(model, q, leg.contact, kin=kin)[list(rows)]
        foot_velocity = velocity[list(rows)] - jac @ np.where(np.isin(np.arange(model.nq), joints), 0.0, qd)
        qd_des = np.linalg.lstsq(jac[:, joints], foot_velocity, rcond=None)[0]
        tau[columns] = gains.kp * (q_des - q[joints]) + gains.kd * (qd_des - qd[joints])
    if plan.feedforward is None and plan.stance_count:
        correction = gains.torso_kp * (0.0 - q[4]) + gains.torso_kd * (0.0 - qd[4])
        for leg_index, leg in enumerate(model.legs):
            hip = _pitch_hip(model, leg)
            if plan.stance[leg_index] and hip is not None:
                tau[hip - actuated[0]] -= correction / plan.stance_count
    limits = model.torque_limits()
    return np.clip(tau, -limits, limits)
