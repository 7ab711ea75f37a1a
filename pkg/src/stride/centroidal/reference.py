"""
Reference trajectories for the centroidal MPC.

A reference bundle samples the horizon at columns k = 0..h: CoM and foot
references, the whole-body joint references obtained from them by leg
IK, and the spatial momentum / centroidal pose references derived from
the joint references. Column 0 always holds the measured state.

Foot references come in two flavours:

* ``p_f_ref`` (columns 0..h-1): placement references. A swinging foot
  is referenced at its landing target, the value its decision variable
  shares with the following stance columns;
* ``p_f_path`` (columns 0..h): the actual foot path, swing curves
  included, that the joint references are solved for.
"""

import logging

import numpy as np

from ..errors import CommandError, OutOfReachError
from ..kinematics import centroidal_matrix, com_position, forward_kinematics
from ..kinematics.ik import LegParams3D, leg_ik_3d, leg_ik_planar
from ..utils import rotation_zyx
from .pose import centroidal_pose_integrate
from .swing import SwingTrajectory, clearance_apex

__all__ = [
    "PlannedSwing",
    "ReferenceBundle",
    "build_reference",
    "update_reference_from_solution",
    "standing_configuration",
    "check_command",
    "landing_target",
    "MAX_COMMAND",
]

LOG = logging.getLogger(__name__)

MAX_COMMAND = 1.0
REACH_FRACTION = 0.999


def check_command(command):
    command = float(command)
    if not np.isfinite(command) or abs(command) > MAX_COMMAND:
        raise CommandError("commanded velocity {!r} outside [-{}, {}] m/s".format(command, MAX_COMMAND, MAX_COMMAND))
    return command


class PlannedSwing(object):
    def __init__(self, window, trajectory):
        self.window = window
        self.trajectory = trajectory

    @property
    def leg(self):
        return self.window.leg

    @property
    def target(self):
        return self.trajectory.target

    def position(self, k):
        return self.trajectory.position(self.window.phase_at(k))


class ReferenceBundle(object):
    """Immutable snapshot of the horizon references"""

    def __init__(self, dt, schedule, q_ref, qd_ref, h_ref, H_ref, p_c_ref, p_f_ref, p_f_path,
                 targets, velocity, command, com_offset, feet0, swings, apex):
        self.dt = float(dt)
        self.schedule = schedule
        self.q_ref = q_ref
        self.qd_ref = qd_ref
        self.h_ref = h_ref
        self.H_ref = H_ref
        self.p_c_ref = p_c_ref
        self.p_f_ref = p_f_ref
        self.p_f_path = p_f_path
        self.targets = targets
        self.velocity = velocity
        self.command = command
        self.com_offset = com_offset
        self.feet0 = feet0
        self.swings = swings
        self.apex = apex
        for value in self.__dict__.values():
            if isinstance(value, np.ndarray):
                value.flags.writeable = False

    @property
    def h(self):
        return self.schedule.h

    def replace(self, **kwargs):
        data = dict(self.__dict__)
        data.update(kwargs)
        return type(self)(**data)

    def swing_at(self, leg, k):
        for swing in self.swings:
            if swing.leg == leg and k in swing.window:
                return swing
        return None

    def planted(self, leg):
        """True if ``leg`` stands at column 0 and has not lifted off"""
        return self.schedule.stance(leg, 0) and self.swing_at(leg, 0) is None


def _clip_to_terrain(terrain, side, x, margin):
    best = None
    for a, b, height in terrain.allowed_intervals(side):
        lo, hi = a + margin, b - margin
        if lo > hi:
            lo = hi = 0.5 * (a + b)
        candidate = min(hi, max(lo, x))
        if best is None or abs(candidate - x) < abs(best[0] - x):
            best = (candidate, height)
    if best is None:
        LOG.warning("no foothold allowed for the %s foot, keeping x=%.3f", side, x)
        height = terrain.height_at(x)
        return x, 0.0 if height is None else height
    return best


def landing_target(terrain, side, p_c, velocity, step_time, com_offset, lateral, margin):
    """Capture-style foothold: hip projection plus half the stride, clipped into allowed terrain"""
    x_nominal = p_c[0] - com_offset[0] + 0.5 * velocity * step_time
    x, height = _clip_to_terrain(terrain, side, x_nominal, margin)
    return np.array([x, lateral, height])


def _foot_plan(schedule, feet0, targets, apex):
    """Swing curves, foot path and placement references.

       ``targets`` holds one landing target per swing window, in the order of
       ``schedule.windows()``.
    """
    h = schedule.h
    windows = schedule.windows()
    n_legs = feet0.shape[0]
    planted = [feet0[leg] for leg in range(n_legs)]
    swings = []
    for window, target in zip(windows, targets):
        start = planted[window.leg]
        s0 = max(0.0, window.phase_at(0))
        swing_apex = clearance_apex(apex, start[-1], target[-1])
        swings.append(PlannedSwing(window, SwingTrajectory(start, target, swing_apex, s0=s0)))
        planted[window.leg] = np.asarray(target, dtype=float)
    p_f_path = np.zeros((h + 1, n_legs, 3))
    placement = np.zeros((h + 1, n_legs, 3))
    for leg in range(n_legs):
        position = feet0[leg]
        leg_swings = [swing for swing in swings if swing.leg == leg]
        for k in range(h + 1):
            current = None
            for swing in leg_swings:
                if k in swing.window:
                    current = swing
                    break
                if swing.window.end <= k:
                    position = swing.target
            if current is not None:
                p_f_path[k, leg] = current.position(k)
                placement[k, leg] = current.target
            else:
                p_f_path[k, leg] = position
                placement[k, leg] = position
    next_targets = np.array(feet0, dtype=float)
    for leg in range(n_legs):
        for swing in swings:
            if swing.leg == leg and swing.window.end > 0:
                next_targets[leg] = swing.target
                break
    return swings, p_f_path, placement, next_targets


def _pose_from_targets(model, base, yaw, feet, clamp, step):
    """Generalized coordinates with a level torso at ``base`` and the feet at ``feet``"""
    q = np.zeros(model.nq)
    q[0:3] = base
    q[5] = yaw
    rotation = rotation_zyx(0.0, 0.0, yaw)
    for index, leg in enumerate(model.legs):
        foot = np.asarray(feet[index], dtype=float)
        if model.planar:
            hip_joint = model.joints[int(np.flatnonzero(model.q_index == leg.joints[0])[0])]
            hip = base + rotation @ hip_joint.origin
            reach = np.hypot(foot[0] - hip[0], foot[2] - hip[2])
            max_reach = REACH_FRACTION * (model.l1 + model.l2)
            if reach > max_reach:
                if not clamp:
                    raise OutOfReachError("step {}: {} foot {} m from the hip".format(step, leg.side, reach),
                                          quantity="distance", value=reach, step=step)
                LOG.warning("step %d: clamping %s foot target into reach (%.4f m)", step, leg.side, reach)
                foot = hip + (foot - hip) * (max_reach / reach)
            q_hip, q_knee = leg_ik_planar(model.l1, model.l2, hip, foot)
            q[leg.joints[0]] = q_hip
            q[leg.joints[1]] = q_knee
        else:
            params = LegParams3D.from_model(model, leg.side)
            try:
                q[leg.joints] = leg_ik_3d(params, rotation, 0.0, base, foot)
            except OutOfReachError as err:
                if not clamp:
                    err.step = step
                    raise
                anchor = base + rotation @ params.r_c1
                offset = foot - anchor
                foot = anchor + offset * (REACH_FRACTION * 2.0 * params.l / np.linalg.norm(offset))
                LOG.warning("step %d: clamping %s foot target into reach", step, leg.side)
                q[leg.joints] = leg_ik_3d(params, rotation, 0.0, base, foot)
    return q


def _pose_at_com(model, p_c, yaw, feet, clamp, step, base=None, iterations=12, tol=1e-9):
    """Level-torso configuration whose CoM sits at ``p_c`` with the feet at ``feet``"""
    p_c = np.asarray(p_c, dtype=float)
    base = p_c.copy() if base is None else np.array(base, dtype=float)
    q = _pose_from_targets(model, base, yaw, feet, clamp, step)
    for _ in range(iterations):
        error = p_c - com_position(model, q)
        if np.max(np.abs(error)) <= tol:
            break
        base = base + error
        q = _pose_from_targets(model, base, yaw, feet, clamp, step)
    return q


def _joint_references(model, q0, qd0, p_c_pos, foot_path, com_offset, dt, clamp):
    """Joint, momentum and centroidal pose references along the planned CoM and foot paths"""
    n_cols = p_c_pos.shape[0]
    q_ref = np.zeros((n_cols, model.nq))
    qd_ref = np.zeros((n_cols, model.nq))
    q_ref[0] = q0
    qd_ref[0] = qd0
    for k in range(1, n_cols):
        q_ref[k] = _pose_at_com(model, p_c_pos[k], q0[5], foot_path[k], clamp, k, base=p_c_pos[k] - com_offset)
    for k in range(1, n_cols):
        if k < n_cols - 1:
            qd_ref[k] = (q_ref[k + 1] - q_ref[k]) / dt
        else:
            qd_ref[k] = (q_ref[k] - q_ref[k - 1]) / dt
    h_ref = np.array([centroidal_matrix(model, q_ref[k])[0] @ qd_ref[k] for k in range(n_cols)])
    H_ref = centroidal_pose_integrate(q_ref, qd_ref, model, dt)
    return q_ref, qd_ref, h_ref, H_ref


def standing_configuration(model, p_c, feet, yaw=0.0, iterations=20, tol=1e-12):
    """Level-torso configuration with the CoM at ``p_c`` and the feet at ``feet``"""
    return _pose_at_com(model, p_c, yaw, feet, False, 0, iterations=iterations, tol=tol)


def _foot_positions(model, kin):
    return np.array([kin.contact_position(leg.contact) for leg in model.legs])


def build_reference(state, command, schedule, dt0, terrain, model, com_height=0.38, max_ref_accel=1.0,
                    apex=0.06, placement_margin=0.02, clamp=True, velocity_profile=None):
    """Initial references for one MPC solve.

       Parameters
       ----------
       state: object with ``q`` and ``qd``
       command: float
           forward velocity command (m/s), within [-1, 1]
       schedule: ContactSchedule
       dt0: float
           sampling time of the horizon
       terrain: Terrain
       model: RobotModel
       com_height: float
           CoM height above the mean foothold height
       max_ref_accel: float
           ramp rate of the reference velocity (m/s^2)
       velocity_profile: array, optional
           per-column reference velocity replacing the ramp (padded with its last value)

       Returns
       -------
       ReferenceBundle
    """
    command = check_command(command)
    q0, qd0 = model.check_state(state.q, state.qd)
    kin = forward_kinematics(model, q0)
    a_g, p_c0 = centroidal_matrix(model, q0, kin=kin)
    feet0 = _foot_positions(model, kin)
    v0 = (a_g[0] @ qd0) / model.mass
    com_offset = p_c0 - q0[0:3]
    h = schedule.h
    n_ext = h + 2 * schedule.h_swing + 1
    steps = np.arange(n_ext + 1)
    if velocity_profile is None:
        limit = max_ref_accel * steps * dt0
        velocity = v0 + np.clip(command - v0, -limit, limit)
    else:
        profile = np.asarray(velocity_profile, dtype=float).reshape(-1)
        velocity = np.full(steps.size, profile[-1])
        size = min(profile.size, steps.size)
        velocity[:size] = profile[:size]
    p_c_x = p_c0[0] + np.concatenate([[0.0], np.cumsum(velocity[:-1] * dt0)])
    step_time = schedule.h_swing * dt0
    targets = []
    for window in schedule.windows():
        leg = model.legs[window.leg]
        t = min(window.end, n_ext)
        lateral = feet0[window.leg][1]
        target = landing_target(terrain, leg.side, (p_c_x[t], p_c0[1], p_c0[2]), velocity[t], step_time,
                                com_offset, lateral, placement_margin)
        targets.append(target)
    swings, p_f_path, placement, next_targets = _foot_plan(schedule, feet0, targets, apex)
    p_c_ref = np.zeros((h + 1, 3))
    p_c_ref[0] = p_c0
    for k in range(1, h + 1):
        p_c_ref[k] = (p_c_x[k], p_c0[1], np.mean(placement[k, :, 2]) + com_height)
    q_ref, qd_ref, h_ref, H_ref = _joint_references(model, q0, qd0, p_c_ref, p_f_path, com_offset, dt0, clamp)
    return ReferenceBundle(
        dt=dt0, schedule=schedule, q_ref=q_ref, qd_ref=qd_ref, h_ref=h_ref, H_ref=H_ref,
        p_c_ref=p_c_ref, p_f_ref=placement[:h].copy(), p_f_path=p_f_path, targets=next_targets,
        velocity=velocity[:h + 1].copy(), command=command, com_offset=com_offset, feet0=feet0,
        swings=swings, apex=apex)


def update_reference_from_solution(bundle, p_f_sol, p_c_sol, dt_new, model, clamp=False):
    """References re-solved against the current foot and CoM solutions.

       Landing targets are read from the swing columns of ``p_f_sol``. The
       joint references are re-solved along the CoM reference, re-timed when
       ``dt_new`` differs, and the new foot path; the momentum and pose
       references are recomputed from them with ``dt_new``. ``p_c_sol`` is
       only checked for leg reach against the new foot path.

       Raises
       ------
       OutOfReachError
           naming the offending step, unless ``clamp`` is set
    """
    h = bundle.h
    p_f_sol = np.asarray(p_f_sol, dtype=float)
    p_c_sol = np.asarray(p_c_sol, dtype=float)
    if p_f_sol.shape != (h, bundle.feet0.shape[0], 3) or p_c_sol.shape != (h, 3):
        raise ValueError("solution shapes {} / {} do not match horizon {}".format(p_f_sol.shape, p_c_sol.shape, h))
    targets = []
    for swing in bundle.swings:
        column = max(swing.window.start, 0)
        if column < h:
            targets.append(p_f_sol[column, swing.leg])
        else:
            targets.append(swing.target)
    swings, p_f_path, placement, next_targets = _foot_plan(bundle.schedule, bundle.feet0, targets, bundle.apex)
    p_c_ref = bundle.p_c_ref
    if dt_new != bundle.dt:
        p_c_ref = np.array(p_c_ref)
        p_c_ref[:, 0] = p_c_ref[0, 0] + np.concatenate([[0.0], np.cumsum(bundle.velocity[:h] * dt_new)])
    yaw = bundle.q_ref[0][5]
    for k in range(1, h):
        try:
            _pose_from_targets(model, p_c_sol[k] - bundle.com_offset, yaw, p_f_path[k], False, k)
        except OutOfReachError:
            if not clamp:
                raise
            LOG.warning("step %d: solution CoM out of leg reach", k)
    q_ref, qd_ref, h_ref, H_ref = _joint_references(
        model, bundle.q_ref[0], bundle.qd_ref[0], p_c_ref, p_f_path, bundle.com_offset, dt_new, clamp)
    return bundle.replace(
        dt=dt_new, q_ref=q_ref, qd_ref=qd_ref, h_ref=h_ref, H_ref=H_ref, p_c_ref=p_c_ref,
        p_f_ref=placement[:h].copy(), p_f_path=p_f_path, targets=next_targets, swings=swings)
