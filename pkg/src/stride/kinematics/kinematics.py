"""
Forward kinematics, Jacobians and velocity-product terms.

All quantities are world-frame. Jacobians have six rows, linear first
then angular, and one column per generalized coordinate.
"""

import numpy as np

from ..utils import cross3, rot_x, rot_y, rot_z, rotation_axis_angle

__all__ = [
    "KinematicState",
    "MotionState",
    "forward_kinematics",
    "com_position",
    "point_jacobian",
    "link_jacobians",
    "contact_jacobian",
    "contact_positions",
    "motion_recursion",
    "point_bias_acceleration",
]

_PRINCIPAL_ROTATIONS = (rot_x, rot_y, rot_z)


def _axis_rotation(axis, angle):
    nonzero = np.flatnonzero(axis)
    if nonzero.size == 1 and axis[nonzero[0]] == 1.0:
        return _PRINCIPAL_ROTATIONS[nonzero[0]](angle)
    return rotation_axis_angle(axis, angle)


class KinematicState(object):
    """World frames of every joint (child side), link and contact point"""

    def __init__(self, model, q, rotations, origins, axes):
        self.model = model
        self.q = q
        self.rotations = rotations
        self.origins = origins
        self.axes = axes
        link_joints = [link.joint for link in model.links]
        self.link_rotations = rotations[link_joints]
        self.link_origins = origins[link_joints]
        self.link_coms = np.array([
            origins[link.joint] + rotations[link.joint] @ link.com for link in model.links])
        self.contacts = np.array([
            origins[model.links[c.link].joint] + rotations[model.links[c.link].joint] @ c.position
            for c in model.contacts])

    @property
    def base_rotation(self):
        return self.link_rotations[0]

    def contact_position(self, contact_id):
        return self.contacts[self.model.contact_index(contact_id)]


def forward_kinematics(model, q):
    """World poses of every link frame and contact point.

       Parameters
       ----------
       model: RobotModel
       q: array
           generalized coordinates (6 + n_j)

       Returns
       -------
       KinematicState
    """
    q, _ = model.check_state(q)
    n_joints = len(model.joints)
    rotations = np.empty((n_joints, 3, 3))
    origins = np.empty((n_joints, 3))
    axes = np.empty((n_joints, 3))
    identity = np.eye(3)
    zero = np.zeros(3)
    for index, joint in enumerate(model.joints):
        if joint.parent < 0:
            r_parent, o_parent = identity, zero
        else:
            r_parent, o_parent = rotations[joint.parent], origins[joint.parent]
        value = q[joint.q_index]
        axes[index] = r_parent @ joint.axis
        if joint.kind == "prismatic":
            rotations[index] = r_parent
            origins[index] = o_parent + r_parent @ (joint.origin + joint.axis * value)
        else:
            rotations[index] = r_parent @ _axis_rotation(joint.axis, value)
            origins[index] = o_parent + r_parent @ joint.origin
    return KinematicState(model, q, rotations, origins, axes)


def com_position(model, q=None, kin=None):
    """Mass-weighted mean of the link CoM positions"""
    if kin is None:
        kin = forward_kinematics(model, q)
    masses = np.array([link.mass for link in model.links])
    return masses @ kin.link_coms / masses.sum()


def point_jacobian(kin, link, point):
    """6 x nq Jacobian of a world point rigidly attached to ``link``"""
    model = kin.model
    jac = np.zeros((6, model.nq))
    support = model.support[link]
    cols = model.q_index[support]
    axes = kin.axes[support]
    revolute = model.revolute[support]
    lever = point - kin.origins[support]
    linear = np.where(revolute[:, None], np.cross(axes, lever), axes)
    jac[0:3, cols] = linear.T
    jac[3:6, cols] = np.where(revolute[:, None], axes, 0.0).T
    return jac


def link_jacobians(kin):
    """Jacobians of every link CoM"""
    return [point_jacobian(kin, index, kin.link_coms[index]) for index in range(len(kin.model.links))]


def contact_jacobian(model, q, contact_id, kin=None):
    """Spatial Jacobian of a contact point: rows [linear; angular] of its link"""
    if kin is None:
        kin = forward_kinematics(model, q)
    index = model.contact_index(contact_id)
    contact = model.contacts[index]
    return point_jacobian(kin, contact.link, kin.contacts[index])


def contact_positions(model, q):
    return forward_kinematics(model, q).contacts


class MotionState(object):
    """Per-joint-frame angular velocity, origin velocity and the bias
       (zero joint acceleration) angular/linear accelerations"""

    def __init__(self, omega, velocity, alpha, accel):
        self.omega = omega
        self.velocity = velocity
        self.alpha = alpha
        self.accel = accel


def motion_recursion(kin, qd):
    """Forward velocity/acceleration pass with qdd = 0 and no gravity"""
    model = kin.model
    n_joints = len(model.joints)
    omega = np.zeros((n_joints, 3))
    velocity = np.zeros((n_joints, 3))
    alpha = np.zeros((n_joints, 3))
    accel = np.zeros((n_joints, 3))
    zero = np.zeros(3)
    for index, joint in enumerate(model.joints):
        if joint.parent < 0:
            w_p, v_p, al_p, a_p, o_p = zero, zero, zero, zero, zero
        else:
            parent = joint.parent
            w_p, v_p, al_p, a_p, o_p = omega[parent], velocity[parent], alpha[parent], accel[parent], kin.origins[parent]
        rate = kin.axes[index] * qd[joint.q_index]
        lever = kin.origins[index] - o_p
        v = v_p + cross3(w_p, lever)
        a = a_p + cross3(al_p, lever) + cross3(w_p, cross3(w_p, lever))
        if joint.kind == "prismatic":
            omega[index] = w_p
            alpha[index] = al_p
            velocity[index] = v + rate
            accel[index] = a + 2.0 * cross3(w_p, rate)
        else:
            omega[index] = w_p + rate
            alpha[index] = al_p + cross3(w_p, rate)
            velocity[index] = v
            accel[index] = a
    return MotionState(omega, velocity, alpha, accel)


def point_bias_acceleration(kin, motion, link, point):
    """Acceleration of a point of ``link`` at zero qdd (the Jdot*qd term)"""
    joint = kin.model.links[link].joint
    lever = point - kin.origins[joint]
    w = motion.omega[joint]
    return (motion.accel[joint] + cross3(motion.alpha[joint], lever) + cross3(w, cross3(w, lever)),
            motion.alpha[joint])
