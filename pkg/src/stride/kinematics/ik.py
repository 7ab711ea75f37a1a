"""
Closed-form leg inverse kinematics.

Two solvers:

* ``leg_ik_3d``: five-joint line-foot leg (hip yaw, hip roll, hip pitch,
  knee, ankle pitch) with the foot kept flat and aligned with the body
  heading, so q0 = 0 and q4 = -q2 - q3 - theta;
* ``leg_ik_planar``: two-link sagittal leg used by the planar biped.

Knees bend backwards: knee angles are <= 0.
"""

import numpy as np

from ..errors import OutOfReachError
from ..utils import clamp_unit, rot_x, rot_y, rot_z

__all__ = [
    "LegParams3D",
    "leg_ik_3d",
    "leg_fk_3d",
    "foot_pitch_3d",
    "leg_ik_planar",
    "leg_fk_planar",
]

KNEE_BACKWARD = -1.0


class LegParams3D(object):
    """Geometry of one 5-dof leg.

       Attributes
       ----------
       l: float
           thigh and shank length (m)
       r_21_y: float
           lateral offset from the hip yaw/roll point to the hip pitch joint (m)
       r_c1: array
           body-frame vector from the reference point to the hip yaw/roll point (m)
       side: int
           +1 left, -1 right
    """

    def __init__(self, l=0.22, r_21_y=0.06, r_c1=None, side=1):
        if l <= 0.0:
            raise ValueError("leg length must be positive, got {!r}".format(l))
        if side not in (-1, 1):
            raise ValueError("side must be -1 or +1, got {!r}".format(side))
        self.l = float(l)
        self.r_21_y = float(r_21_y)
        if r_c1 is None:
            r_c1 = (0.0, 0.06 * side, -0.12)
        self.r_c1 = np.asarray(r_c1, dtype=float)
        self.side = int(side)

    @classmethod
    def from_model(cls, model, side):
        leg = model.leg(side)
        return cls(l=model.l1, r_21_y=model.r_21_y, r_c1=leg.r_c1, side=int(leg.sign))

    def mirrored(self):
        return type(self)(l=self.l, r_21_y=self.r_21_y,
                          r_c1=self.r_c1 * np.array([1.0, -1.0, 1.0]), side=-self.side)


def leg_fk_3d(params, R, theta, p_c, q):
    """Foot position by composing the leg chain from the reference point ``p_c``.

       ``theta`` only affects the foot orientation (see ``foot_pitch_3d``).
    """
    l = params.l
    shank = np.array([0.0, 0.0, -l])
    sagittal = rot_y(q[2]) @ (shank + rot_y(q[3]) @ shank)
    hip = np.array([0.0, params.side * params.r_21_y, 0.0])
    leg = rot_z(q[0]) @ rot_x(q[1]) @ (hip + sagittal)
    return np.asarray(p_c, dtype=float) + np.asarray(R) @ (params.r_c1 + leg)


def foot_pitch_3d(theta, q):
    """World foot pitch of a flat-foot chain whose body pitch is ``theta``"""
    return theta + q[2] + q[3] + q[4]


def leg_ik_3d(params, R, theta, p_c, p_f_des):
    """Joint angles placing the foot at ``p_f_des`` with zero foot pitch and yaw.

       Parameters
       ----------
       params: LegParams3D
       R: (3, 3) array
           body rotation
       theta: float
           body pitch (rad)
       p_c: array
           reference point the offset ``r_c1`` is measured from
       p_f_des: array
           desired foot position, world frame

       Returns
       -------
       array
           q0..q4

       Raises
       ------
       OutOfReachError
           if the target is farther than 2 l from the hip pitch joint or
           closer than the lateral offset allows
    """
    l = params.l
    d = params.r_21_y
    r1 = np.asarray(R).T @ (np.asarray(p_f_des, dtype=float) - np.asarray(p_c, dtype=float)) - params.r_c1
    r1yz_sq = r1[1] ** 2 + r1[2] ** 2
    r2yz_sq = r1yz_sq - d ** 2
    if r2yz_sq < -1e-18:
        raise OutOfReachError("target inside the lateral hip offset", quantity="r2yz^2", value=r2yz_sq)
    r2yz = np.sqrt(max(r2yz_sq, 0.0))
    r1xz = np.hypot(r1[0], r2yz)
    ratio = clamp_unit(r1xz / (2.0 * l), "r1xz/2l")
    q3 = 2.0 * np.arcsin(ratio) - np.pi
    q2 = np.arccos(ratio) + np.arctan2(-r1[0], r2yz)
    q1 = np.arctan2(r1[1], -r1[2]) - np.arctan2(params.side * d, r2yz)
    q4 = -q2 - q3 - theta
    return np.array([0.0, q1, q2, q3, q4])


def leg_fk_planar(l1, l2, hip_pos, q_hip, q_knee):
    """Planar foot position (x, z); ``q_hip`` measured from the downward vertical"""
    hip = np.asarray(hip_pos, dtype=float)
    a = q_hip + q_knee
    return np.array([
        hip[0] - l1 * np.sin(q_hip) - l2 * np.sin(a),
        hip[-1] - l1 * np.cos(q_hip) - l2 * np.cos(a),
    ])


def leg_ik_planar(l1, l2, hip_pos, foot_pos, knee_sign=KNEE_BACKWARD):
    """Two-link law-of-cosines IK.

       ``hip_pos`` and ``foot_pos`` may be (x, z) pairs or 3-D points (y ignored).
       The hip angle is measured from the downward vertical, positive
       rotating the thigh backwards about +y.
    """
    hip = np.asarray(hip_pos, dtype=float)
    foot = np.asarray(foot_pos, dtype=float)
    dx = foot[0] - hip[0]
    dz = foot[-1] - hip[-1]
    dist_sq = dx * dx + dz * dz
    if np.sqrt(dist_sq) > l1 + l2 + 1e-9:
        raise OutOfReachError("foot {!r} out of reach from hip {!r}".format(foot, hip),
                              quantity="distance", value=np.sqrt(dist_sq))
    cos_knee = clamp_unit((dist_sq - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), "cos(knee)")
    q_knee = knee_sign * np.arccos(cos_knee)
    q_hip = np.arctan2(-dx, -dz) - np.arctan2(l2 * np.sin(q_knee), l1 + l2 * np.cos(q_knee))
    return q_hip, q_knee
