"""
Centroidal pose integration.

H is the primitive of h = A_G qd. Since d(A_G q)/dt = A_G_dot q + h,

    H_k = A_G(q_k) q_k - sum_{i<k} A_G_dot(q_i, qd_i) q_i dt

with the integration constant anchored so that H_0 = A_G(q_0) q_0.
"""

import numpy as np

from ..kinematics import centroidal_momentum

__all__ = [
    "centroidal_pose_integrate",
]


def centroidal_pose_integrate(q_traj, qd_traj, model, dt):
    """Centroidal pose along a uniformly sampled joint trajectory.

       Parameters
       ----------
       q_traj: (N, nq) array
       qd_traj: (N, nq) array
       model: RobotModel
       dt: float

       Returns
       -------
       (N, 6) array
    """
    q_traj = np.asarray(q_traj, dtype=float)
    qd_traj = np.asarray(qd_traj, dtype=float)
    if q_traj.shape != qd_traj.shape:
        raise ValueError("q and qd trajectories differ in shape: {} != {}".format(q_traj.shape, qd_traj.shape))
    poses = np.zeros((q_traj.shape[0], 6))
    drift = np.zeros(6)
    for k, (q, qd) in enumerate(zip(q_traj, qd_traj)):
        quantities = centroidal_momentum(model, q, qd)
        poses[k] = quantities.A_G @ q - drift
        drift = drift + quantities.A_G_dot @ q * dt
    return poses
