"""
Search-direction linearization of the centroidal dynamics.

Around the previous solution (f, tau, p_f, p_c) the momentum update is

    l+ = l + dt (sum_i (f_i + df_i) + m g)
    k+ = k + dt sum_i [(p_f,i - p_c) x (f_i + df_i) - f_i x (dp_f,i - dp_c) + tau_i + dtau_i]

the product of two search directions being dropped. H integrates h.
"""

import numpy as np

from ..centroidal import centroidal_rates
from ..utils import skew
from .trajectory import N_LEGS, STEP_SIZE, com_index, foot_index, force_index, moment_index

__all__ = [
    "LinearizedStep",
    "linearize_dynamics",
]

STATE_SIZE = 12


class LinearizedStep(object):
    """x+ = A x + B du + C"""

    def __init__(self, A, B, C, dt):
        self.A = A
        self.B = B
        self.C = C
        self.dt = dt

    def augmented(self):
        """(A', B') acting on the augmented state [x; 1]"""
        A_aug = np.zeros((STATE_SIZE + 1, STATE_SIZE + 1))
        A_aug[:STATE_SIZE, :STATE_SIZE] = self.A
        A_aug[:STATE_SIZE, STATE_SIZE] = self.C
        A_aug[STATE_SIZE, STATE_SIZE] = 1.0
        B_aug = np.vstack([self.B, np.zeros((1, self.B.shape[1]))])
        return A_aug, B_aug

    def propagate(self, x, du=None):
        x = np.asarray(x, dtype=float)
        value = self.A @ x + self.C
        if du is not None:
            value = value + self.B @ du
        return value


def linearize_dynamics(x_k, u_prev_k, dt):
    """State-space matrices of one step about the previous solution.

       Parameters
       ----------
       x_k: CentroidalState
           linearization state (the matrices do not depend on it)
       u_prev_k: ContactConfig
           wrenches and locations of the previous iteration at step k
       dt: float

       Returns
       -------
       LinearizedStep
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive, got {!r}".format(dt))
    A = np.eye(STATE_SIZE)
    A[0:6, 6:12] = dt * np.eye(6)
    B = np.zeros((STATE_SIZE, STEP_SIZE))
    for leg in range(N_LEGS):
        force = u_prev_k.forces[leg]
        arm = u_prev_k.positions[leg] - u_prev_k.p_c
        B[6:9, force_index(leg)] = dt * np.eye(3)
        B[9:12, force_index(leg)] = dt * skew(arm)
        B[9:12, moment_index(leg)] = dt * np.eye(3)
        B[9:12, foot_index(leg)] = -dt * skew(force)
        B[9:12, com_index()] += dt * skew(force)
    l_dot, k_dot = centroidal_rates(u_prev_k)
    C = np.concatenate([np.zeros(6), dt * l_dot, dt * k_dot])
    return LinearizedStep(A, B, C, dt)
