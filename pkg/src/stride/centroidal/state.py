"""
Centroidal state and the exact one-step centroidal dynamics.

    l_dot = sum_i f_i + m g
    k_dot = sum_i (p_f,i - p_c) x f_i + tau_i

The state stacks the centroidal pose H (time primitive of the momentum)
and the spatial momentum h = [l_G; k_G].
"""

import numpy as np

from ..kinematics.centroidal import CentroidalState
from ..utils import cross3

__all__ = [
    "CentroidalState",
    "ContactConfig",
    "centroidal_rates",
    "cd_step_exact",
]

N_CONTACTS = 2


class ContactConfig(object):
    """Contact wrenches and locations driving the centroidal dynamics.

       Attributes
       ----------
       forces: (2, 3) array
       moments: (2, 3) array
       positions: (2, 3) array
       p_c: (3,) array
       mass: float
       gravity: float
           magnitude, acting along -z
    """

    def __init__(self, forces, moments, positions, p_c, mass, gravity=9.81):
        self.forces = np.asarray(forces, dtype=float).reshape(N_CONTACTS, 3)
        self.moments = np.asarray(moments, dtype=float).reshape(N_CONTACTS, 3)
        self.positions = np.asarray(positions, dtype=float).reshape(N_CONTACTS, 3)
        self.p_c = np.asarray(p_c, dtype=float).reshape(3)
        self.mass = float(mass)
        self.gravity = float(gravity)

    @property
    def gravity_vector(self):
        return np.array([0.0, 0.0, -self.gravity])


def centroidal_rates(config):
    """Rates of change of linear and angular momentum"""
    l_dot = config.mass * config.gravity_vector
    k_dot = np.zeros(3)
    for force, moment, position in zip(config.forces, config.moments, config.positions):
        l_dot = l_dot + force
        k_dot = k_dot + cross3(position - config.p_c, force) + moment
    return l_dot, k_dot


def cd_step_exact(x_k, config, dt):
    """One bilinear centroidal step: momentum by the contact wrenches, H by h dt"""
    if dt <= 0.0:
        raise ValueError("dt must be positive, got {!r}".format(dt))
    l_dot, k_dot = centroidal_rates(config)
    h_next = x_k.h + dt * np.concatenate([l_dot, k_dot])
    H_next = x_k.H + dt * x_k.h
    return CentroidalState(H_next, h_next)
