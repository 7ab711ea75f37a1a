"""
Centroidal momentum operators
"""

import numpy as np

from ..utils import skew
from .kinematics import forward_kinematics, link_jacobians

__all__ = [
    "CentroidalState",
    "CentroidalQuantities",
    "centroidal_matrix",
    "centroidal_momentum",
    "joints_to_momenta",
]

AG_DOT_STEP = 1e-6


class CentroidalState(object):
    """Centroidal pose H and spatial momentum h = [l_G; k_G]"""

    def __init__(self, H, h):
        self.H = np.asarray(H, dtype=float).reshape(6)
        self.h = np.asarray(h, dtype=float).reshape(6)

    @property
    def l_G(self):
        return self.h[0:3]

    @property
    def k_G(self):
        return self.h[3:6]

    def as_vector(self):
        return np.concatenate([self.H, self.h])

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x[0:6], x[6:12])

    def is_finite(self):
        return bool(np.all(np.isfinite(self.H)) and np.all(np.isfinite(self.h)))

    def __repr__(self):
        return "{}(H={!r}, h={!r})".format(type(self).__name__, self.H.tolist(), self.h.tolist())


class CentroidalQuantities(object):
    def __init__(self, A_G, A_G_dot, h, p_c):
        self.A_G = A_G
        self.A_G_dot = A_G_dot
        self.h = h
        self.p_c = p_c

    @property
    def l_G(self):
        return self.h[0:3]

    @property
    def k_G(self):
        return self.h[3:6]


def centroidal_matrix(model, q, kin=None):
    """Centroidal momentum matrix A_G (6 x nq) and the CoM position"""
    if kin is None:
        kin = forward_kinematics(model, q)
    masses = np.array([link.mass for link in model.links])
    p_c = masses @ kin.link_coms / masses.sum()
    a_g = np.zeros((6, model.nq))
    for link, rot, com, jac in zip(model.links, kin.link_rotations, kin.link_coms, link_jacobians(kin)):
        j_lin = jac[0:3]
        a_g[0:3] += link.mass * j_lin
        a_g[3:6] += (rot @ link.inertia @ rot.T) @ jac[3:6] + link.mass * skew(com - p_c) @ j_lin
    return a_g, p_c


def centroidal_momentum(model, q, qd, eps=AG_DOT_STEP):
    """A_G, its time derivative along the state flow and h = A_G qd.

       A_G_dot is the central difference (A_G(q + qd eps) - A_G(q - qd eps)) / (2 eps).
    """
    q, qd = model.check_state(q, qd)
    a_g, p_c = centroidal_matrix(model, q)
    a_plus, _ = centroidal_matrix(model, q + qd * eps)
    a_minus, _ = centroidal_matrix(model, q - qd * eps)
    a_g_dot = (a_plus - a_minus) / (2.0 * eps)
    return CentroidalQuantities(a_g, a_g_dot, a_g @ qd, p_c)


def joints_to_momenta(model, q, qd):
    """Maps a joint-space state to the centroidal state [H; h] with H anchored at A_G(q) q"""
    q, qd = model.check_state(q, qd)
    a_g, _ = centroidal_matrix(model, q)
    return CentroidalState(a_g @ q, a_g @ qd)
