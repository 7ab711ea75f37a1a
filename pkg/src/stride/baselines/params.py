"""
Weights and settings of the baseline NMPCs.

Planar analogues of the spatial tables: base blocks are ordered
(x, z, pitch), momentum blocks (l_x, l_z, k_y).
"""

import numpy as np

from ..config import get_config_section, register_config
from ..utils import as_vector

__all__ = [
    "WbWeights",
    "KdWeights",
    "BaselineSettings",
]

register_config(
    name="baselines",
    default={
        "mu": 0.7,
        "f_max": 250.0,
        "dt_bounds": [0.03, 0.06],
        "sqp_max_iter": 50,
        "closed_loop_max_iter": 4,
        "wholebody": {
            "Q1_base": [100.0, 100.0, 150.0],
            "Q1_joints": 50.0,
            "Q2": 1e-3,
            "Q3": 1e-4,
            "Q4_base": [1.0, 1.0, 1.0],
            "Q4_joints": 1.0,
        },
        "kinodynamic": {
            "R1": [10.0, 10.0, 20.0],
            "R2_base": [100.0, 100.0, 150.0],
            "R2_joints": 50.0,
            "R2_vbase": [1.0, 1.0, 1.0],
            "R2_vjoints": 1.0,
            "R2_f": 1e-5,
        },
    })


def _pose_weights(base, joints, n_j):
    return np.concatenate([as_vector(base, 3, "base weights"), as_vector(joints, n_j, "joint weights")])


def _check(name, value):
    value = np.asarray(value, dtype=float)
    if np.any(value < 0.0) or not np.all(np.isfinite(value)):
        raise ValueError("{}: weights must be finite and non-negative, got {!r}".format(name, value.tolist()))


class WbWeights(object):
    """Whole-body tracking weights: Q1 pose, Q2 joint torque, Q3 contact force, Q4 velocity"""

    def __init__(self, Q1_base=(100.0, 100.0, 150.0), Q1_joints=50.0, Q2=1e-3, Q3=1e-4,
                 Q4_base=(1.0, 1.0, 1.0), Q4_joints=1.0):
        for name, value in (("Q1_base", Q1_base), ("Q1_joints", Q1_joints), ("Q2", Q2), ("Q3", Q3),
                            ("Q4_base", Q4_base), ("Q4_joints", Q4_joints)):
            _check(name, value)
        self.Q1_base = Q1_base
        self.Q1_joints = Q1_joints
        self.Q2 = Q2
        self.Q3 = Q3
        self.Q4_base = Q4_base
        self.Q4_joints = Q4_joints

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    @classmethod
    def from_config(cls, config=None):
        return cls.from_dict(get_config_section("baselines", config)["wholebody"])

    def as_dict(self):
        return {key: np.asarray(value, dtype=float).tolist() for key, value in self.__dict__.items()}

    def step_weights(self, n_j):
        """Diagonal weights of one (q, v, tau, lam) step block"""
        return np.concatenate([
            _pose_weights(self.Q1_base, self.Q1_joints, n_j),
            _pose_weights(self.Q4_base, self.Q4_joints, n_j),
            as_vector(self.Q2, n_j, "Q2"),
            as_vector(self.Q3, 4, "Q3"),
        ])


class KdWeights(object):
    """Kino-dynamic weights: R1 momentum tracking, R2 pose, velocity and force tracking"""

    def __init__(self, R1=(10.0, 10.0, 20.0), R2_base=(100.0, 100.0, 150.0), R2_joints=50.0,
                 R2_vbase=(1.0, 1.0, 1.0), R2_vjoints=1.0, R2_f=1e-5):
        for name, value in (("R1", R1), ("R2_base", R2_base), ("R2_joints", R2_joints), ("R2_vbase", R2_vbase),
                            ("R2_vjoints", R2_vjoints), ("R2_f", R2_f)):
            _check(name, value)
        self.R1 = R1
        self.R2_base = R2_base
        self.R2_joints = R2_joints
        self.R2_vbase = R2_vbase
        self.R2_vjoints = R2_vjoints
        self.R2_f = R2_f

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    @classmethod
    def from_config(cls, config=None):
        return cls.from_dict(get_config_section("baselines", config)["kinodynamic"])

    def as_dict(self):
        return {key: np.asarray(value, dtype=float).tolist() for key, value in self.__dict__.items()}

    def momentum_weights(self):
        return as_vector(self.R1, 3, "R1")

    def step_weights(self, n_j):
        """Diagonal weights of one (q, v, lam) step block"""
        return np.concatenate([
            _pose_weights(self.R2_base, self.R2_joints, n_j),
            _pose_weights(self.R2_vbase, self.R2_vjoints, n_j),
            as_vector(self.R2_f, 4, "R2_f"),
        ])


class BaselineSettings(object):
    def __init__(self, mu=0.7, f_max=250.0, dt_bounds=(0.03, 0.06), sqp_max_iter=50, closed_loop_max_iter=4):
        self.mu = float(mu)
        self.f_max = float(f_max)
        self.dt_bounds = tuple(float(b) for b in dt_bounds)
        self.sqp_max_iter = int(sqp_max_iter)
        self.closed_loop_max_iter = int(closed_loop_max_iter)

    @classmethod
    def from_config(cls, config=None):
        section = get_config_section("baselines", config)
        return cls(**{key: section[key] for key in ("mu", "f_max", "dt_bounds", "sqp_max_iter",
                                                    "closed_loop_max_iter")})
