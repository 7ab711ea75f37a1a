"""
MPC weights, solver tolerances and wrench bounds.

Weight profiles may be given either in full spatial form or in planar
form, listing only the sagittal components:

    L1_h, L1_H  (6,) spatial, (3,) planar: l_x, l_z, k_y
    L1_pf, L1_pc, L2_f  (3,) spatial, (2,) planar: x, z
    L2_tau  (3,) spatial, (1,) planar: y

Out-of-plane weights of a planar profile are zero.
"""

import logging

import numpy as np

from ..config import get_config_section, register_config

__all__ = [
    "MpcWeights",
    "SolverTolerances",
    "WrenchBounds",
    "MpcParams",
    "PROFILES",
]

LOG = logging.getLogger(__name__)

PROFILES = {
    "planar_sim": {
        "L1_h": [20.0, 20.0, 20.0],
        "L1_H": [200.0, 200.0, 300.0],
        "L1_pf": [0.01, 0.01],
        "L1_pc": [100.0, 300.0],
        "L2_f": [0.0001, 0.0001],
        "L2_tau": [0.001],
        "h": 10,
        "h_swing": 5,
        "dt_min": 0.03,
        "dt_max": 0.06,
        "dt_nominal": 0.05,
        "mu": 0.7,
        "f_min": 10.0,
        "f_max": 250.0,
    },
    "spatial_sim": {
        "L1_h": [10.0, 10.0, 10.0, 10.0, 10.0, 10.0],
        "L1_H": [200.0, 200.0, 200.0, 200.0, 200.0, 200.0],
        "L1_pf": [0.1, 0.1, 0.1],
        "L1_pc": [100.0, 100.0, 250.0],
        "L2_f": [0.0001, 0.0001, 0.0001],
        "L2_tau": [0.001, 0.001, 0.001],
        "h": 10,
        "h_swing": 5,
        "dt_min": 0.045,
        "dt_max": 0.07,
        "dt_nominal": 0.05,
        "mu": 0.7,
        "f_min": 10.0,
        "f_max": 500.0,
    },
    "hardware": {
        "L1_h": [5.0, 5.0, 5.0, 1.0, 1.0, 1.0],
        "L1_H": [400.0, 400.0, 400.0, 300.0, 300.0, 300.0],
        "L1_pf": [0.1, 0.1, 0.1],
        "L1_pc": [400.0, 400.0, 500.0],
        "L2_f": [0.00001, 0.00001, 0.00001],
        "L2_tau": [0.0001, 0.0001, 0.0001],
        "h": 10,
        "h_swing": 5,
        "dt_min": 0.045,
        "dt_max": 0.07,
        "dt_nominal": 0.05,
        "mu": 0.7,
        "f_min": 10.0,
        "f_max": 500.0,
    },
}

COMMON = {
    "j_max": 50,
    "eta_pos": 1e-5,
    "eta_f": 1e-2,
    "eta_tau": 1e-3,
    "fallback_window": 3,
    "com_height": 0.38,
    "max_ref_accel": 1.0,
    "placement_margin": 0.02,
    "apex": 0.06,
    "share_foot_variables": True,
    "tau_max": 5.0,
    "reach_x": 0.35,
    "reach_y": 0.25,
    "reach_z": 0.15,
    "diagnostics_file": None,
}

WEIGHT_KEYS = ("L1_h", "L1_H", "L1_pf", "L1_pc", "L2_f", "L2_tau")

register_config(
    name="mpc",
    default=dict({"profile": "planar_sim"}, **{key: None for key in sorted(set(PROFILES["planar_sim"]) | set(COMMON))}))


def _expand(values, size, planar_components):
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size == size:
        return values
    if values.size == len(planar_components):
        full = np.zeros(size)
        full[list(planar_components)] = values
        return full
    raise ValueError("weight vector of length {}: expected {} or {}".format(values.size, size, len(planar_components)))


class MpcWeights(object):
    """Tracking (L1) and regularization (L2) weights as full spatial vectors"""

    def __init__(self, L1_h, L1_H, L1_pf, L1_pc, L2_f, L2_tau):
        self.L1_h = _expand(L1_h, 6, (0, 2, 4))
        self.L1_H = _expand(L1_H, 6, (0, 2, 4))
        self.L1_pf = _expand(L1_pf, 3, (0, 2))
        self.L1_pc = _expand(L1_pc, 3, (0, 2))
        self.L2_f = _expand(L2_f, 3, (0, 2))
        self.L2_tau = _expand(L2_tau, 3, (1,))
        for key in WEIGHT_KEYS:
            if np.any(getattr(self, key) < 0.0):
                raise ValueError("negative weight in {}".format(key))

    @classmethod
    def from_dict(cls, data):
        return cls(**{key: data[key] for key in WEIGHT_KEYS})

    def scaled(self, factor, keys=WEIGHT_KEYS):
        """Copy with the weights in ``keys`` multiplied by ``factor``"""
        data = {key: getattr(self, key) * (factor if key in keys else 1.0) for key in WEIGHT_KEYS}
        return type(self)(**data)

    def as_dict(self):
        return {key: getattr(self, key).tolist() for key in WEIGHT_KEYS}


class SolverTolerances(object):
    def __init__(self, j_max=50, eta_pos=1e-5, eta_f=1e-2, eta_tau=1e-3):
        if j_max < 1 or min(eta_pos, eta_f, eta_tau) <= 0.0:
            raise ValueError("tolerances must be positive")
        self.j_max = int(j_max)
        self.eta_pos = float(eta_pos)
        self.eta_f = float(eta_f)
        self.eta_tau = float(eta_tau)


class WrenchBounds(object):
    """Normal force range, pyramid friction and contact-moment limits.

       The pyramid coefficient is inscribed in the friction cone:
       mu_box = sqrt(2) / 2 * mu. A line foot of length ``foot_length``
       bounds the pitch moment by |tau_y| <= foot_length / 2 * f_z.
    """

    def __init__(self, f_min=10.0, f_max=250.0, mu=0.7, foot_length=0.0, tau_max=5.0):
        if not f_min < f_max:
            raise ValueError("f_min {!r} must be below f_max {!r}".format(f_min, f_max))
        self.f_min = float(f_min)
        self.f_max = float(f_max)
        self.mu = float(mu)
        self.foot_length = float(foot_length)
        self.tau_max = float(tau_max)

    @property
    def mu_box(self):
        return np.sqrt(2.0) / 2.0 * self.mu

    @property
    def tau_min(self):
        return -self.tau_max


class MpcParams(object):
    """Everything the sequential MPC needs besides the robot model"""

    def __init__(self, weights, tolerances, wrench, h=10, h_swing=5, dt_min=0.03, dt_max=0.06, dt_nominal=0.05,
                 fallback_window=3, com_height=0.38, max_ref_accel=1.0, placement_margin=0.02, apex=0.06,
                 share_foot_variables=True, reach_x=0.35, reach_y=0.25, reach_z=0.15, diagnostics_file=None,
                 profile=None):
        if not 0.0 < dt_min <= dt_nominal <= dt_max:
            raise ValueError("inconsistent sampling times [{}, {}] / {}".format(dt_min, dt_max, dt_nominal))
        self.weights = weights
        self.tolerances = tolerances
        self.wrench = wrench
        self.h = int(h)
        self.h_swing = int(h_swing)
        self.dt_min = float(dt_min)
        self.dt_max = float(dt_max)
        self.dt_nominal = float(dt_nominal)
        self.fallback_window = int(fallback_window)
        self.com_height = float(com_height)
        self.max_ref_accel = float(max_ref_accel)
        self.placement_margin = float(placement_margin)
        self.apex = float(apex)
        self.share_foot_variables = bool(share_foot_variables)
        self.reach_x = float(reach_x)
        self.reach_y = float(reach_y)
        self.reach_z = float(reach_z)
        self.diagnostics_file = diagnostics_file
        self.profile = profile

    @classmethod
    def from_dict(cls, data, foot_length=0.0):
        data = dict(data)
        weights = MpcWeights.from_dict(data)
        tolerances = SolverTolerances(data["j_max"], data["eta_pos"], data["eta_f"], data["eta_tau"])
        wrench = WrenchBounds(data["f_min"], data["f_max"], data["mu"], foot_length, data["tau_max"])
        kwargs = {key: value for key, value in data.items()
                  if key not in WEIGHT_KEYS and key not in ("j_max", "eta_pos", "eta_f", "eta_tau",
                                                               "f_min", "f_max", "mu", "tau_max")}
        return cls(weights, tolerances, wrench, **kwargs)

    @classmethod
    def from_config(cls, config=None, model=None, **overrides):
        """Profile values overlaid with the explicitly set ``mpc`` keys and ``overrides``"""
        section = get_config_section("mpc", config)
        profile = overrides.pop("profile", None) or section.get("profile") or "planar_sim"
        if profile not in PROFILES:
            raise ValueError("unknown mpc profile {!r}".format(profile))
        data = dict(PROFILES[profile])
        data.update(COMMON)
        data.update({key: value for key, value in section.items() if value is not None and key != "profile"})
        data.update(overrides)
        data["profile"] = profile
        foot_length = 0.0 if model is None else model.l_f
        LOG.debug("mpc parameters: profile %s", profile)
        return cls.from_dict(data, foot_length=foot_length)

    def clip_dt(self, dt):
        return float(np.clip(dt, self.dt_min, self.dt_max))

    def replace(self, **kwargs):
        data = dict(self.__dict__)
        data.update(kwargs)
        return type(self)(**data)
