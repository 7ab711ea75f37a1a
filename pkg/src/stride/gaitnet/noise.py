"""
Sensor-noise robustness of the step-duration network.

Zero-mean Gaussian noise is added to the state features, one standard
deviation per channel (angles, angular rates, CoM positions, CoM
velocities); foot targets are planned quantities and stay clean.
"""

import logging

import numpy as np

from ..config import get_config_section
from ..utils import make_rng

__all__ = [
    "CHANNELS",
    "NoiseProfile",
    "evaluate_noise",
    "noise_sweep",
]

LOG = logging.getLogger(__name__)

CHANNELS = {
    "angle": ("roll", "pitch", "yaw"),
    "rate": ("roll_rate", "pitch_rate", "yaw_rate"),
    "position": ("p_c_x", "p_c_y", "p_c_z"),
    "velocity": ("v_c_x", "v_c_y", "v_c_z"),
}


class NoiseProfile(object):
    def __init__(self, name="all", sigmas=None):
        sigmas = dict(sigmas or {})
        unknown = set(sigmas) - set(CHANNELS)
        if unknown:
            raise ValueError("unknown noise channels {!r}".format(sorted(unknown)))
        for channel, sigma in sigmas.items():
            if sigma < 0.0:
                raise ValueError("negative sigma {!r} for {}".format(sigma, channel))
        self.name = name
        self.sigmas = {channel: float(sigmas.get(channel, 0.0)) for channel in CHANNELS}

    @classmethod
    def from_config(cls, config=None):
        return cls("all", get_config_section("gaitnet", config)["noise"])

    def scaled(self, factor):
        return type(self)(self.name, {channel: sigma * factor for channel, sigma in self.sigmas.items()})

    def only(self, channel):
        return type(self)(channel, {channel: self.sigmas[channel]})

    def sigma_vector(self, names):
        sigma = np.zeros(len(names))
        for channel, channel_names in CHANNELS.items():
            for index, name in enumerate(names):
                if name in channel_names:
                    sigma[index] = self.sigmas[channel]
        return sigma

    def apply(self, features, names, rng):
        """Noisy copy of ``features`` (m, n); zero sigmas leave columns untouched"""
        features = np.array(features, dtype=float)
        sigma = self.sigma_vector(names)
        for index in np.flatnonzero(sigma > 0.0):
            features[:, index] += rng.normal(0.0, sigma[index], size=features.shape[0])
        return features

    def __repr__(self):
        return "{}({!r}, {!r})".format(type(self).__name__, self.name, self.sigmas)


def _rmse(model, features, labels):
    return float(np.sqrt(np.mean((model.predict_label(features) - labels) ** 2)))


def evaluate_noise(model, testset, noise_config=None, seed=0, scale=1.0, config=None):
    """Prediction RMSE against the clean labels, per noise profile.

       Profiles are the clean features, each channel alone and all channels
       together, at ``scale`` times the configured sigmas.

       Returns
       -------
       list
           rows with ``profile``, ``scale``, ``rmse`` and ``delta`` (gap to clean)
    """
    if noise_config is None:
        base = NoiseProfile.from_config(config)
    elif isinstance(noise_config, NoiseProfile):
        base = noise_config
    else:
        base = NoiseProfile("all", noise_config)
    base = base.scaled(scale)
    testset = testset.successful()
    features, labels = testset.features, testset.labels
    clean = _rmse(model, features, labels)
    profiles = [base.only(channel) for channel in CHANNELS] + [base]
    rows = [{"profile": "clean", "scale": scale, "rmse": clean, "delta": 0.0}]
    for profile in profiles:
        rng = make_rng(seed, "noise", profile.name)
        rmse = _rmse(model, profile.apply(features, testset.names, rng), labels)
        rows.append({"profile": profile.name, "scale": scale, "rmse": rmse, "delta": rmse - clean})
        LOG.debug("noise %s x%g: rmse %.4e", profile.name, scale, rmse)
    return rows


def noise_sweep(model, testset, scales=(0.0, 1.0, 2.0), seeds=(0, 1, 2, 3, 4), noise_config=None, config=None):
    """Mean all-channel RMSE over ``seeds`` for each noise scale"""
    result = []
    for scale in scales:
        values = [evaluate_noise(model, testset, noise_config, seed=seed, scale=scale, config=config)[-1]["rmse"]
                  for seed in seeds]
        result.append({"scale": scale, "rmse": float(np.mean(values))})
    return result
