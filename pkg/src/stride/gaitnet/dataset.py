"""
Step-duration datasets.

One sample per stride: the floating-base state at the stride start and the
next foot targets relative to the CoM, labelled with the executed stride
duration. Samples are collected from closed-loop walking in which every
stride duration is drawn at random and the robot is pushed at the CoM.
"""

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..config import get_config, get_config_section, register_config
from ..errors import DatasetError
from ..kinematics import com_position, joints_to_momenta, load_model
from ..mpc import MpcParams
from ..sim import Disturbance, Scenario, run_scenario
from ..utils import make_rng

__all__ = [
    "FEATURE_NAMES",
    "SPATIAL_FEATURE_NAMES",
    "feature_names",
    "gait_features",
    "GaitSample",
    "GaitDataset",
    "collect_dataset",
]

LOG = logging.getLogger(__name__)

FEATURE_NAMES = (
    "p_c_x", "p_c_z", "v_c_x", "v_c_z", "pitch", "pitch_rate",
    "left_dx", "left_dz", "right_dx", "right_dz",
)

SPATIAL_FEATURE_NAMES = (
    "p_c_x", "p_c_y", "p_c_z", "v_c_x", "v_c_y", "v_c_z",
    "roll", "pitch", "yaw", "roll_rate", "pitch_rate", "yaw_rate",
    "left_dx", "left_dy", "right_dx", "right_dy",
)

register_config(
    name="collect",
    default={
        "episodes": 15,
        "episode_duration": 40.0,
        "duration_range": [0.15, 0.40],
        "command_range": [0.0, 1.0],
        "push_range": [10.0, 100.0],
        "push_duration": 0.2,
        "push_period": 2.0,
        "tracking_error_limit": 0.3,
        "controller": "fixed_dt",
    })


def feature_names(model):
    return FEATURE_NAMES if model.planar else SPATIAL_FEATURE_NAMES


def gait_features(model, q, qd, targets):
    """Feature vector of a stride start.

       Parameters
       ----------
       model: RobotModel
       q, qd: array
           joint-space state
       targets: array
           next foot target per leg, shape (2, 3)

       Returns
       -------
       array
           ``len(feature_names(model))`` features
    """
    q, qd = model.check_state(q, qd)
    momenta = joints_to_momenta(model, q, qd)
    p_c = com_position(model, q)
    v_c = momenta.h[0:3] / model.mass
    targets = np.asarray(targets, dtype=float)
    if not np.all(np.isfinite(targets)):
        raise DatasetError("non-finite foot targets {!r}".format(targets))
    relative = targets - p_c
    if model.planar:
        features = [p_c[0], p_c[2], v_c[0], v_c[2], q[4], qd[4],
                    relative[0, 0], relative[0, 2], relative[1, 0], relative[1, 2]]
    else:
        features = list(p_c) + list(v_c) + list(q[3:6]) + list(qd[3:6]) + \
            [relative[0, 0], relative[0, 1], relative[1, 0], relative[1, 1]]
    return np.array(features, dtype=float)


class GaitSample(object):
    def __init__(self, features, label, success=True, episode=0, stride=0):
        self.features = np.asarray(features, dtype=float)
        self.label = float(label)
        self.success = bool(success)
        self.episode = int(episode)
        self.stride = int(stride)

    def __repr__(self):
        return "{}(label={!r}, success={!r}, episode={!r}, stride={!r})".format(
            type(self).__name__, self.label, self.success, self.episode, self.stride)


class GaitDataset(object):
    """Ordered samples sharing one feature schema"""

    def __init__(self, samples=(), names=FEATURE_NAMES):
        self.names = tuple(names)
        self.samples = []
        for sample in samples:
            self.append(sample)

    def append(self, sample):
        if sample.features.size != len(self.names):
            raise DatasetError("sample has {} features, expected {}".format(sample.features.size, len(self.names)))
        self.samples.append(sample)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def n_features(self):
        return len(self.names)

    @property
    def features(self):
        if not self.samples:
            return np.zeros((0, self.n_features))
        return np.array([sample.features for sample in self.samples])

    @property
    def labels(self):
        return np.array([sample.label for sample in self.samples], dtype=float)

    @property
    def strides(self):
        return np.array([sample.stride for sample in self.samples], dtype=int)

    def successful(self):
        return type(self)([sample for sample in self.samples if sample.success], self.names)

    def split(self, val_fraction=0.2):
        """Train/validation split by stride index: every k-th stride is held out"""
        if not 0.0 < val_fraction < 1.0:
            raise DatasetError("val_fraction {!r} outside (0, 1)".format(val_fraction))
        period = max(2, int(round(1.0 / val_fraction)))
        train, validation = [], []
        for sample in self.samples:
            (validation if sample.stride % period == period - 1 else train).append(sample)
        return type(self)(train, self.names), type(self)(validation, self.names)

    def write_csv(self, filename):
        dirname = os.path.dirname(os.path.abspath(filename))
        os.makedirs(dirname, exist_ok=True)
        with open(filename, "w", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(list(self.names) + ["label", "success", "episode", "stride"])
            for sample in self.samples:
                writer.writerow([repr(float(value)) for value in sample.features] +
                                [repr(sample.label), int(sample.success), sample.episode, sample.stride])
        LOG.info("%d samples written to %s", len(self), filename)

    @classmethod
    def read_csv(cls, filename):
        if not os.path.exists(filename):
            raise FileNotFoundError("dataset {!r} not found".format(filename))
        with open(filename, "r", newline="") as fp:
            reader = csv.reader(fp)
            try:
                header = next(reader)
            except StopIteration:
                raise DatasetError("{}: empty dataset".format(filename)) from None
            if header[-4:] != ["label", "success", "episode", "stride"]:
                raise DatasetError("{}: invalid header {!r}".format(filename, header))
            names = header[:-4]
            dataset = cls(names=names)
            for line, row in enumerate(reader, 2):
                if len(row) != len(header):
                    raise DatasetError("{}:{}: expected {} columns, got {}".format(filename, line, len(header),
                                                                                    len(row)))
                try:
                    values = [float(value) for value in row[:-4]]
                    sample = GaitSample(values, float(row[-4]), bool(int(row[-3])), int(row[-2]), int(row[-1]))
                except ValueError as err:
                    raise DatasetError("{}:{}: {}".format(filename, line, err)) from None
                dataset.append(sample)
        return dataset

    def __repr__(self):
        return "{}(samples={!r}, features={!r})".format(type(self).__name__, len(self), self.n_features)


def _pushes(rng, section, duration):
    low, high = section["push_range"]
    pushes = []
    t = 0.5 * duration
    while t + section["push_duration"] < duration:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        pushes.append(Disturbance(sign * rng.uniform(low, high), t, duration=section["push_duration"]))
        t += section["push_period"]
    return pushes


def _collect_episode(config, seed, episode, episode_duration, controller, pushes, log_dir, model):
    """Samples of one episode; its random streams depend on ``seed`` and ``episode`` only"""
    if isinstance(model, str):
        model = load_model(model)
    section = get_config_section("collect", config)
    h_swing = MpcParams.from_config(config, model=model).h_swing
    d_low, d_high = section["duration_range"]
    limit = float(section["tracking_error_limit"])
    rng = make_rng(seed, "collect", episode)
    command = float(rng.uniform(*section["command_range"]))
    disturbances = _pushes(rng, section, episode_duration) if pushes else []
    scenario = Scenario(name="collect{}".format(episode), command=command, disturbances=disturbances,
                        duration=episode_duration, controller=controller, seed=seed, model=model.name)
    duration_rng = make_rng(seed, "collect", episode, "duration")
    samples = []

    def dt_policy(stride_index, t, state):
        return float(duration_rng.uniform(d_low, d_high)) / h_swing

    def on_stride(record, fell):
        if not (record.completed or fell):
            return
        duration = record.dt * h_swing
        error = abs((record.com_end - record.com_start) - record.command * duration)
        success = record.completed and not fell and error <= limit
        features = gait_features(model, record.q, record.qd, record.targets)
        samples.append(GaitSample(features, duration, success, episode, record.index))

    episode_dir = None if log_dir is None else os.path.join(log_dir, scenario.name)
    log = run_scenario(scenario, config=config, log_dir=episode_dir, dt_policy=dt_policy, stride_callback=on_stride)
    LOG.info("episode %d: command %.3f m/s, %s at t=%.2f, %d samples", episode, command, log.termination,
             log.t_end, len(samples))
    return samples


def collect_dataset(config=None, seed=None, episodes=None, episode_duration=None, controller=None, pushes=True,
                    log_dir=None, model=None, jobs=1):
    """Closed-loop walking episodes with randomized stride durations.

       Each episode draws a constant command in ``command_range``; each
       stride its duration in ``duration_range``. The second half of an
       episode pushes the CoM every ``push_period`` seconds. A stride is
       unsuccessful when the robot falls during it or its CoM advance misses
       the commanded one by more than ``tracking_error_limit``.

       With ``jobs`` > 1 the episodes run in a process pool; the dataset is
       the same as with a single job.

       Returns
       -------
       GaitDataset
    """
    if config is None:
        config = get_config()
    section = get_config_section("collect", config)
    if seed is None:
        seed = get_config_section("stride", config)["random_seed"]
    if episodes is None:
        episodes = section["episodes"]
    if episode_duration is None:
        episode_duration = section["episode_duration"]
    if controller is None:
        controller = section["controller"]
    if model is None:
        model = load_model(get_config_section("robot", config)["model"])
    if jobs < 1:
        raise ValueError("jobs must be positive, got {!r}".format(jobs))
    dataset = GaitDataset(names=feature_names(model))
    arguments = [(config, seed, episode, episode_duration, controller, pushes, log_dir) for episode in range(episodes)]
    if jobs == 1 or episodes <= 1:
        results = [_collect_episode(*args, model) for args in arguments]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, episodes)) as executor:
            futures = [executor.submit(_collect_episode, *args, model.name) for args in arguments]
            results = [future.result() for future in futures]
    for samples in results:
        for sample in samples:
            dataset.append(sample)
    LOG.info("%d episodes collected, %d samples", episodes, len(dataset))
    return dataset
