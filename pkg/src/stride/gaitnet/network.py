"""
The step-duration network.

A small MLP maps standardized selected features to the standardized
stride duration. Training runs in torch; the trained weights are exported
to a ``GaitNetModel`` whose numpy forward pass is used in closed loop,
where the predicted duration becomes the MPC sampling time
``duration / h_swing`` clipped to the dt range.
"""

import json
import logging
import os
import time

import numpy as np
import torch

from ..config import get_config_section, register_config
from ..errors import DatasetError, TrainingError
from ..kinematics import load_model
from ..mpc import MpcParams
from .dataset import gait_features
from .pca import pca_select_features

__all__ = [
    "ACTIVATIONS",
    "GaitNetModel",
    "TrainingMetrics",
    "build_mlp",
    "train",
    "predict",
    "load_gaitnet",
]

LOG = logging.getLogger(__name__)

MIN_LABEL_STD = 1e-3

register_config(
    name="gaitnet",
    default={
        "hidden": [32, 32],
        "activation": "tanh",
        "lr": 1e-3,
        "epochs": 200,
        "batch_size": 64,
        "val_fraction": 0.2,
        "n_axes": 4,
        "clip": None,
        "noise": {
            "angle": 0.01,
            "rate": 0.05,
            "position": 0.005,
            "velocity": 0.02,
        },
    })

ACTIVATIONS = {
    "tanh": (np.tanh, torch.nn.Tanh),
    "relu": (lambda x: np.maximum(x, 0.0), torch.nn.ReLU),
    "sigmoid": (lambda x: 1.0 / (1.0 + np.exp(-x)), torch.nn.Sigmoid),
}


def build_mlp(n_inputs, hidden, activation="tanh"):
    if activation not in ACTIVATIONS:
        raise ValueError("unknown activation {!r}".format(activation))
    layers = []
    size = n_inputs
    for width in hidden:
        layers.append(torch.nn.Linear(size, width))
        layers.append(ACTIVATIONS[activation][1]())
        size = width
    layers.append(torch.nn.Linear(size, 1))
    return torch.nn.Sequential(*layers).double()


class GaitNetModel(object):
    """Trained network: feature selection, standardization, weights and output clip"""

    def __init__(self, names, selected, mean, std, label_mean, label_std, layers, activation="tanh",
                 clip=(0.03, 0.06), h_swing=5, robot="biped2d", metrics=None):
        selected = [int(index) for index in selected]
        if len(set(selected)) != len(selected):
            raise ValueError("duplicated feature indices {!r}".format(selected))
        if activation not in ACTIVATIONS:
            raise ValueError("unknown activation {!r}".format(activation))
        self.names = tuple(names)
        self.selected = selected
        self.mean = np.asarray(mean, dtype=float)
        self.std = np.asarray(std, dtype=float)
        self.label_mean = float(label_mean)
        self.label_std = float(label_std)
        self.layers = [(np.asarray(weight, dtype=float), np.asarray(bias, dtype=float)) for weight, bias in layers]
        self.activation = activation
        self.clip = (float(clip[0]), float(clip[1]))
        self.h_swing = int(h_swing)
        self.robot = robot
        self.metrics = dict(metrics or {})
        self._model = None

    @property
    def n_inputs(self):
        return len(self.selected)

    @property
    def model(self):
        if self._model is None:
            self._model = load_model(self.robot)
        return self._model

    def forward(self, inputs):
        """Standardized network output for standardized ``inputs`` (m, n_inputs)"""
        act = ACTIVATIONS[self.activation][0]
        x = np.atleast_2d(inputs)
        for weight, bias in self.layers[:-1]:
            x = act(x @ weight.T + bias)
        weight, bias = self.layers[-1]
        return (x @ weight.T + bias)[:, 0]

    def predict_label(self, features):
        """Stride durations for full feature vectors (n_features,) or (m, n_features)"""
        features = np.asarray(features, dtype=float)
        single = features.ndim == 1
        features = np.atleast_2d(features)
        if features.shape[1] != len(self.names):
            raise DatasetError("expected {} features, got {}".format(len(self.names), features.shape[1]))
        if not np.all(np.isfinite(features)):
            raise DatasetError("non-finite features")
        inputs = (features[:, self.selected] - self.mean) / self.std
        labels = self.forward(inputs) * self.label_std + self.label_mean
        return float(labels[0]) if single else labels

    def duration_to_dt(self, duration):
        return np.clip(np.asarray(duration, dtype=float) / self.h_swing, *self.clip)

    def predict_dt(self, q, qd, targets):
        """Clipped MPC sampling time for the state and the next foot targets"""
        features = gait_features(self.model, q, qd, targets)
        return float(self.duration_to_dt(self.predict_label(features)))

    def as_dict(self):
        return {
            "names": list(self.names),
            "selected": self.selected,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "label_mean": self.label_mean,
            "label_std": self.label_std,
            "layers": [{"weight": weight.tolist(), "bias": bias.tolist()} for weight, bias in self.layers],
            "activation": self.activation,
            "clip": list(self.clip),
            "h_swing": self.h_swing,
            "robot": self.robot,
            "metrics": self.metrics,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            layers = [(layer["weight"], layer["bias"]) for layer in data["layers"]]
            return cls(data["names"], data["selected"], data["mean"], data["std"], data["label_mean"],
                       data["label_std"], layers, activation=data.get("activation", "tanh"),
                       clip=data.get("clip", (0.03, 0.06)), h_swing=data.get("h_swing", 5),
                       robot=data.get("robot", "biped2d"), metrics=data.get("metrics"))
        except (KeyError, TypeError) as err:
            raise DatasetError("invalid network file: {!r}".format(err)) from None

    def save(self, filename):
        dirname = os.path.dirname(os.path.abspath(filename))
        os.makedirs(dirname, exist_ok=True)
        with open(filename, "w") as fp:
            json.dump(self.as_dict(), fp, indent=4)
        LOG.info("network written to %s", filename)

    @classmethod
    def load(cls, filename):
        if not os.path.exists(filename):
            raise FileNotFoundError("network {!r} not found".format(filename))
        with open(filename, "r") as fp:
            try:
                data = json.load(fp)
            except ValueError as err:
                raise DatasetError("{}: {}".format(filename, err)) from None
        return cls.from_dict(data)

    def __repr__(self):
        return "{}(selected={!r}, hidden={!r}, clip={!r})".format(
            type(self).__name__, [self.names[index] for index in self.selected],
            [weight.shape[0] for weight, _ in self.layers[:-1]], self.clip)


def load_gaitnet(filename):
    return GaitNetModel.load(filename)


def predict(model, q, qd, p_f_target):
    """Clipped sampling time predicted by ``model``"""
    return model.predict_dt(q, qd, p_f_target)


class TrainingMetrics(object):
    def __init__(self, train_rmse, val_rmse, n_train, n_val, epochs, final_loss, inference_time):
        self.train_rmse = train_rmse
        self.val_rmse = val_rmse
        self.n_train = n_train
        self.n_val = n_val
        self.epochs = epochs
        self.final_loss = final_loss
        self.inference_time = inference_time

    def as_dict(self):
        return dict(self.__dict__)

    def __repr__(self):
        return "{}(train_rmse={!r}, val_rmse={!r}, inference_time={!r})".format(
            type(self).__name__, self.train_rmse, self.val_rmse, self.inference_time)


def _rmse(model, dataset):
    if len(dataset) == 0:
        return None
    return float(np.sqrt(np.mean((model.predict_label(dataset.features) - dataset.labels) ** 2)))


def _inference_time(model, features, repeat=200):
    """Mean wall time of one single-sample prediction"""
    samples = features[:min(len(features), 20)]
    t_start = time.perf_counter()
    for _ in range(repeat):
        for row in samples:
            model.predict_label(row)
    return (time.perf_counter() - t_start) / (repeat * len(samples))


def train(dataset, selected=None, hyper=None, seed=None, config=None, all_features=False, robot=None):
    """Trains the network on the successful samples of ``dataset``.

       Parameters
       ----------
       dataset: GaitDataset
       selected: list, optional
           feature indices (default: PCA selection, or every feature when
           ``all_features`` is set)
       hyper: dict, optional
           overrides of the ``gaitnet`` config section
       seed: int, optional

       Returns
       -------
       tuple
           (GaitNetModel, TrainingMetrics)

       Raises
       ------
       DatasetError
           on empty training or validation splits
       TrainingError
           on a non-finite loss
    """
    section = get_config_section("gaitnet", config)
    if hyper:
        section.update(hyper)
    if seed is None:
        seed = get_config_section("stride", config)["random_seed"]
    if robot is None:
        robot = get_config_section("robot", config)["model"]
    params = MpcParams.from_config(config)
    clip = section["clip"] or (params.dt_min, params.dt_max)

    dataset = dataset.successful()
    if selected is None:
        if all_features:
            selected = list(range(dataset.n_features))
        else:
            selected = pca_select_features(dataset, n_axes=section["n_axes"]).selected
    selected = [int(index) for index in selected]
    train_set, val_set = dataset.split(section["val_fraction"])
    if len(train_set) == 0 or len(val_set) == 0:
        raise DatasetError("empty split: {} training, {} validation samples".format(len(train_set), len(val_set)))

    features = train_set.features[:, selected]
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    std = np.where(std > 0.0, std, 1.0)
    labels = train_set.labels
    label_mean = float(labels.mean())
    label_std = max(float(labels.std()), MIN_LABEL_STD)

    torch.manual_seed(seed)
    generator = torch.Generator().manual_seed(seed)
    inputs = torch.from_numpy((features - mean) / std)
    targets = torch.from_numpy((labels - label_mean) / label_std).unsqueeze(1)
    loader = torch.utils.data.DataLoader(torch.utils.data.TensorDataset(inputs, targets),
                                         batch_size=int(section["batch_size"]), shuffle=True, generator=generator)
    net = build_mlp(len(selected), section["hidden"], section["activation"])
    optimizer = torch.optim.Adam(net.parameters(), lr=section["lr"])
    loss_function = torch.nn.MSELoss()

    epoch_loss = float("nan")
    for epoch in range(int(section["epochs"])):
        total = 0.0
        for batch, (x, y) in enumerate(loader):
            optimizer.zero_grad()
            loss = loss_function(net(x), y)
            if not torch.isfinite(loss):
                raise TrainingError("non-finite loss at epoch {}, batch {}".format(epoch, batch))
            loss.backward()
            optimizer.step()
            total += float(loss.item()) * len(x)
        epoch_loss = total / len(train_set)
        if epoch % 20 == 0:
            LOG.debug("epoch %d: loss %.6e", epoch, epoch_loss)

    layers = [(module.weight.detach().numpy().copy(), module.bias.detach().numpy().copy())
              for module in net if isinstance(module, torch.nn.Linear)]
    model = GaitNetModel(dataset.names, selected, mean, std, label_mean, label_std, layers,
                         activation=section["activation"], clip=clip, h_swing=params.h_swing, robot=robot)
    metrics = TrainingMetrics(_rmse(model, train_set), _rmse(model, val_set), len(train_set), len(val_set),
                              int(section["epochs"]), epoch_loss, _inference_time(model, train_set.features))
    model.metrics = metrics.as_dict()
    LOG.info("trained on %s: %r", model.selected, metrics)
    return model, metrics
