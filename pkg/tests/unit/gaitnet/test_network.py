import json

import numpy as np
import torch

from stride.centroidal import standing_configuration
from stride.errors import DatasetError
from stride.gaitnet import (
    FEATURE_NAMES,
    GaitDataset,
    GaitNetModel,
    GaitSample,
    build_mlp,
    load_gaitnet,
    predict,
    train,
)
from stride.kinematics import load_model

import pytest


def _constant_model(bias, clip=(0.03, 0.06)):
    return GaitNetModel(FEATURE_NAMES, [0], [0.0], [1.0], 0.25, 0.05, [(np.zeros((1, 1)), [bias])], clip=clip)


def _synthetic(labels_of, n=200, seed=0):
    rng = np.random.RandomState(seed)
    features = rng.normal(size=(n, len(FEATURE_NAMES)))
    samples = [GaitSample(row, labels_of(row), stride=index) for index, row in enumerate(features)]
    return GaitDataset(samples, FEATURE_NAMES)


@pytest.fixture(scope="module")
def standing():
    model = load_model("biped2d")
    feet = np.array([[0.0, leg.r_c1[1], 0.0] for leg in model.legs])
    q = standing_configuration(model, np.array([0.0, 0.0, 0.38]), feet)
    return q, np.zeros(model.nq), np.array([[0.2, 0.0, 0.0], [0.0, 0.0, 0.0]])


@pytest.mark.parametrize("bias, dt", [
    (0.0, 0.05),
    (-1.0, 0.04),
    (10.0, 0.06),
    (-10.0, 0.03),
])
def test_predict_dt_clipped(standing, bias, dt):
    q, qd, targets = standing
    model = _constant_model(bias)
    assert model.predict_dt(q, qd, targets) == pytest.approx(dt)
    assert predict(model, q, qd, targets) == pytest.approx(dt)


def test_duration_to_dt():
    model = _constant_model(0.0, clip=(0.02, 0.08))
    assert model.duration_to_dt([0.05, 0.25, 1.0]).tolist() == pytest.approx([0.02, 0.05, 0.08])


def test_predict_label_shapes():
    model = _constant_model(1.0)
    assert model.predict_label(np.zeros(10)) == pytest.approx(0.3)
    assert model.predict_label(np.zeros((3, 10))).shape == (3,)
    with pytest.raises(DatasetError):
        model.predict_label(np.zeros(4))
    with pytest.raises(DatasetError):
        model.predict_label(np.full(10, np.nan))


@pytest.mark.parametrize("kwargs", [{"selected": [0, 0]}, {"activation": "swish"}])
def test_invalid_model(kwargs):
    data = dict(names=FEATURE_NAMES, selected=[0], mean=[0.0], std=[1.0], label_mean=0.25, label_std=0.05,
                layers=[(np.zeros((1, 1)), [0.0])])
    data.update(kwargs)
    with pytest.raises(ValueError):
        GaitNetModel(**data)


def test_save_load(tmp_path):
    model = _constant_model(0.5)
    filename = str(tmp_path / "gaitnet.json")
    model.save(filename)
    again = load_gaitnet(filename)
    assert again.selected == model.selected
    assert again.clip == model.clip
    assert again.predict_label(np.ones(10)) == model.predict_label(np.ones(10))


def test_load_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_gaitnet(str(tmp_path / "none.json"))


@pytest.mark.parametrize("content", ["{not json", json.dumps({"names": []})])
def test_load_invalid(tmp_path, content):
    filename = tmp_path / "bad.json"
    filename.write_text(content)
    with pytest.raises(DatasetError):
        load_gaitnet(str(filename))


def test_build_mlp():
    net = build_mlp(3, [8, 4], "relu")
    shapes = [tuple(module.weight.shape) for module in net if hasattr(module, "weight")]
    assert shapes == [(8, 3), (4, 8), (1, 4)]
    with pytest.raises(ValueError):
        build_mlp(3, [8], "swish")


@pytest.mark.parametrize("activation", ["tanh", "relu", "sigmoid"])
def test_numpy_forward_matches_torch(activation):
    torch.manual_seed(0)
    net = build_mlp(3, [5], activation)
    layers = [(module.weight.detach().numpy(), module.bias.detach().numpy())
              for module in net if isinstance(module, torch.nn.Linear)]
    model = GaitNetModel(FEATURE_NAMES, [0, 1, 2], np.zeros(3), np.ones(3), 0.0, 1.0, layers, activation=activation)
    inputs = np.random.RandomState(1).normal(size=(4, 3))
    expected = net(torch.from_numpy(inputs)).detach().numpy()[:, 0]
    assert np.allclose(model.forward(inputs), expected)


def test_train_constant_label():
    dataset = _synthetic(lambda row: 0.25)
    model, metrics = train(dataset, selected=[0, 1], hyper={"epochs": 5}, seed=0, config={}, robot="biped2d")
    assert model.selected == [0, 1]
    assert model.label_std == pytest.approx(1e-3)
    assert abs(model.predict_label(np.zeros(10)) - 0.25) < 0.01
    assert metrics.n_train + metrics.n_val == 200
    assert metrics.inference_time > 0.0


def test_train_linear_label():
    dataset = _synthetic(lambda row: 0.25 + 0.05 * row[2])
    model, metrics = train(dataset, selected=[2, 5], hyper={"epochs": 300, "lr": 1e-2, "hidden": [16]}, seed=1,
                           config={}, robot="biped2d")
    assert metrics.val_rmse < 0.02
    assert metrics.train_rmse < 0.02
    assert model.clip == (0.03, 0.06)
    assert model.h_swing == 5
    assert model.metrics["n_val"] == metrics.n_val


def test_train_empty_validation():
    dataset = _synthetic(lambda row: 0.25, n=3)
    with pytest.raises(DatasetError):
        train(dataset, selected=[0], hyper={"epochs": 1}, seed=0, config={}, robot="biped2d")
