import numpy as np

from stride.gaitnet import FEATURE_NAMES, GaitDataset, GaitNetModel, GaitSample, NoiseProfile, evaluate_noise, \
    noise_sweep
from stride.utils import make_rng

import pytest


@pytest.fixture(scope="module")
def testset():
    rng = np.random.RandomState(0)
    samples = [GaitSample(row, 0.25 + 0.01 * row[4], stride=index)
               for index, row in enumerate(rng.normal(size=(50, len(FEATURE_NAMES))))]
    return GaitDataset(samples, FEATURE_NAMES)


@pytest.fixture(scope="module")
def model():
    # linear in pitch and v_c_x
    weight = np.array([[1.0, 0.5]])
    return GaitNetModel(FEATURE_NAMES, [4, 2], [0.0, 0.0], [1.0, 1.0], 0.25, 0.01, [(weight, [0.0])])


def test_zero_sigma_is_identity(testset):
    features = testset.features
    noisy = NoiseProfile("all", {}).apply(features, testset.names, make_rng(0, "noise"))
    assert np.array_equal(noisy, features)
    assert noisy is not features


@pytest.mark.parametrize("channel, columns", [
    ("angle", ["pitch"]),
    ("rate", ["pitch_rate"]),
    ("position", ["p_c_x", "p_c_z"]),
    ("velocity", ["v_c_x", "v_c_z"]),
])
def test_channel_columns(testset, channel, columns):
    features = testset.features
    noisy = NoiseProfile(channel, {channel: 0.1}).apply(features, testset.names, make_rng(0, "noise"))
    changed = [name for index, name in enumerate(FEATURE_NAMES) if not np.array_equal(noisy[:, index],
                                                                                       features[:, index])]
    assert changed == columns


@pytest.mark.parametrize("sigmas", [{"colour": 0.1}, {"angle": -0.1}])
def test_invalid_profile(sigmas):
    with pytest.raises(ValueError):
        NoiseProfile("bad", sigmas)


def test_profile_from_config():
    profile = NoiseProfile.from_config({})
    assert profile.sigmas == {"angle": 0.01, "rate": 0.05, "position": 0.005, "velocity": 0.02}
    assert profile.scaled(2.0).sigmas["rate"] == pytest.approx(0.1)
    assert profile.only("angle").sigmas == {"angle": 0.01, "rate": 0.0, "position": 0.0, "velocity": 0.0}


def test_evaluate_noise_rows(model, testset):
    rows = evaluate_noise(model, testset, seed=0, config={})
    assert [row["profile"] for row in rows] == ["clean", "angle", "rate", "position", "velocity", "all"]
    assert rows[0]["delta"] == 0.0
    # the rate and position channels do not reach the selected inputs
    assert rows[2]["rmse"] == rows[0]["rmse"]
    assert rows[3]["rmse"] == rows[0]["rmse"]
    assert rows[1]["rmse"] != rows[0]["rmse"]


def test_zero_scale_matches_clean(model, testset):
    rows = evaluate_noise(model, testset, seed=1, scale=0.0, config={})
    assert all(row["delta"] == 0.0 for row in rows)
    sweep = noise_sweep(model, testset, scales=(0.0, 1.0), seeds=(0, 1), config={})
    assert sweep[0]["rmse"] == rows[0]["rmse"]
    assert sweep[1]["rmse"] >= 0.0


def test_seeded_noise_is_reproducible(model, testset):
    a = evaluate_noise(model, testset, seed=3, scale=2.0, config={})
    b = evaluate_noise(model, testset, seed=3, scale=2.0, config={})
    assert a == b


@pytest.mark.parametrize("noise_config", [
    {"angle": 1.0},
    {"velocity": 1.0},
    {"angle": 1.0, "velocity": 1.0},
])
def test_rmse_non_decreasing_in_scale(model, testset, noise_config):
    sweep = noise_sweep(model, testset, scales=(0.0, 1.0, 2.0, 3.0), seeds=range(5), noise_config=noise_config)
    rmse = [row["rmse"] for row in sweep]
    assert all(b >= a for a, b in zip(rmse, rmse[1:]))
    assert rmse[-1] > rmse[0]
