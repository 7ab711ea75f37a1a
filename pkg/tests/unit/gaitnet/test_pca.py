import numpy as np
import scipy.linalg

from stride.errors import DatasetError
from stride.gaitnet import GaitDataset, GaitSample, jacobi_eigh, pca_select_features

import pytest


def _dataset(columns, names=None):
    features = np.column_stack(columns)
    if names is None:
        names = ["f{}".format(index) for index in range(features.shape[1])]
    samples = [GaitSample(row, 0.25, stride=index) for index, row in enumerate(features)]
    return GaitDataset(samples, names)


@pytest.mark.parametrize("n, seed", [(2, 0), (5, 1), (10, 2)])
def test_jacobi_matches_eigh(n, seed):
    rng = np.random.RandomState(seed)
    a = rng.normal(size=(n, n))
    matrix = a @ a.T
    values, vectors = jacobi_eigh(matrix)
    expected_values, expected_vectors = scipy.linalg.eigh(matrix)
    assert np.allclose(values, expected_values[::-1])
    assert np.allclose(vectors.T @ vectors, np.eye(n), atol=1e-10)
    assert np.allclose(matrix @ vectors, vectors * values, atol=1e-9)
    for column in range(n):
        assert abs(abs(vectors[:, column] @ expected_vectors[:, n - 1 - column]) - 1.0) < 1e-8
        assert vectors[np.argmax(np.abs(vectors[:, column])), column] > 0.0


def test_jacobi_diagonal():
    values, vectors = jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
    assert values.tolist() == [3.0, 2.0, 1.0]
    assert np.allclose(np.abs(vectors), [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@pytest.mark.parametrize("matrix", [
    np.zeros((2, 3)),
    np.array([[1.0, 2.0], [0.0, 1.0]]),
])
def test_jacobi_invalid(matrix):
    with pytest.raises(ValueError):
        jacobi_eigh(matrix)


def test_variance_ranking_raw_scales():
    rng = np.random.RandomState(0)
    n = 200
    dataset = _dataset([0.1 * rng.normal(size=n), 3.0 * rng.normal(size=n), 1.0 * rng.normal(size=n)])
    result = pca_select_features(dataset, n_axes=2, standardize=False)
    assert result.selected == [1, 2]
    assert result.selected_names == ["f1", "f2"]
    assert result.eigenvalues[0] > result.eigenvalues[1] > result.eigenvalues[2]
    assert 0.9 < result.explained_variance() <= 1.0


def test_duplicated_columns():
    rng = np.random.RandomState(1)
    n = 150
    base = rng.normal(size=n)
    dataset = _dataset([base, base.copy(), 0.5 * rng.normal(size=n)])
    result = pca_select_features(dataset, n_axes=3)
    assert len(result.selected) == 2
    assert len(set(result.selected)) == 2
    assert 2 in result.selected
    assert len({0, 1} & set(result.selected)) == 1


def test_unsuccessful_samples_ignored():
    rng = np.random.RandomState(2)
    features = rng.normal(size=(120, 3))
    samples = [GaitSample(row, 0.25, success=index < 100) for index, row in enumerate(features)]
    result = pca_select_features(GaitDataset(samples, ["a", "b", "c"]), n_axes=2)
    assert np.allclose(result.mean, features[:100].mean(axis=0))


def test_too_few_samples():
    dataset = _dataset([np.arange(10.0), np.arange(10.0) ** 2])
    with pytest.raises(DatasetError):
        pca_select_features(dataset)


def test_write_loadings(tmp_path):
    rng = np.random.RandomState(3)
    dataset = _dataset([rng.normal(size=120) for _ in range(4)])
    result = pca_select_features(dataset, n_axes=2)
    filename = tmp_path / "loadings.csv"
    result.write_loadings(str(filename))
    lines = filename.read_text().splitlines()
    assert lines[0] == "feature,axis_1,axis_2,selected"
    assert lines[1].startswith("eigenvalue,")
    assert len(lines) == 2 + 4
    flags = [int(line.rsplit(",", 1)[1]) for line in lines[2:]]
    assert sum(flags) == 2
    assert result.as_dict()["selected"] == result.selected


@pytest.mark.parametrize("standardize", [True, False])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_explained_variance_matches_eigensolver(standardize, seed):
    rng = np.random.RandomState(seed)
    mixing = rng.normal(size=(10, 10))
    features = rng.normal(size=(300, 10)) @ mixing * rng.uniform(0.5, 3.0, size=10)
    result = pca_select_features(_dataset(list(features.T)), n_axes=6, standardize=standardize)
    matrix = np.corrcoef(features, rowvar=False) if standardize else np.cov(features, rowvar=False)
    values = scipy.linalg.eigvalsh(matrix)[::-1]
    assert result.explained_variance(6) == pytest.approx(np.sum(values[:6]) / np.sum(values), abs=1e-8)
    assert np.allclose(result.eigenvalues / np.sum(result.eigenvalues), values / np.sum(values), atol=1e-8)
