"""
PCA feature selection.

Features are standardized, the covariance is eigendecomposed with cyclic
Jacobi rotations and one feature is picked per leading principal axis:
the one with the largest absolute loading not picked yet.
"""

import csv
import logging
import os

import numpy as np

from ..errors import DatasetError

__all__ = [
    "jacobi_eigh",
    "PcaResult",
    "pca_select_features",
]

LOG = logging.getLogger(__name__)

MIN_SAMPLES = 100
RANK_TOL = 1e-10


def _off_norm(a):
    return np.sqrt(max(0.0, np.sum(a * a) - np.sum(np.diag(a) ** 2)))


def jacobi_eigh(matrix, tol=1e-12, max_sweeps=100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

       Parameters
       ----------
       matrix: array
           symmetric (n, n)
       tol: float
           stop when the off-diagonal Frobenius norm is below ``tol``
           (relative to the matrix norm when that exceeds 1)
       max_sweeps: int

       Returns
       -------
       tuple
           eigenvalues in descending order and the matching orthonormal
           eigenvectors as columns; each vector's largest entry is positive
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix, got shape {!r}".format(a.shape))
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.max(np.abs(a)))):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * max(1.0, np.linalg.norm(a))
    for sweep in range(max_sweeps):
        off = _off_norm(a)
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0.0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
        LOG.debug("jacobi sweep %d: off-diagonal norm %.3e", sweep, off)
    else:
        LOG.warning("jacobi: no convergence after %d sweeps (off-diagonal norm %.3e)", max_sweeps, _off_norm(a))
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    v = v[:, order]
    for column in range(n):
        if v[np.argmax(np.abs(v[:, column])), column] < 0.0:
            v[:, column] = -v[:, column]
    return values, v


class PcaResult(object):
    """Principal axes of the feature covariance and the selected features"""

    def __init__(self, names, eigenvalues, eigenvectors, selected, mean, std):
        self.names = tuple(names)
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.eigenvectors = np.asarray(eigenvectors, dtype=float)
        self.selected = [int(index) for index in selected]
        self.mean = np.asarray(mean, dtype=float)
        self.std = np.asarray(std, dtype=float)

    @property
    def n_axes(self):
        return len(self.selected)

    @property
    def selected_names(self):
        return [self.names[index] for index in self.selected]

    def explained_variance(self, n_axes=None):
        """Fraction of the total variance carried by the leading ``n_axes`` axes"""
        if n_axes is None:
            n_axes = self.n_axes
        total = np.sum(self.eigenvalues)
        if total <= 0.0:
            return 0.0
        return float(np.sum(self.eigenvalues[:n_axes]) / total)

    def write_loadings(self, filename):
        """Feature-by-axis loadings table; the last column flags the selected features"""
        dirname = os.path.dirname(os.path.abspath(filename))
        os.makedirs(dirname, exist_ok=True)
        n_axes = max(self.n_axes, 1)
        with open(filename, "w", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["feature"] + ["axis_{}".format(axis + 1) for axis in range(n_axes)] + ["selected"])
            writer.writerow(["eigenvalue"] + [repr(float(value)) for value in self.eigenvalues[:n_axes]] + [""])
            for index, name in enumerate(self.names):
                loadings = [repr(float(value)) for value in self.eigenvectors[index, :n_axes]]
                writer.writerow([name] + loadings + [int(index in self.selected)])
        LOG.info("loadings written to %s", filename)

    def as_dict(self):
        return {
            "selected": self.selected,
            "selected_names": self.selected_names,
            "eigenvalues": self.eigenvalues.tolist(),
            "explained_variance": self.explained_variance(),
        }

    def __repr__(self):
        return "{}(selected={!r})".format(type(self).__name__, self.selected_names)


def pca_select_features(dataset, n_axes=6, standardize=True, min_samples=MIN_SAMPLES):
    """Selects one feature per leading principal axis.

       Parameters
       ----------
       dataset: GaitDataset
           only successful samples are used
       n_axes: int
       standardize: bool
           scale features to unit variance before the decomposition
       min_samples: int

       Returns
       -------
       PcaResult
    """
    dataset = dataset.successful()
    if len(dataset) < min_samples:
        raise DatasetError("PCA needs at least {} successful samples, got {}".format(min_samples, len(dataset)))
    features = dataset.features
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    centered = features - mean
    if standardize:
        scale = np.where(std > 0.0, std, 1.0)
        centered = centered / scale
    covariance = centered.T @ centered / (len(dataset) - 1)
    eigenvalues, eigenvectors = jacobi_eigh(covariance)
    eigenvalues = np.where(eigenvalues < 0.0, 0.0, eigenvalues)
    rank = int(np.sum(eigenvalues > RANK_TOL * max(eigenvalues[0], 1e-300)))
    n_selected = min(n_axes, rank)
    if n_selected < n_axes:
        LOG.warning("covariance has rank %d: selecting %d features instead of %d", rank, n_selected, n_axes)
    selected = []
    for axis in range(n_selected):
        for index in np.argsort(-np.abs(eigenvectors[:, axis]), kind="stable"):
            if int(index) not in selected:
                selected.append(int(index))
                break
    result = PcaResult(dataset.names, eigenvalues, eigenvectors, selected, mean, std)
    LOG.info("PCA selected %s (%.1f%% of the variance)", result.selected_names, 100.0 * result.explained_variance())
    return result
