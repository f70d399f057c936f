"""Reference projection methods for the comparison harness: PCA and locality
preserving projections (LPP).

Both return TrainedModel objects with the same projection contract as
nearest-line training, so the evaluation harness treats all methods alike.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from nearline.data import Dataset, center
from nearline.linalg import orient_columns
from nearline.nlp import TrainedModel, k_nearest_neighbors

log = logging.getLogger(__name__)

LPP_REG_RTOL = 1e-8


@dataclass(frozen=True)
class BaselineConfig:
    """Configuration of one baseline method.

    ``K`` and ``heat_sigma`` only matter for LPP: the neighbor count of the
    affinity graph and the heat-kernel width ("auto" uses the median nonzero
    neighbor distance).
    """

    method: str
    d_prime: int
    K: int = 5
    heat_sigma: float | str = "auto"

    def __post_init__(self):
        if self.method not in ("pca", "lpp"):
            raise ValueError(f"method must be 'pca' or 'lpp', got {self.method!r}")
        if self.d_prime < 1:
            raise ValueError(f"d_prime must be >= 1, got {self.d_prime}")
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.heat_sigma != "auto" and not (
            isinstance(self.heat_sigma, (int, float)) and self.heat_sigma > 0
        ):
            raise ValueError(f"heat_sigma must be positive or 'auto', got {self.heat_sigma!r}")


def _centered(dataset: Dataset) -> Dataset:
    return dataset if dataset.centered else center(dataset)


def _mean_of(ds: Dataset) -> np.ndarray:
    return ds.mean_vector if ds.mean_vector is not None else np.zeros(ds.d)


def train_pca(dataset: Dataset, d_prime: int) -> TrainedModel:
    """Top principal directions of the centered data, deterministic signs."""
    ds = _centered(dataset)
    n, d = ds.n, ds.d
    if not 1 <= d_prime <= min(n - 1, d):
        raise ValueError(f"d_prime must be in [1, {min(n - 1, d)}] for PCA, got {d_prime}")
    _, _, Vt = np.linalg.svd(ds.features, full_matrices=False)
    W = orient_columns(Vt[:d_prime].T)
    return TrainedModel(
        projection=W,
        mean_vector=_mean_of(ds),
        config=BaselineConfig(method="pca", d_prime=d_prime),
        objective_trace=[],
        iterations_run=0,
        converged=True,
    )


def _knn_affinity(X: np.ndarray, K: int, heat_sigma) -> np.ndarray:
    """Symmetric heat-kernel adjacency of the K-nearest-neighbor graph."""
    n = X.shape[0]
    neighbors = k_nearest_neighbors(X, K)
    d2 = np.zeros((n, K))
    for i in range(n):
        diffs = X[neighbors[i]] - X[i]
        d2[i] = np.einsum("ij,ij->i", diffs, diffs)
    if heat_sigma == "auto":
        dists = np.sqrt(d2[d2 > 0])
        sigma = float(np.median(dists)) if dists.size else 1.0
    else:
        sigma = float(heat_sigma)
    A = np.zeros((n, n))
    weights = np.exp(-d2 / (sigma * sigma))
    for i in range(n):
        for slot, j in enumerate(neighbors[i]):
            w = weights[i, slot]
            A[i, j] = max(A[i, j], w)
            A[j, i] = max(A[j, i], w)
    return A


def train_lpp(dataset: Dataset, config: BaselineConfig) -> TrainedModel:
    """Locality preserving projections.

    Builds the symmetric kNN heat-kernel graph, then solves the generalized
    eigenproblem  X^T L_graph X w = lambda X^T D X w  for the smallest
    eigenvalues (rows of X are samples, L_graph = D - A).  The right-hand
    matrix is regularized by a small multiple of its mean diagonal so
    rank-deficient data stays solvable.
    """
    if config.method != "lpp":
        raise ValueError(f"train_lpp called with method {config.method!r}")
    ds = _centered(dataset)
    n, d = ds.n, ds.d
    if config.K > n - 1:
        raise ValueError(f"K must be <= n - 1 = {n - 1}, got {config.K}")
    if config.d_prime > d:
        raise ValueError(f"d_prime must be <= d = {d}, got {config.d_prime}")
    X = ds.features

    A = _knn_affinity(X, config.K, config.heat_sigma)
    degrees = A.sum(axis=1)
    L_graph = np.diag(degrees) - A

    M_lap = X.T @ L_graph @ X
    M_deg = X.T @ (degrees[:, None] * X)
    M_lap = (M_lap + M_lap.T) / 2.0
    M_deg = (M_deg + M_deg.T) / 2.0
    reg = LPP_REG_RTOL * np.trace(M_deg) / d
    M_deg_reg = M_deg + reg * np.eye(d)

    try:
        vals, vecs = scipy.linalg.eigh(M_lap, M_deg_reg, subset_by_index=(0, config.d_prime - 1))
    except scipy.linalg.LinAlgError as exc:
        cond = np.linalg.cond(M_deg_reg)
        raise ValueError(
            f"LPP generalized eigenproblem failed despite regularization "
            f"(cond(X^T D X + reg I) = {cond:.3e}): {exc}"
        ) from exc
    W = orient_columns(vecs)
    log.debug("lpp selected eigenvalues: %s", vals)
    return TrainedModel(
        projection=W,
        mean_vector=_mean_of(ds),
        config=config,
        objective_trace=[],
        iterations_run=0,
        converged=True,
    )
