"""Nearest-line projection training.

Learns a linear projection W whose columns are eigenvectors of a scatter
operator built from point-to-neighbor-line residuals.  Training alternates
two steps: assemble the scatter operator for the current W (the line
coefficients depend on the projected coordinates), then replace W by the
eigenvectors at the extreme end of the spectrum.  The neighbor/line index is
built once, from input-space distances, and never rebuilt.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from nearline.data import Dataset, center
from nearline.geometry import DEGENERACY_RTOL
from nearline.linalg import orient_columns, pca_basis, sym_eigh

log = logging.getLogger(__name__)

# Eigenvalues this small relative to the mean eigenvalue correspond to
# directions the residuals never span; they are ranked after all others so
# the projection does not collapse onto pure noise directions.
TRIVIAL_EIGENVALUE_RTOL = 1e-10


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of nearest-line projection training."""

    K: int
    d_prime: int
    max_iters: int = 50
    rel_tol: float = 1e-6
    eigen_order: str = "smallest"
    init: str = "pca"
    seed: int = 0
    center: bool = True

    def __post_init__(self):
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if self.d_prime < 1:
            raise ValueError(f"d_prime must be >= 1, got {self.d_prime}")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")
        if self.eigen_order not in ("smallest", "largest"):
            raise ValueError(f"eigen_order must be 'smallest' or 'largest', got {self.eigen_order!r}")
        if self.init not in ("pca", "identity"):
            raise ValueError(f"init must be 'pca' or 'identity', got {self.init!r}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class NeighborLineIndex:
    """Per-sample nearest neighbors and the lines they span.

    ``neighbors[i]`` holds the K nearest indices of sample i ordered by
    distance; ``lines[i]`` the K*(K-1)/2 unordered neighbor pairs (j, k) with
    j < k, in lexicographic order.
    """

    neighbors: np.ndarray  # (n, K) int
    lines: np.ndarray      # (n, K*(K-1)//2, 2) int

    def flat_triples(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(i, j, k) index arrays enumerating every (sample, line) pair."""
        n, pairs = self.lines.shape[0], self.lines.shape[1]
        i_idx = np.repeat(np.arange(n), pairs)
        j_idx = self.lines[:, :, 0].reshape(-1)
        k_idx = self.lines[:, :, 1].reshape(-1)
        return i_idx, j_idx, k_idx


@dataclass
class TrainedModel:
    """A learned projection plus the statistics needed to apply it.

    ``step_traces`` records, for each iteration, the trace objective of the
    previous and the updated W under that iteration's fixed scatter operator
    (the updated value can never exceed the previous one).  It is a training
    diagnostic and is not serialized.
    """

    projection: np.ndarray       # (d, d_prime)
    mean_vector: np.ndarray      # (d,)
    config: object               # TrainConfig or baselines.BaselineConfig
    objective_trace: list[float]
    iterations_run: int
    converged: bool
    step_traces: list[tuple[float, float]] = field(default_factory=list)

    @property
    def d(self) -> int:
        return self.projection.shape[0]

    @property
    def d_prime(self) -> int:
        return self.projection.shape[1]


def _features_of(data) -> np.ndarray:
    if isinstance(data, Dataset):
        return data.features
    return np.asarray(data, dtype=float)


def k_nearest_neighbors(features: np.ndarray, K: int) -> np.ndarray:
    """Indices of the K nearest rows to each row, by squared distance.

    Brute force over all pairs; ties broken by the smaller index (stable
    argsort over the distance vector).
    """
    X = np.asarray(features, dtype=float)
    n = X.shape[0]
    if not 1 <= K <= n - 1:
        raise ValueError(f"K must be in [1, {n - 1}], got {K}")
    neighbors = np.empty((n, K), dtype=int)
    for i in range(n):
        d2 = np.sum((X - X[i]) ** 2, axis=1)
        d2[i] = np.inf
        neighbors[i] = np.argsort(d2, kind="stable")[:K]
    return neighbors


def build_neighbor_lines(dataset, K: int) -> NeighborLineIndex:
    """Neighbor sets and all neighbor-pair lines for every sample."""
    X = _features_of(dataset)
    neighbors = k_nearest_neighbors(X, K)
    combos = np.array(list(itertools.combinations(range(K), 2)), dtype=int).reshape(-1, 2)
    nb_sorted = np.sort(neighbors, axis=1)
    lines = np.stack(
        [nb_sorted[:, combos[:, 0]], nb_sorted[:, combos[:, 1]]], axis=2
    ) if combos.size else np.empty((X.shape[0], 0, 2), dtype=int)
    return NeighborLineIndex(neighbors=neighbors, lines=lines)


def _line_terms(X: np.ndarray, W: np.ndarray, index: NeighborLineIndex):
    """Per-line coefficients and validity mask, computed in projected space.

    Returns (i, j, k, alpha, ok): the line coefficient minimizes the
    projected residual; lines whose projected endpoints (nearly) coincide are
    masked out for this W only.
    """
    Y = X @ W
    i_idx, j_idx, k_idx = index.flat_triples()
    Djk = Y[j_idx] - Y[k_idx]
    Dik = Y[i_idx] - Y[k_idx]
    gap = np.einsum("ij,ij->i", Djk, Djk)
    nj = np.einsum("ij,ij->i", Y[j_idx], Y[j_idx])
    nk = np.einsum("ij,ij->i", Y[k_idx], Y[k_idx])
    ok = gap >= DEGENERACY_RTOL * np.maximum(1.0, np.maximum(nj, nk))
    alpha = np.zeros_like(gap)
    np.divide(np.einsum("ij,ij->i", Dik, Djk), gap, out=alpha, where=ok)
    skipped = int((~ok).sum())
    if skipped:
        log.debug("skipped %d degenerate projected lines (of %d)", skipped, ok.size)
    return i_idx, j_idx, k_idx, alpha, ok


def assemble_scatter(dataset, index: NeighborLineIndex, W: np.ndarray) -> np.ndarray:
    """Scatter operator: the sum over samples and neighbor lines of the outer
    products of input-space residuals.

    Each residual is ``x_i - x_k - alpha * (x_j - x_k)`` with the coefficient
    computed from the projected points, so the operator depends on W.  The
    result is symmetrized to remove floating-point asymmetry.
    """
    X = _features_of(dataset)
    d = X.shape[1]
    if W.shape[0] != d:
        raise ValueError(f"projection has {W.shape[0]} rows, features have {d} columns")
    i_idx, j_idx, k_idx, alpha, ok = _line_terms(X, W, index)
    if not ok.any():
        return np.zeros((d, d))
    i_idx, j_idx, k_idx, alpha = i_idx[ok], j_idx[ok], k_idx[ok], alpha[ok]
    R = X[i_idx] - X[k_idx] - alpha[:, None] * (X[j_idx] - X[k_idx])
    L = R.T @ R
    return (L + L.T) / 2.0


def objective(dataset, index: NeighborLineIndex, W: np.ndarray) -> float:
    """Total squared point-to-line distance in the projected space.

    Sums, over every sample and every line through a pair of its neighbors,
    the squared distance of the projected sample to the projected line.
    Degenerate lines are skipped exactly as in assemble_scatter, so this
    equals the trace of W^T L W against the assembled scatter operator.
    """
    X = _features_of(dataset)
    Y = X @ W
    i_idx, j_idx, k_idx, alpha, ok = _line_terms(X, W, index)
    if not ok.any():
        return 0.0
    rho = (Y[i_idx] - Y[k_idx]) - alpha[:, None] * (Y[j_idx] - Y[k_idx])
    return float(np.einsum("ij,ij->", rho[ok], rho[ok]))


def eigen_step(L: np.ndarray, d_prime: int, order: str = "smallest") -> np.ndarray:
    """Projection update: eigenvectors of L at the chosen end of the spectrum.

    ``smallest`` (the default) minimizes the trace objective.  Near-null
    eigenvalues, smaller in magnitude than a 1e-10 fraction of the mean
    eigenvalue, are ranked after all others so the update prefers directions
    the residuals actually span.  ``largest`` ranks the spectrum in
    descending order instead, kept for ablation runs.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"scatter operator must be square, got shape {L.shape}")
    d = L.shape[0]
    if not 1 <= d_prime <= d:
        raise ValueError(f"d_prime must be in [1, {d}], got {d_prime}")
    if order not in ("smallest", "largest"):
        raise ValueError(f"order must be 'smallest' or 'largest', got {order!r}")
    vals, vecs = sym_eigh(L)
    if order == "largest":
        idx = np.arange(d)[::-1]
    else:
        threshold = TRIVIAL_EIGENVALUE_RTOL * np.trace(L) / d
        trivial = np.abs(vals) < threshold
        if trivial.any():
            log.debug("deprioritized %d near-null eigenvalues (|lambda| < %.3e)", int(trivial.sum()), threshold)
        idx = np.concatenate([np.flatnonzero(~trivial), np.flatnonzero(trivial)])
    W = vecs[:, idx[:d_prime]]
    return orient_columns(W)


def train(dataset: Dataset, config: TrainConfig) -> TrainedModel:
    """Fit the nearest-line projection.

    The data is mean-centered first (unless ``config.center`` is false or the
    dataset is centered already) and the neighbor/line index is built once
    from input-space distances.  Each iteration assembles the scatter
    operator under the current W, replaces W through the eigen step, and
    records the objective of the new W; training stops when the relative
    objective change drops below ``rel_tol`` or after ``max_iters``
    iterations.
    """
    n, d = dataset.n, dataset.d
    if config.K > n - 1:
        raise ValueError(f"K must be <= n - 1 = {n - 1}, got {config.K}")
    if config.d_prime > d:
        raise ValueError(f"d_prime must be <= d = {d}, got {config.d_prime}")

    if dataset.centered:
        ds = dataset
        mean_vector = dataset.mean_vector if dataset.mean_vector is not None else np.zeros(d)
    elif config.center:
        ds = center(dataset)
        mean_vector = ds.mean_vector
    else:
        ds = dataset
        mean_vector = np.zeros(d)
    X = ds.features

    if config.init == "pca":
        W = pca_basis(X, config.d_prime)
    else:
        W = np.eye(d)[:, : config.d_prime]

    index = build_neighbor_lines(ds, config.K)

    objective_prev = objective(ds, index, W)
    if not np.isfinite(objective_prev):
        raise ValueError(f"non-finite objective at initialization: {objective_prev}")
    if config.max_iters == 0:
        return TrainedModel(
            projection=W,
            mean_vector=np.array(mean_vector, dtype=float),
            config=config,
            objective_trace=[objective_prev],
            iterations_run=0,
            converged=False,
        )

    trace: list[float] = []
    step_traces: list[tuple[float, float]] = []
    converged = False
    iterations = 0
    for t in range(1, config.max_iters + 1):
        L = assemble_scatter(ds, index, W)
        trace_old = float(np.trace(W.T @ L @ W))
        W = eigen_step(L, config.d_prime, config.eigen_order)
        trace_new = float(np.trace(W.T @ L @ W))
        step_traces.append((trace_old, trace_new))

        value = objective(ds, index, W)
        if not np.isfinite(value):
            raise ValueError(f"non-finite objective at iteration {t}: {value}")
        trace.append(value)
        iterations = t
        rel_change = abs(value - objective_prev) / max(abs(objective_prev), 1e-30)
        objective_prev = value
        if rel_change < config.rel_tol:
            converged = True
            break
        log.debug("iteration %d: objective %.6e (rel change %.3e)", t, value, rel_change)

    return TrainedModel(
        projection=W,
        mean_vector=np.array(mean_vector, dtype=float),
        config=config,
        objective_trace=trace,
        iterations_run=iterations,
        converged=converged,
        step_traces=step_traces,
    )


def project(model: TrainedModel, x) -> np.ndarray:
    """Map a vector (or a matrix of row vectors) into the learned subspace:
    subtract the training mean and apply the projection."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.d:
        raise ValueError(f"input has dimension {x.shape[-1]}, model expects {model.d}")
    return (x - model.mean_vector) @ model.projection
