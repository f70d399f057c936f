"""Nearest-neighbor and nearest-line classification plus the repeated
random-split evaluation protocol.

Every repeat splits the data, fits the projection on the train split only
(centering statistics included), projects both splits, and classifies each
test sample; the report aggregates the per-repeat accuracies.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from nearline.baselines import BaselineConfig, train_lpp, train_pca
from nearline.data import Dataset, SplitSpec, split_indices
from nearline.geometry import DEGENERACY_RTOL
from nearline.nlp import TrainConfig, TrainedModel, project, train

log = logging.getLogger(__name__)

CLASSIFIERS = ("nn", "nearest_line")
PAIR_SCOPES = ("within_class", "all_pairs")


class ExperimentError(RuntimeError):
    """A repeat of the evaluation protocol failed; carries the repeat index."""


@dataclass
class EvalReport:
    """Split-averaged classification results of one method."""

    per_repeat_accuracy: list[float]
    mean_accuracy: float
    std_accuracy: float
    method: str
    config_snapshot: dict
    per_class_accuracy: dict[int, float] | None = None


def classify_1nn(train_projected: np.ndarray, train_labels: np.ndarray, query) -> int:
    """Label of the training point nearest to the query (squared distance,
    ties to the smaller training index)."""
    T = np.asarray(train_projected, dtype=float)
    if T.shape[0] == 0:
        raise ValueError("empty training set")
    q = np.asarray(query, dtype=float)
    if q.shape != (T.shape[1],):
        raise ValueError(f"query has shape {q.shape}, expected ({T.shape[1]},)")
    d2 = np.einsum("ij,ij->i", T - q, T - q)
    return int(np.asarray(train_labels)[int(np.argmin(d2))])


def _candidate_pairs(labels: np.ndarray, pair_scope: str) -> np.ndarray:
    """All candidate (j, k) training pairs, j < k, in lexicographic order."""
    n = labels.shape[0]
    if pair_scope == "all_pairs":
        pairs = list(itertools.combinations(range(n), 2))
    elif pair_scope == "within_class":
        pairs = []
        for c in np.unique(labels):
            members = np.flatnonzero(labels == c)
            pairs.extend(itertools.combinations(members.tolist(), 2))
        pairs.sort()
    else:
        raise ValueError(f"pair_scope must be one of {PAIR_SCOPES}, got {pair_scope!r}")
    return np.array(pairs, dtype=int).reshape(-1, 2)


def classify_nearest_line(
    train_projected: np.ndarray,
    train_labels: np.ndarray,
    query,
    pair_scope: str = "within_class",
) -> int:
    """Label of the training-pair line nearest to the query.

    ``within_class`` restricts candidate lines to pairs sharing a class and
    returns that class; ``all_pairs`` searches every pair and returns the
    label of the pair endpoint nearer to the query.  Degenerate pairs are
    skipped; ties go to the lexicographically smaller pair.
    """
    T = np.asarray(train_projected, dtype=float)
    labels = np.asarray(train_labels)
    q = np.asarray(query, dtype=float)
    if q.shape != (T.shape[1],):
        raise ValueError(f"query has shape {q.shape}, expected ({T.shape[1]},)")
    pairs = _candidate_pairs(labels, pair_scope)
    if pairs.shape[0] == 0:
        raise ValueError(f"no candidate pairs for scope {pair_scope!r}")
    Pj, Pk = T[pairs[:, 0]], T[pairs[:, 1]]
    Djk = Pj - Pk
    gap = np.einsum("ij,ij->i", Djk, Djk)
    nj = np.einsum("ij,ij->i", Pj, Pj)
    nk = np.einsum("ij,ij->i", Pk, Pk)
    ok = gap >= DEGENERACY_RTOL * np.maximum(1.0, np.maximum(nj, nk))
    if not ok.any():
        raise ValueError("all candidate pairs are degenerate")
    Dqk = q - Pk[ok]
    alpha = np.einsum("ij,ij->i", Dqk, Djk[ok]) / gap[ok]
    rho = Dqk - alpha[:, None] * Djk[ok]
    d2 = np.einsum("ij,ij->i", rho, rho)
    best = pairs[ok][int(np.argmin(d2))]
    if pair_scope == "within_class":
        return int(labels[best[0]])
    dj = float(np.sum((q - T[best[0]]) ** 2))
    dk = float(np.sum((q - T[best[1]]) ** 2))
    return int(labels[best[0]] if dj <= dk else labels[best[1]])


def fit_method(dataset: Dataset, method_config) -> TrainedModel:
    """Dispatch a training config to its method."""
    if isinstance(method_config, TrainConfig):
        return train(dataset, method_config)
    if isinstance(method_config, BaselineConfig):
        if method_config.method == "pca":
            return train_pca(dataset, method_config.d_prime)
        return train_lpp(dataset, method_config)
    raise ValueError(f"unsupported config type {type(method_config).__name__}")


def method_name(method_config) -> str:
    return "nlp" if isinstance(method_config, TrainConfig) else method_config.method


def _config_dict(config) -> dict:
    from nearline.model_io import config_to_dict  # local import, avoids a cycle

    return config_to_dict(config)


def _classify_all(model, train_ds: Dataset, test_ds: Dataset, classifier: str) -> np.ndarray:
    train_y = project(model, train_ds.features)
    test_y = project(model, test_ds.features)
    preds = np.empty(test_ds.n, dtype=int)
    for i in range(test_ds.n):
        if classifier == "nn":
            preds[i] = classify_1nn(train_y, train_ds.labels, test_y[i])
        else:
            preds[i] = classify_nearest_line(train_y, train_ds.labels, test_y[i])
    return preds


def run_experiment(
    dataset: Dataset,
    method_config,
    split: SplitSpec,
    classifier: str = "nn",
) -> EvalReport:
    """Repeated random-split evaluation of one method.

    For every repeat: split, fit the projection on the train split (the
    centering mean and the projection are functions of the train split
    only), project both splits, classify every test sample with the chosen
    classifier, and record the accuracy.  Reports the arithmetic mean and
    the population standard deviation over repeats, plus aggregate per-class
    accuracy pooled across all repeats.
    """
    if classifier not in CLASSIFIERS:
        raise ValueError(f"classifier must be one of {CLASSIFIERS}, got {classifier!r}")
    accuracies: list[float] = []
    class_correct: dict[int, int] = {}
    class_total: dict[int, int] = {}
    for r in range(split.repeats):
        try:
            train_idx, test_idx = split_indices(dataset.labels, split, r)
            train_ds = dataset.subset(train_idx)
            test_ds = dataset.subset(test_idx)
            model = fit_method(train_ds, method_config)
            preds = _classify_all(model, train_ds, test_ds, classifier)
        except Exception as exc:
            raise ExperimentError(f"repeat {r} failed: {exc}") from exc
        hits = preds == test_ds.labels
        accuracies.append(float(np.mean(hits)))
        for label, hit in zip(test_ds.labels, hits):
            label = int(label)
            class_total[label] = class_total.get(label, 0) + 1
            class_correct[label] = class_correct.get(label, 0) + int(hit)
        log.debug("repeat %d: accuracy %.4f", r, accuracies[-1])

    per_class = {c: class_correct[c] / class_total[c] for c in sorted(class_total)}
    return EvalReport(
        per_repeat_accuracy=accuracies,
        mean_accuracy=float(np.mean(accuracies)),
        std_accuracy=float(np.std(accuracies)),
        method=method_name(method_config),
        config_snapshot={
            "method_config": _config_dict(method_config),
            "split": {
                "train_fraction": split.train_fraction,
                "seed": split.seed,
                "repeats": split.repeats,
                "stratified": split.stratified,
            },
            "classifier": classifier,
        },
        per_class_accuracy=per_class,
    )
