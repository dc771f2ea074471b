"""k-NN classification under seeded k-fold cross-validation.

Fold assignment shuffles the row indices with the portable generator in
mpsl.rng and cuts the shuffled order into contiguous blocks, so splits
are identical on every platform for a given seed. The classifier is
brute-force Euclidean k-NN with fully specified tie handling, and the
reported metrics are accuracy, macro recall, and macro F1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .features import fit_standardizer
from .rng import Xoshiro256StarStar


@dataclass
class CVConfig:
    folds: int = 5
    shuffle: bool = True
    seed: int = 42
    knn_k: int = 5


@dataclass
class MetricSet:
    accuracy: float
    macro_recall: float
    macro_f1: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.accuracy, self.macro_recall, self.macro_f1)


@dataclass
class EvalReport:
    """Per-fold metrics, their mean/std, and the summed confusion matrix."""

    per_fold: list[MetricSet]
    mean: MetricSet
    std: MetricSet
    confusion: np.ndarray
    config: CVConfig
    standardized: bool = True

    def to_dict(self) -> dict:
        return {
            "folds": [m.as_tuple() for m in self.per_fold],
            "mean": self.mean.as_tuple(),
            "std": self.std.as_tuple(),
            "confusion": self.confusion.tolist(),
            "config": {
                "folds": self.config.folds,
                "shuffle": self.config.shuffle,
                "seed": self.config.seed,
                "knn_k": self.config.knn_k,
                "standardize": self.standardized,
            },
        }


def kfold_indices(m: int, cfg: CVConfig) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic (train, test) index pairs for each fold.

    The shuffled order is split into cfg.folds contiguous blocks; the
    first m mod folds blocks are one element longer. With shuffle off the
    blocks are consecutive ranges of the identity order.
    """
    if cfg.folds < 2:
        raise ValueError("need at least 2 folds, got %d" % cfg.folds)
    if m < cfg.folds:
        raise ValueError("cannot split %d rows into %d folds" % (m, cfg.folds))
    indices = list(range(m))
    if cfg.shuffle:
        Xoshiro256StarStar(cfg.seed).shuffle(indices)
    indices = np.array(indices, dtype=np.int64)

    base, extra = divmod(m, cfg.folds)
    splits: list[tuple[np.ndarray, np.ndarray]] = []
    start = 0
    for f in range(cfg.folds):
        size = base + (1 if f < extra else 0)
        test = indices[start : start + size]
        train = np.concatenate([indices[:start], indices[start + size :]])
        splits.append((train, test))
        start += size
    return splits


def knn_predict(train_x: np.ndarray, train_y: np.ndarray,
                test_x: np.ndarray, k: int) -> np.ndarray:
    """Majority-vote k-NN with deterministic ties.

    Neighbor ties (equal distance) go to the smaller training index. Vote
    ties go to the class with the smaller summed neighbor distance, then
    to the smaller class id.
    """
    train_x = np.asarray(train_x, dtype=np.float64)
    test_x = np.asarray(test_x, dtype=np.float64)
    train_y = np.asarray(train_y)
    if not 1 <= k <= len(train_y):
        raise ValueError("k must be in [1, %d], got %d" % (len(train_y), k))
    dists = cdist(test_x, train_x, metric="euclidean")
    nearest = np.argsort(dists, axis=1, kind="stable")[:, :k]

    out = np.empty(len(test_x), dtype=np.int64)
    for row in range(len(test_x)):
        nbr = nearest[row]
        nbr_y = train_y[nbr]
        nbr_d = dists[row, nbr]
        votes: dict[int, int] = {}
        sums: dict[int, float] = {}
        for cls, d in zip(nbr_y.tolist(), nbr_d.tolist()):
            votes[cls] = votes.get(cls, 0) + 1
            sums[cls] = sums.get(cls, 0.0) + d
        best = max(votes.values())
        tied = [cls for cls, v in votes.items() if v == best]
        tied.sort(key=lambda cls: (sums[cls], cls))
        out[row] = tied[0]
    return out


def metrics(y_true: np.ndarray, y_pred: np.ndarray, class_count: int) -> MetricSet:
    """Accuracy, macro recall, and macro F1 for integer labels.

    Macro recall averages over all class_count classes, counting a class
    absent from y_true as recall 0. Macro F1 averages per-class F1 over
    the classes that do appear in y_true; degenerate precision or recall
    (0/0) is taken as 0.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError("label vectors must have matching length")
    if len(y_true) == 0:
        raise ValueError("cannot score an empty label vector")
    if class_count < 1 or y_true.max() >= class_count or y_pred.max() >= class_count:
        raise ValueError("labels exceed class_count=%d" % class_count)

    accuracy = float(np.mean(y_true == y_pred))
    recalls = np.zeros(class_count)
    f1s: list[float] = []
    for cls in range(class_count):
        true_mask = y_true == cls
        pred_mask = y_pred == cls
        tp = float(np.count_nonzero(true_mask & pred_mask))
        support = float(np.count_nonzero(true_mask))
        predicted = float(np.count_nonzero(pred_mask))
        recall = tp / support if support else 0.0
        recalls[cls] = recall
        if support:
            precision = tp / predicted if predicted else 0.0
            denom = precision + recall
            f1s.append(2.0 * precision * recall / denom if denom else 0.0)
    return MetricSet(
        accuracy=accuracy,
        macro_recall=float(recalls.mean()),
        macro_f1=float(np.mean(f1s)),
    )


def cross_validate(rows: np.ndarray, labels: np.ndarray, cfg: CVConfig,
                   standardize: bool = True,
                   class_count: int | None = None) -> EvalReport:
    """Evaluate k-NN over seeded folds; optionally z-score per fold.

    Standardization parameters are fit on each fold's training rows only
    and applied to both sides, so no test information leaks into scaling.
    """
    rows = np.asarray(rows, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if class_count is None:
        class_count = int(labels.max()) + 1
    per_fold: list[MetricSet] = []
    confusion = np.zeros((class_count, class_count), dtype=np.int64)
    for train_idx, test_idx in kfold_indices(len(labels), cfg):
        train_x, test_x = rows[train_idx], rows[test_idx]
        if standardize:
            scaler = fit_standardizer(train_x)
            train_x = scaler.transform(train_x)
            test_x = scaler.transform(test_x)
        pred = knn_predict(train_x, labels[train_idx], test_x, cfg.knn_k)
        truth = labels[test_idx]
        per_fold.append(metrics(truth, pred, class_count))
        np.add.at(confusion, (truth, pred), 1)

    stacked = np.array([m.as_tuple() for m in per_fold])
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0)
    return EvalReport(
        per_fold=per_fold,
        mean=MetricSet(*mean.tolist()),
        std=MetricSet(*std.tolist()),
        confusion=confusion,
        config=cfg,
        standardized=standardize,
    )
