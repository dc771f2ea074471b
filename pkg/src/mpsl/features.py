"""Spectral summary statistics and feature-matrix assembly.

Each spectrum collapses to seven numbers, and one feature vector
concatenates them over Laplacian order h, embedding dimension d, and
neighborhood size k in a fixed layout:

    column((h, d, k, stat)) = ((h * |D| + i_d) * |K| + i_k) * 7 + i_stat

with d and k indexed by their positions in the ascending config lists.
An empty spectrum contributes all zeros.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .spectral import Spectrum

#: Statistic names in feature order.
STAT_NAMES = ("zero_count", "min_nonzero", "max", "sum", "mean", "median", "std")

STAT_COUNT = len(STAT_NAMES)


@dataclass
class SpectrumStats:
    """The seven summary statistics of one spectrum."""

    zero_count: float
    min_nonzero: float
    max: float
    sum: float
    mean: float
    median: float
    std: float

    def as_array(self) -> np.ndarray:
        return np.array([self.zero_count, self.min_nonzero, self.max,
                         self.sum, self.mean, self.median, self.std])


@dataclass
class FeatureMatrix:
    """Assembled features (m x 2*7*|D|*|K|) with labels and the grids used."""

    rows: np.ndarray
    labels: np.ndarray
    dims: tuple[int, ...]
    neighbor_counts: tuple[int, ...]
    orders: tuple[int, ...] = (0, 1)

    @property
    def m(self) -> int:
        return self.rows.shape[0]


def spectrum_stats(spectrum: Spectrum) -> SpectrumStats:
    """Summarize a spectrum; zeros are the exact zeros after thresholding.

    min_nonzero is 0 when no positive eigenvalue exists; the standard
    deviation is the population form (divide by the count).
    """
    vals = np.asarray(spectrum.eigenvalues)
    if vals.size == 0:
        return SpectrumStats(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    positive = vals[vals > 0]
    return SpectrumStats(
        zero_count=float(np.count_nonzero(vals == 0)),
        min_nonzero=float(positive.min()) if positive.size else 0.0,
        max=float(vals.max()),
        sum=float(vals.sum()),
        mean=float(vals.mean()),
        median=float(np.median(vals)),
        std=float(vals.std()),
    )


def feature_names(dims, neighbor_counts, orders=(0, 1)) -> list[str]:
    """Column names h{h}_d{d}_k{k}_{stat} in layout order."""
    return [
        "h%d_d%d_k%d_%s" % (h, d, k, stat)
        for h in orders
        for d in dims
        for k in neighbor_counts
        for stat in STAT_NAMES
    ]


def assemble_features(
    stats: dict[tuple[int, int, int, int], SpectrumStats],
    m: int,
    labels: np.ndarray,
    dims,
    neighbor_counts,
    orders=(0, 1),
) -> FeatureMatrix:
    """Lay out per-(image, order, dim, k) statistics into the feature matrix.

    stats maps (i, h, d, k) to a SpectrumStats, keyed by the actual d and
    k values. Every cell of the grid must be present; a missing one is
    reported by name.
    """
    dims = tuple(dims)
    neighbor_counts = tuple(neighbor_counts)
    orders = tuple(orders)
    width = len(orders) * len(dims) * len(neighbor_counts) * STAT_COUNT
    rows = np.zeros((m, width))
    col = 0
    for h in orders:
        for d in dims:
            for k in neighbor_counts:
                for i in range(m):
                    cell = stats.get((i, h, d, k))
                    if cell is None:
                        raise ValueError(
                            "missing statistics for image %d at h=%d, d=%d, k=%d"
                            % (i, h, d, k)
                        )
                    rows[i, col : col + STAT_COUNT] = cell.as_array()
                col += STAT_COUNT
    return FeatureMatrix(rows=rows, labels=np.asarray(labels), dims=dims,
                         neighbor_counts=neighbor_counts, orders=orders)


def select_dim(fm: FeatureMatrix, d: int) -> np.ndarray:
    """Columns of one embedding dimension (all orders and neighbor counts)."""
    if d not in fm.dims:
        raise ValueError("dimension %d not in feature grid %r" % (d, fm.dims))
    i_d = fm.dims.index(d)
    block = len(fm.neighbor_counts) * STAT_COUNT
    per_order = len(fm.dims) * block
    cols: list[np.ndarray] = []
    for hi in range(len(fm.orders)):
        start = hi * per_order + i_d * block
        cols.append(np.arange(start, start + block))
    return fm.rows[:, np.concatenate(cols)]


@dataclass
class Standardizer:
    """Per-column affine map fit on training rows: x -> (x - mean) / scale."""

    mean: np.ndarray
    scale: np.ndarray

    def transform(self, rows: np.ndarray) -> np.ndarray:
        return (rows - self.mean) / self.scale

    def inverse(self, rows: np.ndarray) -> np.ndarray:
        return rows * self.scale + self.mean


def fit_standardizer(fit_rows: np.ndarray, min_std: float = 1e-12) -> Standardizer:
    """Column z-score parameters; near-constant columns get scale 1.

    Columns whose population std falls below min_std are centered but not
    scaled, so constant features cannot blow up a fold.
    """
    rows = np.asarray(fit_rows, dtype=np.float64)
    mean = rows.mean(axis=0)
    std = rows.std(axis=0)
    scale = np.where(std < min_std, 1.0, std)
    return Standardizer(mean=mean, scale=scale)


def export_csv(fm: FeatureMatrix, path: str) -> None:
    """Write the feature matrix as CSV with named columns, label first."""
    names = feature_names(fm.dims, fm.neighbor_counts, fm.orders)
    if len(names) != fm.rows.shape[1]:
        raise ValueError("feature grid names %d columns but matrix has %d"
                         % (len(names), fm.rows.shape[1]))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label"] + names)
        for label, row in zip(fm.labels, fm.rows):
            writer.writerow([int(label)] + [repr(float(v)) for v in row])
