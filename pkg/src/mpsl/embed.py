"""PCA embedding and pairwise distance computation.

One PCA fit at the largest requested dimension serves every smaller
dimension by truncation, so a dimension sweep costs a single
decomposition. Component signs follow a fixed convention (largest-magnitude
entry positive, ties to the lowest index) to keep embeddings reproducible
across BLAS implementations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .ingest import DatasetMatrix


@dataclass
class PCAModel:
    """Centered PCA basis: mean (n,), components (d_max x n), singular values."""

    mean: np.ndarray
    components: np.ndarray
    singular_values: np.ndarray

    @property
    def d_max(self) -> int:
        return self.components.shape[0]


@dataclass
class Embedding:
    """Projected coordinates (m x d) with the labels they belong to."""

    coords: np.ndarray
    labels: np.ndarray
    d: int


@dataclass
class DistanceMatrix:
    """Dense symmetric Euclidean distances with an exactly zero diagonal."""

    values: np.ndarray

    @property
    def m(self) -> int:
        return self.values.shape[0]


def _orthonormal_completion(components: np.ndarray, count: int) -> np.ndarray:
    # Deterministic fill-in for rank-deficient data: orthogonalize standard
    # basis vectors against the accepted components (twice, for stability)
    # and keep the first `count` that survive.
    n = components.shape[1]
    basis = [components[i] for i in range(components.shape[0])]
    extra: list[np.ndarray] = []
    for i in range(n):
        if len(extra) == count:
            break
        v = np.zeros(n)
        v[i] = 1.0
        for _ in range(2):
            for b in basis:
                v = v - np.dot(b, v) * b
        norm = np.linalg.norm(v)
        if norm > 0.5:
            v = v / norm
            basis.append(v)
            extra.append(v)
    if len(extra) < count:
        raise ValueError("cannot complete orthonormal basis")
    return np.array(extra)


def fit_pca(ds: DatasetMatrix, d_max: int) -> PCAModel:
    """Fit centered PCA keeping d_max components.

    Uses SVD of the centered matrix, or the eigendecomposition of the
    m x m Gram matrix when m < n (cheaper for wide image matrices). When
    d_max exceeds the numerical rank, trailing components are completed
    to an orthonormal set and given singular value exactly 0.
    """
    data = np.asarray(ds.data, dtype=np.float64)
    m, n = data.shape
    if m < 2:
        raise ValueError("need at least 2 rows to fit PCA, got %d" % m)
    if not 1 <= d_max <= min(m, n):
        raise ValueError("d_max must be in [1, min(m, n)] = [1, %d], got %d"
                         % (min(m, n), d_max))
    mean = data.mean(axis=0)
    centered = data - mean

    if m < n:
        gram = centered @ centered.T
        w, u = np.linalg.eigh(gram)
        w = np.clip(w[::-1], 0.0, None)
        u = u[:, ::-1]
        svals = np.sqrt(w)
    else:
        u, svals, vt = np.linalg.svd(centered, full_matrices=False)

    rank_tol = max(m, n) * np.finfo(np.float64).eps * (svals[0] if svals.size else 0.0)
    components = np.zeros((d_max, n))
    out_svals = np.zeros(d_max)
    deficient: list[int] = []
    for j in range(d_max):
        if svals[j] > rank_tol:
            out_svals[j] = svals[j]
            if m < n:
                components[j] = (centered.T @ u[:, j]) / svals[j]
            else:
                components[j] = vt[j]
        else:
            deficient.append(j)
    if deficient:
        fill = _orthonormal_completion(np.delete(components, deficient, axis=0),
                                       len(deficient))
        for row, j in enumerate(deficient):
            components[j] = fill[row]

    # Sign convention: the entry of largest magnitude is positive; argmax
    # resolves magnitude ties to the lowest index.
    for j in range(d_max):
        peak = np.argmax(np.abs(components[j]))
        if components[j][peak] < 0:
            components[j] = -components[j]

    return PCAModel(mean=mean, components=components, singular_values=out_svals)


def project(model: PCAModel, ds: DatasetMatrix, d: int) -> Embedding:
    """Project rows onto the first d components of a fitted model."""
    if not 1 <= d <= model.d_max:
        raise ValueError("d must be in [1, %d], got %d" % (model.d_max, d))
    if ds.data.shape[1] != model.mean.shape[0]:
        raise ValueError("column count %d does not match fitted model (%d)"
                         % (ds.data.shape[1], model.mean.shape[0]))
    coords = (np.asarray(ds.data, dtype=np.float64) - model.mean) @ model.components[:d].T
    return Embedding(coords=coords, labels=np.asarray(ds.labels), d=d)


def pairwise_distances(emb: Embedding) -> DistanceMatrix:
    """Dense Euclidean distance matrix of an embedding.

    Built from the condensed upper triangle, so the result is exactly
    symmetric with an exactly zero diagonal.
    """
    coords = np.asarray(emb.coords, dtype=np.float64)
    if not np.all(np.isfinite(coords)):
        raise ValueError("embedding coordinates contain non-finite values")
    if coords.shape[0] == 1:
        return DistanceMatrix(values=np.zeros((1, 1)))
    return DistanceMatrix(values=squareform(pdist(coords, metric="euclidean")))
