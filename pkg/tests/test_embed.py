import numpy as np
import pytest

import oracles
from mpsl.embed import DistanceMatrix, Embedding, fit_pca, pairwise_distances, project
from mpsl.ingest import DatasetMatrix


def _ds(data, labels=None):
    data = np.asarray(data, dtype=np.float64)
    if labels is None:
        labels = np.zeros(data.shape[0], dtype=np.int64)
    names = {int(c): str(c) for c in np.unique(labels)}
    return DatasetMatrix(data=data, labels=np.asarray(labels), class_names=names)


def test_components_orthonormal():
    rng = np.random.default_rng(0)
    ds = _ds(rng.normal(size=(20, 8)))
    model = fit_pca(ds, 8)
    gram = model.components @ model.components.T
    assert np.max(np.abs(gram - np.eye(8))) < 1e-8


def test_singular_values_sorted_nonnegative():
    rng = np.random.default_rng(1)
    ds = _ds(rng.normal(size=(15, 6)))
    model = fit_pca(ds, 6)
    s = model.singular_values
    assert np.all(s >= 0)
    assert np.all(np.diff(s) <= 1e-12)


def test_full_rank_reconstruction():
    rng = np.random.default_rng(2)
    data = rng.normal(size=(10, 5))
    ds = _ds(data)
    model = fit_pca(ds, 5)
    emb = project(model, ds, 5)
    recon = emb.coords @ model.components + model.mean
    assert np.max(np.abs(recon - data)) < 1e-8


def test_gram_branch_matches_svd_branch():
    # m < n hits the Gram path; transposing the data exercises plain SVD.
    rng = np.random.default_rng(3)
    data = rng.normal(size=(6, 12))
    model = fit_pca(_ds(data), 5)
    gram = model.components @ model.components.T
    assert np.max(np.abs(gram - np.eye(5))) < 1e-8
    emb = project(model, _ds(data), 5)
    # energy at full rank-ish: projected variance matches singular values
    col_var = emb.coords.var(axis=0, ddof=1)
    expect = model.singular_values ** 2 / (data.shape[0] - 1)
    assert np.allclose(col_var, expect, rtol=1e-6, atol=1e-12)


def test_line_through_origin_gives_diagonal_component():
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    model = fit_pca(_ds(pts), 1)
    assert np.allclose(model.components[0], np.array([1.0, 1.0]) / np.sqrt(2),
                       atol=1e-12)
    emb = project(model, _ds(pts), 1)
    assert np.allclose(emb.coords[:, 0],
                       np.array([-np.sqrt(2), 0.0, np.sqrt(2)]), atol=1e-12)


def test_sign_convention_flips_negative_peak():
    # Data varying along -e0 would naturally give a component with a
    # negative dominant entry; the convention flips it.
    rng = np.random.default_rng(4)
    t = rng.normal(size=30)
    data = np.outer(t, np.array([-5.0, 1.0, 0.5]))
    model = fit_pca(_ds(data), 1)
    peak = np.argmax(np.abs(model.components[0]))
    assert model.components[0][peak] > 0


def test_variance_identity_with_ddof_1():
    rng = np.random.default_rng(5)
    ds = _ds(rng.normal(size=(25, 10)) * 3.0)
    model = fit_pca(ds, 10)
    emb = project(model, ds, 10)
    col_var = emb.coords.var(axis=0, ddof=1)
    expect = model.singular_values ** 2 / (ds.m - 1)
    assert np.allclose(col_var, expect, rtol=1e-6, atol=1e-12)


def test_rank_deficient_padding():
    # rank 1 data, d_max 3: two trailing components with singular value 0,
    # still an orthonormal triple.
    t = np.arange(5, dtype=np.float64)
    data = np.outer(t, np.array([1.0, 2.0, 2.0, 0.0]))
    model = fit_pca(_ds(data), 3)
    assert model.singular_values[0] > 0
    assert model.singular_values[1] == 0.0
    assert model.singular_values[2] == 0.0
    gram = model.components @ model.components.T
    assert np.max(np.abs(gram - np.eye(3))) < 1e-10


def test_truncation_is_column_slice():
    rng = np.random.default_rng(6)
    ds = _ds(rng.normal(size=(12, 7)))
    model = fit_pca(ds, 6)
    full = project(model, ds, 6).coords
    partial = project(model, ds, 2).coords
    assert np.allclose(partial, full[:, :2], atol=1e-12)


def test_duplicate_rows_identical_coords():
    rng = np.random.default_rng(7)
    row = rng.normal(size=6)
    data = np.vstack([row, rng.normal(size=(3, 6)), row])
    ds = _ds(data)
    model = fit_pca(ds, 4)
    emb = project(model, ds, 4)
    assert np.array_equal(emb.coords[0], emb.coords[-1])


def test_fit_errors():
    with pytest.raises(ValueError, match="at least 2"):
        fit_pca(_ds(np.zeros((1, 4))), 1)
    with pytest.raises(ValueError, match="d_max"):
        fit_pca(_ds(np.zeros((4, 3))), 4)
    with pytest.raises(ValueError, match="d_max"):
        fit_pca(_ds(np.zeros((4, 3))), 0)


def test_project_errors():
    ds = _ds(np.random.default_rng(8).normal(size=(6, 4)))
    model = fit_pca(ds, 3)
    with pytest.raises(ValueError):
        project(model, ds, 0)
    with pytest.raises(ValueError):
        project(model, ds, 4)


def test_pairwise_3_4_5():
    emb = Embedding(coords=np.array([[0.0, 0.0], [3.0, 0.0], [3.0, 4.0]]),
                    labels=np.zeros(3, dtype=int), d=2)
    dist = pairwise_distances(emb)
    assert dist.values[0, 1] == 3.0
    assert dist.values[1, 2] == 4.0
    assert dist.values[0, 2] == 5.0


def test_pairwise_matches_double_loop():
    rng = np.random.default_rng(9)
    coords = rng.normal(size=(10, 4))
    emb = Embedding(coords=coords, labels=np.zeros(10, dtype=int), d=4)
    dist = pairwise_distances(emb)
    assert np.allclose(dist.values, oracles.naive_pairwise(coords), atol=1e-12)


def test_pairwise_exact_symmetry_and_zero_diagonal():
    rng = np.random.default_rng(10)
    coords = rng.normal(size=(20, 3))
    emb = Embedding(coords=coords, labels=np.zeros(20, dtype=int), d=3)
    values = pairwise_distances(emb).values
    assert np.array_equal(values, values.T)
    assert np.all(np.diag(values) == 0.0)
    # duplicated points: exactly zero off-diagonal
    coords2 = np.vstack([coords[0], coords[0], coords[1]])
    emb2 = Embedding(coords=coords2, labels=np.zeros(3, dtype=int), d=3)
    assert pairwise_distances(emb2).values[0, 1] == 0.0


def test_pairwise_rejects_non_finite():
    emb = Embedding(coords=np.array([[0.0, np.nan]]), labels=np.zeros(1, dtype=int), d=2)
    with pytest.raises(ValueError, match="finite"):
        pairwise_distances(emb)
