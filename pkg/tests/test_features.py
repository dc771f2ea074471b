import csv
import math

import numpy as np
import pytest

from mpsl.features import (
    STAT_NAMES,
    SpectrumStats,
    Standardizer,
    assemble_features,
    export_csv,
    feature_names,
    fit_standardizer,
    select_dim,
    spectrum_stats,
)
from mpsl.spectral import Spectrum


def _spec(values):
    return Spectrum(eigenvalues=np.asarray(values, dtype=np.float64), order=0)


def test_stats_worked_example():
    s = spectrum_stats(_spec([0.0, 0.0, 2.0, 4.0]))
    assert s.zero_count == 2.0
    assert s.min_nonzero == 2.0
    assert s.max == 4.0
    assert s.sum == 6.0
    assert s.mean == 1.5
    assert s.median == 1.0
    assert s.std == pytest.approx(math.sqrt(2.75), rel=1e-15)


def test_stats_empty_spectrum_all_zero():
    s = spectrum_stats(_spec([]))
    assert s.as_array().tolist() == [0.0] * 7


def test_stats_all_zero_spectrum():
    s = spectrum_stats(_spec([0.0, 0.0, 0.0]))
    assert s.zero_count == 3.0
    assert s.min_nonzero == 0.0
    assert s.max == 0.0
    assert s.sum == 0.0
    assert s.std == 0.0


def test_stats_std_is_population_form():
    s = spectrum_stats(_spec([1.0, 3.0]))
    # population std of {1, 3} is 1; sample std would be sqrt(2)
    assert s.std == 1.0


def test_feature_names_default_grid_width():
    dims = tuple(range(200, 1001, 100))
    ks = (5, 7, 10, 12, 15, 17, 20, 25, 30, 35, 40, 45, 50, 55,
          60, 70, 80, 90, 100, 110)
    names = feature_names(dims, ks)
    assert len(names) == 2 * 7 * len(dims) * len(ks) == 2520
    assert len(set(names)) == 2520


def test_feature_names_order_single_cell():
    names = feature_names((3,), (2,))
    assert names == (
        ["h0_d3_k2_%s" % s for s in STAT_NAMES]
        + ["h1_d3_k2_%s" % s for s in STAT_NAMES]
    )


def test_assemble_layout_matches_formula():
    dims, ks, orders = (2, 4), (1, 3, 5), (0, 1)
    stats = {}
    m = 2
    for i in range(m):
        for h in orders:
            for d in dims:
                for k in ks:
                    base = float(1000 * i + 100 * h + 10 * d + k)
                    stats[(i, h, d, k)] = SpectrumStats(
                        base, base + 1, base + 2, base + 3,
                        base + 4, base + 5, base + 6)
    fm = assemble_features(stats, m, np.array([0, 1]), dims, ks, orders)
    assert fm.rows.shape == (2, 2 * 2 * 3 * 7)
    for i in range(m):
        for hi, h in enumerate(orders):
            for di, d in enumerate(dims):
                for ki, k in enumerate(ks):
                    col = ((hi * len(dims) + di) * len(ks) + ki) * 7
                    base = float(1000 * i + 100 * h + 10 * d + k)
                    assert fm.rows[i, col] == base
                    assert fm.rows[i, col + 6] == base + 6


def test_assemble_reports_missing_cell():
    stats = {(0, 0, 2, 1): SpectrumStats(0, 0, 0, 0, 0, 0, 0)}
    with pytest.raises(ValueError, match="h=1, d=2, k=1"):
        assemble_features(stats, 1, np.array([0]), (2,), (1,), (0, 1))


def test_select_dim_extracts_both_order_blocks():
    dims, ks = (2, 4), (1, 3)
    stats = {}
    for h in (0, 1):
        for d in dims:
            for k in ks:
                fill = float(100 * h + 10 * d + k)
                stats[(0, h, d, k)] = SpectrumStats(*([fill] * 7))
    fm = assemble_features(stats, 1, np.array([0]), dims, ks)
    sub = select_dim(fm, 4)
    assert sub.shape == (1, 2 * 2 * 7)
    expect = ([41.0] * 7 + [43.0] * 7) + ([141.0] * 7 + [143.0] * 7)
    assert sub[0].tolist() == expect
    with pytest.raises(ValueError):
        select_dim(fm, 3)


def test_standardizer_round_trip():
    rng = np.random.default_rng(30)
    rows = rng.normal(loc=3.0, scale=2.5, size=(40, 6))
    st = fit_standardizer(rows)
    z = st.transform(rows)
    assert np.allclose(z.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(z.std(axis=0), 1.0, atol=1e-12)
    assert np.allclose(st.inverse(z), rows, atol=1e-12)


def test_standardizer_constant_column_scale_one():
    rows = np.column_stack([np.full(5, 7.0), np.arange(5, dtype=np.float64)])
    st = fit_standardizer(rows)
    assert st.scale[0] == 1.0
    z = st.transform(rows)
    assert np.all(z[:, 0] == 0.0)


def test_standardizer_applies_training_parameters_to_new_rows():
    train = np.array([[0.0], [2.0]])
    st = fit_standardizer(train)
    assert st.transform(np.array([[4.0]]))[0, 0] == 3.0


def test_export_csv_round_trip(tmp_path):
    dims, ks = (2,), (1,)
    stats = {
        (0, 0, 2, 1): SpectrumStats(1, 0.5, 2, 3.5, 1.75, 1.25, 0.75),
        (0, 1, 2, 1): SpectrumStats(0, 0.25, 1, 1.25, 0.625, 0.625, 0.375),
        (1, 0, 2, 1): SpectrumStats(2, 0, 0, 0, 0, 0, 0),
        (1, 1, 2, 1): SpectrumStats(0, 0, 0, 0, 0, 0, 0),
    }
    fm = assemble_features(stats, 2, np.array([3, 5]), dims, ks)
    path = tmp_path / "features.csv"
    export_csv(fm, str(path))
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["label"] + feature_names(dims, ks)
    assert rows[1][0] == "3" and rows[2][0] == "5"
    parsed = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
    assert np.array_equal(parsed, fm.rows)
