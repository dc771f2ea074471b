import json
import subprocess
import sys

import numpy as np
import pytest

from mpsl.cli import main
from mpsl.ingest import load_matrix, write_pgm


def _make_image_tree(root, per_class=10, side=8, seed=60):
    rng = np.random.default_rng(seed)
    row = np.linspace(0, 255, side)
    patterns = {
        "grad_x": np.tile(row, (side, 1)),
        "grad_y": np.tile(row[:, None], (1, side)),
        "checker": 255.0 * ((np.indices((side, side)).sum(axis=0)) % 2),
    }
    for name, base in patterns.items():
        class_dir = root / name
        class_dir.mkdir(parents=True)
        for i in range(per_class):
            noisy = base + rng.normal(scale=12.0, size=base.shape)
            pixels = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
            write_pgm(class_dir / ("img%02d.pgm" % i), pixels)


@pytest.fixture()
def tree(tmp_path):
    root = tmp_path / "images"
    _make_image_tree(root)
    return root


def _small_flags(data, out):
    return ["--data", str(data), "--out", str(out), "--dims", "2,3",
            "--neighbors", "3,5", "--folds", "3", "--knn-k", "3",
            "--threads", "1"]


def test_ingest_then_pca(tree, tmp_path, capsys):
    matrix = tmp_path / "data.mpslmat"
    assert main(["ingest", "--root", str(tree), "--resolution", "8",
                 "--out", str(matrix)]) == 0
    assert "30 images" in capsys.readouterr().out
    ds = load_matrix(matrix)
    assert ds.m == 30 and ds.n == 64
    assert ds.class_names == {0: "checker", 1: "grad_x", 2: "grad_y"}

    emb_path = tmp_path / "emb.mpslmat"
    assert main(["pca", "--matrix", str(matrix), "--dmax", "4",
                 "--out", str(emb_path)]) == 0
    emb = load_matrix(emb_path)
    assert emb.data.shape == (30, 4)
    assert np.array_equal(emb.labels, ds.labels)


def test_features_then_classify(tree, tmp_path, capsys):
    matrix = tmp_path / "data.mpslmat"
    main(["ingest", "--root", str(tree), "--resolution", "8",
          "--out", str(matrix)])
    feats = tmp_path / "features.mpslmat"
    csv_path = tmp_path / "features.csv"
    code = main(["features", *_small_flags(matrix, tmp_path / "out"),
                 "--features-out", str(feats), "--csv", str(csv_path)])
    assert code == 0
    stored = load_matrix(feats)
    assert stored.data.shape == (30, 2 * 2 * 2 * 7)
    header = csv_path.read_text().splitlines()[0]
    assert header.startswith("label,h0_d2_k3_zero_count,")

    report_path = tmp_path / "report.json"
    code = main(["classify", "--features-in", str(feats), "--folds", "3",
                 "--knn-k", "3", "--report-out", str(report_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "accuracy" in out
    payload = json.loads(report_path.read_text())
    assert len(payload["folds"]) == 3
    assert len(payload["mean"]) == 3


def test_sweep_and_report(tree, tmp_path):
    matrix = tmp_path / "data.mpslmat"
    main(["ingest", "--root", str(tree), "--resolution", "8",
          "--out", str(matrix)])
    sweep_out = tmp_path / "sweep"
    assert main(["sweep", *_small_flags(matrix, sweep_out)]) == 0
    results = sweep_out / "results.csv"
    assert results.exists()
    assert (sweep_out / "acc.svg").exists()

    report_out = tmp_path / "rereport"
    assert main(["report", "--results", str(results),
                 "--out", str(report_out)]) == 0
    assert (report_out / "summary.md").exists()
    assert (report_out / "macro_f1.svg").exists()


def test_sweep_directly_from_image_tree(tree, tmp_path):
    sweep_out = tmp_path / "sweep"
    code = main(["sweep", "--data", str(tree), "--resolution", "8",
                 "--out", str(sweep_out), "--dims", "2,3",
                 "--neighbors", "3,5", "--folds", "3", "--knn-k", "3",
                 "--threads", "1"])
    assert code == 0
    assert (sweep_out / "results.csv").exists()
    assert list((sweep_out / "cache").glob("ingest_*.mpslmat"))


def test_config_file_with_flag_override(tree, tmp_path):
    matrix = tmp_path / "data.mpslmat"
    main(["ingest", "--root", str(tree), "--resolution", "8",
          "--out", str(matrix)])
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "data = %s\n"
        "out = %s\n"
        "dims = 2,3\n"
        "neighbors = 3,5\n"
        "folds = 3\n"
        "knn_k = 3\n"
        "threads = 1\n"
        "seed = 1\n" % (matrix, tmp_path / "sweep")
    )
    assert main(["sweep", "--config", str(cfg), "--seed", "7"]) == 0
    summary = json.loads((tmp_path / "sweep" / "summary.json").read_text())
    assert summary["config"]["seed"] == 7
    assert summary["config"]["dims"] == [2, 3]


def test_usage_errors_exit_one(tmp_path, capsys):
    assert main([]) == 1
    assert main(["sweep", "--data", "x", "--bogus-flag"]) == 1
    assert main(["ingest", "--out", str(tmp_path / "o.mpslmat")]) == 1
    # descending dims are a config-level usage error
    assert main(["sweep", "--data", "x", "--out", str(tmp_path),
                 "--dims", "3,2", "--neighbors", "3"]) == 1
    capsys.readouterr()


def test_pca_dmax_bounds_exit_one(tree, tmp_path, capsys):
    matrix = tmp_path / "data.mpslmat"
    main(["ingest", "--root", str(tree), "--resolution", "8",
          "--out", str(matrix)])
    assert main(["pca", "--matrix", str(matrix), "--dmax", "0",
                 "--out", str(tmp_path / "e.mpslmat")]) == 1
    capsys.readouterr()


def test_data_errors_exit_two(tmp_path, capsys):
    missing = tmp_path / "missing"
    assert main(["ingest", "--root", str(missing),
                 "--out", str(tmp_path / "o.mpslmat")]) == 2
    assert main(["pca", "--matrix", str(tmp_path / "nope.mpslmat"),
                 "--dmax", "2", "--out", str(tmp_path / "e.mpslmat")]) == 2
    corrupt = tmp_path / "corrupt.mpslmat"
    corrupt.write_bytes(b"NOTMAGIC" + b"\x00" * 64)
    assert main(["classify", "--features-in", str(corrupt)]) == 2
    assert main(["report", "--results", str(tmp_path / "absent.csv"),
                 "--out", str(tmp_path / "r")]) == 2
    capsys.readouterr()


def test_module_entry_point_help():
    proc = subprocess.run(
        [sys.executable, "-m", "mpsl.cli", "--help"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    for name in ("ingest", "pca", "features", "classify", "sweep", "report"):
        assert name in proc.stdout
