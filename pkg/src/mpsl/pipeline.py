"""End-to-end batch pipeline: ingest, embed, featurize, classify, report.

A run is described by a RunConfig (parsable from a flat key=value file).
The sweep computes, for every configured embedding dimension, a PCA
baseline and the spectral feature classifier, plus one classifier over
the features of all dimensions together, and writes results.csv, per-fold
metrics, a JSON summary, and SVG plots into the output directory.

Intermediates (ingested matrix, embedding, feature matrix) are cached on
disk keyed by a hash of the config fields that produced them. Per-image
spectral tasks run on a thread pool; BLAS pools are pinned to one thread
inside that region so results are identical at any thread count.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .complexes import knn_graph, local_complex, neighbor_order
from .embed import Embedding, fit_pca, pairwise_distances, project
from .evaluation import (CVConfig, EvalReport, MetricSet, cross_validate,
                         kfold_indices, knn_predict, metrics)
from .features import (FeatureMatrix, assemble_features, fit_standardizer,
                       select_dim, spectrum_stats)
from .ingest import DatasetMatrix, load_dataset, load_matrix, save_matrix
from .report import render_report
from .sheaf import build_sheaf
from .spectral import eigenvalues, laplacian, persistent_laplacian

#: Embedding dimensions swept by default.
DEFAULT_DIMS = tuple(range(200, 1001, 100))

#: Neighborhood sizes swept by default.
DEFAULT_NEIGHBORS = (5, 7, 10, 12, 15, 17, 20, 25, 30, 35,
                     40, 45, 50, 55, 60, 70, 80, 90, 100, 110)

RESULTS_HEADER = "method,pca_dim,acc,mr,macro_f1"


@dataclass
class RunConfig:
    """Every knob of a pipeline run; all fields map to config keys and flags."""

    data: str
    out: str = "mpsl-out"
    resolution: int = 128
    dims: tuple[int, ...] = DEFAULT_DIMS
    neighbors: tuple[int, ...] = DEFAULT_NEIGHBORS
    orders: tuple[int, ...] = (0, 1)
    interval: tuple[float, float] | None = None
    zero_tol: float = 1e-8
    edge_cap: int = 8000
    folds: int = 5
    shuffle: bool = True
    seed: int = 42
    knn_k: int = 5
    standardize: bool = True
    pca_per_fold: bool = False
    threads: int = 0

    def cv(self) -> CVConfig:
        return CVConfig(folds=self.folds, shuffle=self.shuffle,
                        seed=self.seed, knn_k=self.knn_k)

    def validate(self) -> None:
        for name in ("dims", "neighbors"):
            values = getattr(self, name)
            if not values:
                raise ValueError("%s must not be empty" % name)
            if any(v < 1 for v in values):
                raise ValueError("%s must be positive" % name)
            if list(values) != sorted(set(values)):
                raise ValueError("%s must be strictly ascending" % name)
        if not set(self.orders) <= {0, 1} or not self.orders:
            raise ValueError("orders must be a non-empty subset of {0, 1}")
        if self.interval is not None:
            qa, qb = self.interval
            if not (0.0 <= qa <= qb <= 1.0):
                raise ValueError("interval quantiles must satisfy 0 <= a <= b <= 1")
        if self.resolution < 1:
            raise ValueError("resolution must be >= 1")
        if self.zero_tol <= 0:
            raise ValueError("zero_tol must be positive")
        if self.edge_cap < 1:
            raise ValueError("edge_cap must be >= 1")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.knn_k < 1:
            raise ValueError("knn_k must be >= 1")


# ---------------------------------------------------------------------------
# Config file handling

_LIST_KEYS = {"dims", "neighbors", "orders"}
_INT_KEYS = {"resolution", "edge_cap", "folds", "seed", "knn_k", "threads"}
_BOOL_KEYS = {"shuffle", "standardize", "pca_per_fold"}
_FLOAT_KEYS = {"zero_tol"}
_STR_KEYS = {"data", "out"}


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat key=value file; blank lines and # comments are skipped."""
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError("%s:%d: expected key=value, got %r" % (path, lineno, line))
        key, _, value = stripped.partition("=")
        mapping[key.strip()] = value.strip()
    return mapping


def config_from_mapping(mapping: dict[str, str]) -> RunConfig:
    """Coerce string key=value pairs into a validated RunConfig."""
    known = _LIST_KEYS | _INT_KEYS | _BOOL_KEYS | _FLOAT_KEYS | _STR_KEYS | {"interval"}
    unknown = set(mapping) - known
    if unknown:
        raise ValueError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    if "data" not in mapping:
        raise ValueError("config is missing required key 'data'")
    kwargs: dict = {}
    for key, value in mapping.items():
        if key in _LIST_KEYS:
            kwargs[key] = tuple(int(v) for v in value.split(",") if v.strip())
        elif key in _INT_KEYS:
            kwargs[key] = int(value)
        elif key in _FLOAT_KEYS:
            kwargs[key] = float(value)
        elif key in _BOOL_KEYS:
            lowered = value.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError("key %s wants a boolean, got %r" % (key, value))
            kwargs[key] = lowered in ("true", "1", "yes")
        elif key == "interval":
            if value.lower() in ("full", "none", ""):
                kwargs[key] = None
            else:
                parts = [float(v) for v in value.split(",")]
                if len(parts) != 2:
                    raise ValueError("interval wants 'full' or two quantiles a,b")
                kwargs[key] = (parts[0], parts[1])
        else:
            kwargs[key] = value
    cfg = RunConfig(**kwargs)
    cfg.validate()
    return cfg


def resolve_threads(configured: int) -> int:
    """Worker count: MPSL_THREADS env wins, then config, then CPU count."""
    env = os.environ.get("MPSL_THREADS", "").strip()
    if env:
        try:
            configured = int(env)
        except ValueError:
            raise ValueError("MPSL_THREADS must be an integer, got %r" % env)
    if configured < 1:
        configured = os.cpu_count() or 1
    return configured


# ---------------------------------------------------------------------------
# Cached intermediates

def _cache_key(*parts) -> str:
    blob = "|".join(str(p) for p in parts).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def _cache_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.out) / "cache"
    path.mkdir(parents=True, exist_ok=True)
    return path


def load_input(cfg: RunConfig) -> DatasetMatrix:
    """Dataset rows from an image directory (cached) or a saved container."""
    source = Path(cfg.data)
    if source.is_dir():
        key = _cache_key("ingest", source.resolve(), cfg.resolution)
        cached = _cache_dir(cfg) / ("ingest_%s.mpslmat" % key)
        if cached.exists():
            return load_matrix(cached)
        ds = load_dataset(source, resolution=cfg.resolution)
        save_matrix(ds, cached)
        return ds
    return load_matrix(source)


def _feature_cache_path(cfg: RunConfig) -> Path:
    key = _cache_key(
        "features", Path(cfg.data).resolve(), cfg.resolution, cfg.dims,
        cfg.neighbors, cfg.orders, cfg.interval, cfg.zero_tol, cfg.edge_cap,
    )
    return _cache_dir(cfg) / ("features_%s.mpslmat" % key)


def _embedding_cache_path(cfg: RunConfig, d_max: int) -> Path:
    key = _cache_key("embed", Path(cfg.data).resolve(), cfg.resolution, d_max)
    return _cache_dir(cfg) / ("embed_%s.mpslmat" % key)


# ---------------------------------------------------------------------------
# Feature extraction

def _center_stats(dist, graph, order, center, cfg: RunConfig):
    cx = local_complex(dist, graph, center, graph.k,
                       max_edges=cfg.edge_cap, order=order)
    if cfg.interval is None:
        sh = build_sheaf(cx)
        laps = [laplacian(sh, h) for h in cfg.orders]
    else:
        qa, qb = cfg.interval
        if cx.edge_values.size:
            a = float(np.quantile(cx.edge_values, qa))
            b = float(np.quantile(cx.edge_values, qb))
        else:
            a = b = np.inf
        laps = [persistent_laplacian(cx, a, b, h) for h in cfg.orders]
    return [spectrum_stats(eigenvalues(lap, zero_tol=cfg.zero_tol)) for lap in laps]


def compute_embedding(ds: DatasetMatrix, cfg: RunConfig) -> Embedding:
    """Fit PCA at max(dims) and project every row, with caching.

    Smaller dimensions are column slices of this one embedding, so every
    d shares a single fit.
    """
    d_max = max(cfg.dims)
    if d_max > min(ds.m, ds.n):
        raise ValueError(
            "largest dimension %d exceeds min(m, n) = %d"
            % (d_max, min(ds.m, ds.n))
        )
    cached = _embedding_cache_path(cfg, d_max)
    if cached.exists():
        stored = load_matrix(cached)
        return Embedding(coords=stored.data, labels=stored.labels, d=d_max)
    model = fit_pca(ds, d_max)
    emb = project(model, ds, d_max)
    save_matrix(DatasetMatrix(data=emb.coords, labels=np.asarray(ds.labels),
                              class_names=dict(ds.class_names)), cached)
    return emb


def extract_features(ds: DatasetMatrix, cfg: RunConfig,
                     threads: int | None = None) -> FeatureMatrix:
    """Spectral statistics for every (image, order, dimension, k), cached."""
    cfg.validate()
    if max(cfg.neighbors) >= ds.m:
        raise ValueError("largest neighbor count %d must be below m=%d"
                         % (max(cfg.neighbors), ds.m))
    cached = _feature_cache_path(cfg)
    if cached.exists():
        stored = load_matrix(cached)
        return FeatureMatrix(rows=stored.data, labels=stored.labels,
                             dims=cfg.dims, neighbor_counts=cfg.neighbors,
                             orders=cfg.orders)
    if threads is None:
        threads = resolve_threads(cfg.threads)
    emb = compute_embedding(ds, cfg)

    stats: dict = {}
    m = ds.m
    for d in cfg.dims:
        sliced = Embedding(coords=np.ascontiguousarray(emb.coords[:, :d]),
                           labels=emb.labels, d=d)
        dist = pairwise_distances(sliced)
        order = neighbor_order(dist)
        for k in cfg.neighbors:
            graph = knn_graph(dist, k, order=order)

            def work(center: int):
                return _center_stats(dist, graph, order, center, cfg)

            # One BLAS thread inside the task region: the pool supplies the
            # parallelism and per-task numerics stay identical at any
            # worker count.
            with threadpool_limits(limits=1):
                if threads > 1:
                    with ThreadPoolExecutor(max_workers=threads) as pool:
                        results = list(pool.map(work, range(m), chunksize=16))
                else:
                    results = [work(i) for i in range(m)]
            for i, per_order in enumerate(results):
                for hi, h in enumerate(cfg.orders):
                    stats[(i, h, d, k)] = per_order[hi]

    fm = assemble_features(stats, m, ds.labels, cfg.dims, cfg.neighbors, cfg.orders)
    save_matrix(DatasetMatrix(data=fm.rows, labels=np.asarray(ds.labels),
                              class_names=dict(ds.class_names)), cached)
    return fm


# ---------------------------------------------------------------------------
# Evaluation plumbing

def _pca_baseline_per_fold(ds: DatasetMatrix, d: int, cfg: RunConfig) -> EvalReport:
    # Sensitivity variant: refit PCA inside each training fold instead of
    # once on the full dataset.
    labels = np.asarray(ds.labels)
    class_count = int(labels.max()) + 1
    per_fold = []
    confusion = np.zeros((class_count, class_count), dtype=np.int64)
    for train_idx, test_idx in kfold_indices(ds.m, cfg.cv()):
        train = DatasetMatrix(data=ds.data[train_idx], labels=labels[train_idx],
                              class_names=dict(ds.class_names))
        model = fit_pca(train, d)
        train_x = project(model, train, d).coords
        test = DatasetMatrix(data=ds.data[test_idx], labels=labels[test_idx],
                             class_names=dict(ds.class_names))
        test_x = project(model, test, d).coords
        if cfg.standardize:
            scaler = fit_standardizer(train_x)
            train_x = scaler.transform(train_x)
            test_x = scaler.transform(test_x)
        pred = knn_predict(train_x, labels[train_idx], test_x, cfg.knn_k)
        truth = labels[test_idx]
        per_fold.append(metrics(truth, pred, class_count))
        np.add.at(confusion, (truth, pred), 1)
    stacked = np.array([mt.as_tuple() for mt in per_fold])
    return EvalReport(per_fold=per_fold,
                      mean=MetricSet(*stacked.mean(axis=0).tolist()),
                      std=MetricSet(*stacked.std(axis=0).tolist()),
                      confusion=confusion, config=cfg.cv(),
                      standardized=cfg.standardize)


def evaluate_methods(ds: DatasetMatrix, emb: Embedding, fm: FeatureMatrix,
                     cfg: RunConfig) -> dict[str, EvalReport]:
    """All method/dimension reports: PCA and spectral per d, plus aggregated."""
    labels = np.asarray(ds.labels)
    class_count = int(labels.max()) + 1
    reports: dict[str, EvalReport] = {}
    for d in cfg.dims:
        if cfg.pca_per_fold:
            reports["pca@%d" % d] = _pca_baseline_per_fold(ds, d, cfg)
        else:
            reports["pca@%d" % d] = cross_validate(
                emb.coords[:, :d], labels, cfg.cv(),
                standardize=cfg.standardize, class_count=class_count)
        reports["mpsl@%d" % d] = cross_validate(
            select_dim(fm, d), labels, cfg.cv(),
            standardize=cfg.standardize, class_count=class_count)
    reports["mpsl@aggregated"] = cross_validate(
        fm.rows, labels, cfg.cv(),
        standardize=cfg.standardize, class_count=class_count)
    return reports


# ---------------------------------------------------------------------------
# Artifact writing

def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_results_csv(path: Path, reports: dict[str, EvalReport],
                      dims) -> None:
    """The sweep summary table, one row per method/dimension plus sentinels.

    pca_dim carries the embedding dimension, or the sentinels AVERAGE
    (mean of the per-dimension rows) and AGGREGATED (single classifier
    over all dimensions' features).
    """
    lines = [RESULTS_HEADER]

    def fmt(method: str, dim, report: EvalReport) -> str:
        mt = report.mean
        return "%s,%s,%.6f,%.6f,%.6f" % (method, dim, mt.accuracy,
                                         mt.macro_recall, mt.macro_f1)

    for method in ("pca", "mpsl"):
        for d in dims:
            lines.append(fmt(method, d, reports["%s@%d" % (method, d)]))
    for method in ("pca", "mpsl"):
        stacked = np.array([reports["%s@%d" % (method, d)].mean.as_tuple()
                            for d in dims])
        avg = stacked.mean(axis=0)
        lines.append("%s,AVERAGE,%.6f,%.6f,%.6f" % (method, *avg))
    agg = reports["mpsl@aggregated"].mean
    lines.append("mpsl,AGGREGATED,%.6f,%.6f,%.6f"
                 % (agg.accuracy, agg.macro_recall, agg.macro_f1))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_fold_csv(path: Path, reports: dict[str, EvalReport]) -> None:
    """Per-fold metrics for every method/dimension row."""
    lines = ["method,dim,fold,acc,mr,macro_f1"]
    for name in reports:
        method, _, dim = name.partition("@")
        for fold, mt in enumerate(reports[name].per_fold):
            lines.append("%s,%s,%d,%.6f,%.6f,%.6f"
                         % (method, dim, fold, *mt.as_tuple()))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_summary_json(path: Path, cfg: RunConfig,
                       reports: dict[str, EvalReport]) -> None:
    payload = {
        "config": {
            "data": cfg.data,
            "resolution": cfg.resolution,
            "dims": list(cfg.dims),
            "neighbors": list(cfg.neighbors),
            "orders": list(cfg.orders),
            "interval": list(cfg.interval) if cfg.interval else None,
            "zero_tol": cfg.zero_tol,
            "edge_cap": cfg.edge_cap,
            "folds": cfg.folds,
            "shuffle": cfg.shuffle,
            "seed": cfg.seed,
            "knn_k": cfg.knn_k,
            "standardize": cfg.standardize,
            "pca_per_fold": cfg.pca_per_fold,
        },
        "reports": {name: report.to_dict() for name, report in reports.items()},
    }
    _atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def run_sweep(cfg: RunConfig) -> dict[str, Path]:
    """Full pipeline; returns the paths of the artifacts it wrote."""
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    threads = resolve_threads(cfg.threads)

    ds = load_input(cfg)
    ds.validate()
    fm = extract_features(ds, cfg, threads=threads)
    emb = compute_embedding(ds, cfg)
    reports = evaluate_methods(ds, emb, fm, cfg)

    results = out / "results.csv"
    write_results_csv(results, reports, cfg.dims)
    folds = out / "folds.csv"
    write_fold_csv(folds, reports)
    summary = out / "summary.json"
    write_summary_json(summary, cfg, reports)
    artifacts = {"results": results, "folds": folds, "summary": summary}
    artifacts.update(render_report(results, out))
    return artifacts
