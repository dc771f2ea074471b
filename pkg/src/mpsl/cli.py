"""Command-line interface.

Subcommands cover the pipeline stages: ingest, pca, features, classify,
sweep, report. Exit codes: 0 on success, 1 for usage errors, 2 for data
or format errors. Any option can also come from a --config key=value
file; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import pipeline
from .embed import fit_pca, project
from .evaluation import cross_validate
from .features import export_csv
from .ingest import DatasetError, DatasetMatrix, MatrixFormatError, load_matrix, save_matrix
from .pipeline import RunConfig, config_from_mapping, parse_config_file
from .report import render_report

USAGE_ERROR = 1
DATA_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; route through UsageError so the CLI
    # can keep 2 for data problems.
    def error(self, message):
        raise UsageError(message)


_CONFIG_FLAGS: list[tuple[str, dict]] = [
    ("data", dict(help="image directory or matrix container")),
    ("out", dict(help="output directory")),
    ("resolution", dict(type=int, help="square resize resolution")),
    ("dims", dict(help="comma-separated embedding dimensions")),
    ("neighbors", dict(help="comma-separated neighborhood sizes")),
    ("orders", dict(help="comma-separated Laplacian orders (subset of 0,1)")),
    ("interval", dict(help="persistence interval: 'full' or two quantiles a,b")),
    ("zero-tol", dict(type=float, help="relative zero-eigenvalue cutoff")),
    ("edge-cap", dict(type=int, help="max edges per local complex")),
    ("folds", dict(type=int, help="cross-validation folds")),
    ("seed", dict(type=int, help="shuffle seed")),
    ("knn-k", dict(type=int, help="classifier neighbor count")),
    ("threads", dict(type=int, help="worker threads (0 = CPU count)")),
]

_FLAG_PAIRS = [("shuffle", "no-shuffle"), ("standardize", "no-standardize"),
               ("pca-per-fold", "no-pca-per-fold")]


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    for name, kwargs in _CONFIG_FLAGS:
        parser.add_argument("--" + name, **kwargs)
    for on, off in _FLAG_PAIRS:
        dest = on.replace("-", "_")
        group = parser.add_mutually_exclusive_group()
        group.add_argument("--" + on, dest=dest, action="store_true", default=None)
        group.add_argument("--" + off, dest=dest, action="store_false", default=None)


def _merged_config(args: argparse.Namespace, require_data: bool = True) -> RunConfig:
    mapping: dict[str, str] = {}
    if args.config:
        mapping.update(parse_config_file(args.config))
    for name, _ in _CONFIG_FLAGS:
        dest = name.replace("-", "_")
        value = getattr(args, dest, None)
        if value is not None:
            mapping[dest] = str(value)
    for on, _ in _FLAG_PAIRS:
        dest = on.replace("-", "_")
        value = getattr(args, dest, None)
        if value is not None:
            mapping[dest] = "true" if value else "false"
    if not require_data:
        mapping.setdefault("data", "")
    try:
        return config_from_mapping(mapping)
    except ValueError as exc:
        raise UsageError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mpsl",
                     description="Spectral features of image datasets via "
                                 "local sheaf Laplacians")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="image tree to matrix container")
    p.add_argument("--root", required=True, help="class-per-subdirectory image tree")
    p.add_argument("--resolution", type=int, default=128)
    p.add_argument("--out", required=True, help="container file to write")

    p = sub.add_parser("pca", help="fit PCA and save the embedding")
    p.add_argument("--matrix", required=True, help="ingested matrix container")
    p.add_argument("--dmax", type=int, required=True, help="components to keep")
    p.add_argument("--out", required=True, help="embedding container to write")

    p = sub.add_parser("features", help="compute the spectral feature matrix")
    _add_config_options(p)
    p.add_argument("--features-out", help="container path for the features")
    p.add_argument("--csv", help="also export features as CSV")

    p = sub.add_parser("classify", help="cross-validate a feature container")
    _add_config_options(p)
    p.add_argument("--features-in", required=True, help="feature container")
    p.add_argument("--report-out", help="JSON report path")

    p = sub.add_parser("sweep", help="full pipeline: baselines, features, report")
    _add_config_options(p)

    p = sub.add_parser("report", help="plots and summary from a results.csv")
    p.add_argument("--results", required=True)
    p.add_argument("--out", required=True, help="directory for SVG/markdown output")

    return parser


def _cmd_ingest(args) -> int:
    from .ingest import load_dataset
    ds = load_dataset(args.root, resolution=args.resolution)
    save_matrix(ds, args.out)
    print("wrote %s (%d images, %d pixels, %d classes)"
          % (args.out, ds.m, ds.n, len(ds.class_names)))
    return 0


def _cmd_pca(args) -> int:
    ds = load_matrix(args.matrix)
    if not 1 <= args.dmax <= min(ds.m, ds.n):
        raise UsageError("dmax must be in [1, %d]" % min(ds.m, ds.n))
    model = fit_pca(ds, args.dmax)
    emb = project(model, ds, args.dmax)
    save_matrix(DatasetMatrix(data=emb.coords, labels=np.asarray(ds.labels),
                              class_names=dict(ds.class_names)), args.out)
    explained = float(np.sum(model.singular_values ** 2))
    print("wrote %s (%d x %d embedding, energy %.6g)"
          % (args.out, emb.coords.shape[0], emb.coords.shape[1], explained))
    return 0


def _cmd_features(args) -> int:
    cfg = _merged_config(args)
    ds = pipeline.load_input(cfg)
    ds.validate()
    fm = pipeline.extract_features(ds, cfg)
    out = args.features_out or str(Path(cfg.out) / "features.mpslmat")
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    save_matrix(DatasetMatrix(data=fm.rows, labels=np.asarray(fm.labels),
                              class_names=dict(ds.class_names)), out)
    print("wrote %s (%d x %d features)" % (out, fm.rows.shape[0], fm.rows.shape[1]))
    if args.csv:
        export_csv(fm, args.csv)
        print("wrote %s" % args.csv)
    return 0


def _cmd_classify(args) -> int:
    cfg = _merged_config(args, require_data=False)
    stored = load_matrix(args.features_in)
    report = cross_validate(stored.data, stored.labels, cfg.cv(),
                            standardize=cfg.standardize)
    payload = report.to_dict()
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.report_out:
        Path(args.report_out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report_out).write_text(text + "\n")
        print("wrote %s" % args.report_out)
    mt = report.mean
    print("accuracy %.4f  macro-recall %.4f  macro-F1 %.4f"
          % (mt.accuracy, mt.macro_recall, mt.macro_f1))
    return 0


def _cmd_sweep(args) -> int:
    cfg = _merged_config(args)
    artifacts = pipeline.run_sweep(cfg)
    for name in sorted(artifacts):
        print("%s: %s" % (name, artifacts[name]))
    return 0


def _cmd_report(args) -> int:
    artifacts = render_report(args.results, args.out)
    for name in sorted(artifacts):
        print("%s: %s" % (name, artifacts[name]))
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "pca": _cmd_pca,
    "features": _cmd_features,
    "classify": _cmd_classify,
    "sweep": _cmd_sweep,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return USAGE_ERROR
    except (DatasetError, MatrixFormatError) as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return DATA_ERROR
    except (OSError, ValueError) as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
