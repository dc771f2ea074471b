"""Plots and a markdown digest from a sweep's results.csv.

SVG output is generated directly (no plotting library) so the bytes are a
pure function of the table contents: same results, same plots. Each
metric gets one chart with the per-dimension PCA and spectral-feature
series, a dashed rule at the spectral single-dimension average, and a
solid rule at the aggregated score.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

RESULTS_COLUMNS = ("method", "pca_dim", "acc", "mr", "macro_f1")

_METRICS = (("acc", "Accuracy"), ("mr", "Macro recall"), ("macro_f1", "Macro F1"))

_WIDTH, _HEIGHT = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 62, 22, 46, 52

_SERIES_STYLE = {
    "pca": ("#4878a8", "PCA baseline"),
    "mpsl": ("#d8643c", "sheaf spectra"),
}


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def read_results(path: str | Path) -> list[dict[str, str]]:
    """Parse results.csv, validating the column schema."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("%s: empty results file" % path)
        if tuple(header) != RESULTS_COLUMNS:
            raise ValueError("%s: expected columns %s, got %s"
                             % (path, ",".join(RESULTS_COLUMNS), ",".join(header)))
        rows = []
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(RESULTS_COLUMNS):
                raise ValueError("%s:%d: expected %d fields, got %d"
                                 % (path, lineno, len(RESULTS_COLUMNS), len(row)))
            entry = dict(zip(RESULTS_COLUMNS, row))
            if entry["method"] not in _SERIES_STYLE:
                raise ValueError("%s:%d: unknown method %r"
                                 % (path, lineno, entry["method"]))
            for col in ("acc", "mr", "macro_f1"):
                try:
                    float(entry[col])
                except ValueError:
                    raise ValueError("%s:%d: non-numeric %s value %r"
                                     % (path, lineno, col, entry[col]))
            rows.append(entry)
    if not any(r["pca_dim"].isdigit() for r in rows):
        raise ValueError("%s: no per-dimension rows" % path)
    return rows


def _svg_chart(title: str, dims: list[int],
               series: dict[str, list[float]],
               rules: list[tuple[float, str, bool]]) -> str:
    # rules: (value, label, dashed)
    values = [v for vs in series.values() for v in vs] + [r[0] for r in rules]
    lo = min(values)
    hi = max(values)
    pad = max((hi - lo) * 0.1, 0.02)
    lo = max(0.0, lo - pad)
    hi = min(1.0, hi + pad) if hi <= 1.0 else hi + pad
    if hi - lo < 1e-9:
        hi = lo + 1.0

    x0, x1 = _LEFT, _WIDTH - _RIGHT
    y0, y1 = _HEIGHT - _BOTTOM, _TOP
    dmin, dmax = min(dims), max(dims)
    dspan = (dmax - dmin) or 1

    def px(d: float) -> float:
        return x0 + (d - dmin) / dspan * (x1 - x0)

    def py(v: float) -> float:
        return y0 + (v - lo) / (hi - lo) * (y1 - y0)

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (_WIDTH, _HEIGHT, _WIDTH, _HEIGHT),
        '<rect width="%d" height="%d" fill="#ffffff"/>' % (_WIDTH, _HEIGHT),
        '<text x="%d" y="20" font-family="sans-serif" font-size="14" '
        'fill="#202020">%s</text>' % (_LEFT, title),
        '<line x1="%d" y1="%.1f" x2="%d" y2="%.1f" stroke="#404040"/>'
        % (x0, y0, x1, y0),
        '<line x1="%d" y1="%.1f" x2="%d" y2="%.1f" stroke="#404040"/>'
        % (x0, y0, x0, y1),
    ]

    for i in range(6):
        v = lo + (hi - lo) * i / 5
        y = py(v)
        parts.append('<line x1="%d" y1="%.1f" x2="%d" y2="%.1f" '
                     'stroke="#dddddd"/>' % (x0, y, x1, y))
        parts.append('<text x="%d" y="%.1f" font-family="sans-serif" '
                     'font-size="10" fill="#404040" text-anchor="end">%.2f</text>'
                     % (x0 - 6, y + 3, v))
    for d in dims:
        x = px(d)
        parts.append('<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" '
                     'stroke="#404040"/>' % (x, y0, x, y0 + 4))
        parts.append('<text x="%.1f" y="%.1f" font-family="sans-serif" '
                     'font-size="10" fill="#404040" text-anchor="middle">%d</text>'
                     % (x, y0 + 16, d))
    parts.append('<text x="%.1f" y="%d" font-family="sans-serif" font-size="11" '
                 'fill="#202020" text-anchor="middle">embedding dimension</text>'
                 % ((x0 + x1) / 2, _HEIGHT - 12))

    for value, label, dashed in rules:
        y = py(value)
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        color = "#888888" if dashed else "#303030"
        parts.append('<line x1="%d" y1="%.1f" x2="%d" y2="%.1f" stroke="%s" '
                     'stroke-width="1.5"%s/>' % (x0, y, x1, y, color, dash))
        parts.append('<text x="%d" y="%.1f" font-family="sans-serif" '
                     'font-size="10" fill="%s" text-anchor="end">%s %s</text>'
                     % (x1, y - 4, color, label, _fmt_val(value)))

    for method, points in series.items():
        color, _ = _SERIES_STYLE[method]
        coords = " ".join("%.1f,%.1f" % (px(d), py(v))
                          for d, v in zip(dims, points))
        parts.append('<polyline points="%s" fill="none" stroke="%s" '
                     'stroke-width="2"/>' % (coords, color))
        for d, v in zip(dims, points):
            parts.append('<circle cx="%.1f" cy="%.1f" r="3" fill="%s"/>'
                         % (px(d), py(v), color))

    legend_x = _LEFT
    for method in series:
        color, label = _SERIES_STYLE[method]
        parts.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" '
                     'stroke-width="2"/>' % (legend_x, 34, legend_x + 22, 34, color))
        parts.append('<text x="%d" y="38" font-family="sans-serif" '
                     'font-size="11" fill="#202020">%s</text>'
                     % (legend_x + 27, label))
        legend_x += 150

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _fmt_val(v: float) -> str:
    return "%.4f" % v


def render_report(results_path: str | Path, out_dir: str | Path) -> dict[str, Path]:
    """Write one SVG per metric plus summary.md next to the results table."""
    rows = read_results(results_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    dims = sorted({int(r["pca_dim"]) for r in rows if r["pca_dim"].isdigit()})
    by_key = {(r["method"], r["pca_dim"]): r for r in rows}

    artifacts: dict[str, Path] = {}
    for column, title in _METRICS:
        series: dict[str, list[float]] = {}
        for method in ("pca", "mpsl"):
            points = [by_key[(method, str(d))] for d in dims
                      if (method, str(d)) in by_key]
            if len(points) == len(dims):
                series[method] = [float(p[column]) for p in points]
        rules = []
        avg = by_key.get(("mpsl", "AVERAGE"))
        if avg is not None:
            rules.append((float(avg[column]), "average", True))
        agg = by_key.get(("mpsl", "AGGREGATED"))
        if agg is not None:
            rules.append((float(agg[column]), "aggregated", False))
        path = out / ("%s.svg" % column)
        _atomic_write_text(path, _svg_chart(title, dims, series, rules))
        artifacts["plot_%s" % column] = path

    md = ["# Sweep results", ""]
    md.append("| method | pca_dim | acc | mr | macro_f1 |")
    md.append("|---|---|---|---|---|")
    for r in rows:
        md.append("| %s | %s | %s | %s | %s |"
                  % (r["method"], r["pca_dim"], r["acc"], r["mr"], r["macro_f1"]))
    md.append("")
    for column, title in _METRICS:
        md.append("![%s](%s.svg)" % (title, column))
    md.append("")
    md_path = out / "summary.md"
    _atomic_write_text(md_path, "\n".join(md))
    artifacts["summary_md"] = md_path
    return artifacts
