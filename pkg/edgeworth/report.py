# edgeworth/report.py
"""CSV reports and the log-log convergence chart."""

import logging
import math
from typing import List, Sequence

import numpy as np
import pandas as pd

from edgeworth import config
from edgeworth.errors import ConfigError
from edgeworth.estimator import REPORT_COLUMNS, CltCheck, ExperimentReport

logger = logging.getLogger(__name__)

CLT_COLUMNS = ["n", "paths", "empirical_var", "empirical_stderr", "predicted", "ratio"]

# Chart geometry in SVG user units
WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 170, 30, 60
SERIES = (
    ("zeroth", "|mc - zeroth|", "#1f77b4"),
    ("expansion", "|mc - expansion|", "#d62728"),
)


def _write_frame(frame: pd.DataFrame, path: str):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# schema={config.SCHEMA_VERSION}\n")
        frame.to_csv(f, index=False, lineterminator="\n")


def write_report_csv(report: ExperimentReport, path: str) -> pd.DataFrame:
    """Write one row per n under the frozen header."""
    frame = report.to_frame()
    _write_frame(frame, path)
    if report.hypotheses_asserted_by_user:
        logger.warning(f"{path}: hypotheses asserted by user for model {report.model}")
    if report.diagnostic_only:
        logger.warning(f"{path}: {report.function} rows are moment diagnostics only")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return frame


def write_clt_csv(checks: Sequence[CltCheck], path: str) -> pd.DataFrame:
    frame = pd.DataFrame.from_records(
        [
            {
                "n": check.n,
                "paths": check.paths,
                "empirical_var": check.empirical_var.mean,
                "empirical_stderr": check.empirical_var.stderr,
                "predicted": check.predicted,
                "ratio": check.ratio,
            }
            for check in checks
        ],
        columns=CLT_COLUMNS,
    )
    _write_frame(frame, path)
    logger.info(f"Wrote {len(frame)} CLT rows to {path}")
    return frame


def read_report_csv(path: str) -> pd.DataFrame:
    """Load a report written by ``write_report_csv``; anything else is a ConfigError."""
    try:
        frame = pd.read_csv(path, comment="#")
    except FileNotFoundError as e:
        raise ConfigError(f"report not found: {path}") from e
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ConfigError(f"malformed report CSV {path}: {e}") from e

    if list(frame.columns) != REPORT_COLUMNS:
        missing = [c for c in REPORT_COLUMNS if c not in frame.columns]
        raise ConfigError(f"malformed report CSV {path}: header mismatch, missing {missing}")
    if frame.empty:
        raise ConfigError(f"malformed report CSV {path}: no rows")

    numeric = [c for c in REPORT_COLUMNS[REPORT_COLUMNS.index("T") :] if c != "mode"]
    try:
        frame[numeric] = frame[numeric].apply(pd.to_numeric, errors="raise")
    except (ValueError, TypeError) as e:
        raise ConfigError(f"malformed report CSV {path}: {e}") from e
    if not np.all(np.isfinite(frame[numeric].to_numpy(dtype=float))):
        raise ConfigError(f"malformed report CSV {path}: non-finite values")
    if (frame["n"] <= 0).any():
        raise ConfigError(f"malformed report CSV {path}: n must be positive")
    return frame


def _series(frame: pd.DataFrame) -> dict:
    """Absolute gaps and their 1.96-sigma half widths per series."""
    rate = frame["n"] / frame["T"]
    return {
        "zeroth": (
            (frame["mc_mean"] - frame["zeroth_mean"]).abs().to_numpy(),
            1.96 * np.hypot(frame["mc_stderr"], frame["zeroth_stderr"]).to_numpy(),
        ),
        "expansion": (
            (frame["mc_mean"] - frame["expansion_mean"]).abs().to_numpy(),
            1.96 * (frame["scaled_residual_stderr"] / np.sqrt(rate)).to_numpy(),
        ),
    }


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _decades(lo: float, hi: float) -> List[int]:
    return list(range(math.floor(lo), math.ceil(hi) + 1))


def render_svg(csv_path: str, svg_path: str) -> int:
    """Draw |mc - zeroth| and |mc - expansion| against n on log-log axes.

    Returns the number of plotted points.  Zero gaps and whisker ends below
    zero are drawn at a floor three decades under the smallest positive value.
    """
    frame = read_report_csv(csv_path).sort_values("n", kind="stable")
    series = _series(frame)
    n = frame["n"].to_numpy(dtype=float)

    positive = np.concatenate([v[v > 0] for v, _ in series.values()] + [(v + w)[v + w > 0] for v, w in series.values()])
    floor = positive.min() * 1e-3 if positive.size else 1e-12

    def log_y(y):
        return np.log10(np.maximum(y, floor))

    y_lo = min(log_y(v - w).min() for v, w in series.values())
    y_hi = max(log_y(v + w).max() for v, w in series.values())
    if y_hi - y_lo < 1e-9:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    x_lo, x_hi = math.log10(n.min()), math.log10(n.max())
    if x_hi - x_lo < 1e-9:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5

    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line class="axis" x1="{LEFT}" y1="{TOP + plot_h}" x2="{LEFT + plot_w}" y2="{TOP + plot_h}" stroke="black"/>',
        f'<line class="axis" x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + plot_h}" stroke="black"/>',
    ]

    for value in n:
        x = _fmt(sx(math.log10(value)))
        parts.append(f'<line class="tick" x1="{x}" y1="{TOP + plot_h}" x2="{x}" y2="{TOP + plot_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{x}" y="{TOP + plot_h + 18}" text-anchor="middle">{int(value)}</text>')
    for decade in _decades(y_lo, y_hi):
        if not y_lo <= decade <= y_hi:
            continue
        y = _fmt(sy(decade))
        parts.append(f'<line class="tick" x1="{LEFT - 5}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="black"/>')
        parts.append(f'<text x="{LEFT - 8}" y="{y}" text-anchor="end" dominant-baseline="middle">1e{decade}</text>')
    parts.append(
        f'<text x="{LEFT + plot_w / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">n (log scale)</text>'
    )
    parts.append(
        f'<text x="20" y="{TOP + plot_h / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {TOP + plot_h / 2:.2f})">absolute gap (log scale)</text>'
    )

    points = 0
    for index, (key, label, colour) in enumerate(SERIES):
        values, half = series[key]
        xs = [sx(math.log10(v)) for v in n]
        ys = log_y(values)
        coords = " ".join(f"{_fmt(x)},{_fmt(sy(y))}" for x, y in zip(xs, ys))
        parts.append(f'<g class="series" id="series-{key}">')
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
        for x, y, v, w in zip(xs, ys, values, half):
            top, bottom = _fmt(sy(log_y(v + w))), _fmt(sy(log_y(v - w)))
            parts.append(f'<line class="whisker" x1="{_fmt(x)}" y1="{bottom}" x2="{_fmt(x)}" y2="{top}" stroke="{colour}"/>')
            parts.append(f'<circle class="point" cx="{_fmt(x)}" cy="{_fmt(sy(y))}" r="3" fill="{colour}"/>')
            points += 1
        parts.append("</g>")

        legend_y = TOP + 10 + 18 * index
        legend_x = LEFT + plot_w + 15
        parts.append(
            f'<line x1="{legend_x}" y1="{legend_y}" x2="{legend_x + 20}" y2="{legend_y}" stroke="{colour}" stroke-width="1.5"/>'
        )
        parts.append(f'<text x="{legend_x + 26}" y="{legend_y}" dominant-baseline="middle">{label}</text>')
    parts.append("</svg>")

    with open(svg_path, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(parts) + "\n")
    logger.info(f"Wrote {points} points to {svg_path}")
    return points
