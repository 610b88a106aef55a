# controllers/analysis.py
"""
Correlation reporting between metric scores and human / fidelity scores, the
least-squares fit lines drawn on those scatter plots, and the dispersion-index
crop selector used to choose comparison regions for the human study.
"""
from __future__ import annotations

import logging
import math
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from controllers.errors import DegenerateInputError, DimensionMismatchError, InvalidParameterError
from models.analysis_model import CorrelationReport, CorrelationResult, MethodScoreTable, ScatterPoint
from models.image_model import GrayImage

log = logging.getLogger(__name__)

DEFAULT_REGION = 400
# integral-image sums of equal windows can differ in the last bits
_TIE_RTOL = 1e-9


def _pair(xs: Sequence[float], ys: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64).ravel()
    y = np.asarray(ys, dtype=np.float64).ravel()
    if x.size != y.size:
        raise InvalidParameterError(f"length mismatch ({x.size} vs {y.size})")
    if x.size < 2:
        raise InvalidParameterError("at least 2 points are required")
    return x, y


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x, y = _pair(xs, ys)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("pearson correlation of a constant sequence")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def linfit(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """Ordinary least squares y = slope * x + intercept."""
    x, y = _pair(xs, ys)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateInputError("least squares with zero x-variance")
    slope = float(dx @ (y - y.mean())) / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    return slope, intercept


# ---------------- Crop selection ----------------

def dispersion_map(images: Sequence[GrayImage]) -> np.ndarray:
    """Per-pixel variance-to-mean ratio across methods (0 where the mean is 0)."""
    stack = np.stack([im.data.astype(np.float64) for im in images])
    mean = stack.mean(axis=0)
    var = stack.var(axis=0)
    out = np.zeros_like(mean)
    np.divide(var, mean, out=out, where=mean > 0)
    return out


def window_sums(values: np.ndarray, region: int) -> np.ndarray:
    """Sums of every region x region window via an integral image."""
    ii = np.zeros((values.shape[0] + 1, values.shape[1] + 1), dtype=np.float64)
    ii[1:, 1:] = values.cumsum(axis=0).cumsum(axis=1)
    return ii[region:, region:] - ii[:-region, region:] - ii[region:, :-region] + ii[:-region, :-region]


def select_comparison_region(images: Sequence[GrayImage], region: int = DEFAULT_REGION) -> Tuple[int, int]:
    """Top-left of the window with the highest mean dispersion; ties -> smallest row, then col."""
    if len(images) < 2:
        raise InvalidParameterError("need at least 2 method images")
    shape = images[0].shape
    if any(im.shape != shape for im in images):
        raise DimensionMismatchError("method images differ in size")
    if region < 1 or region > min(shape):
        raise InvalidParameterError(f"region {region} does not fit a {shape[1]}x{shape[0]} image")
    sums = window_sums(dispersion_map(images), region)
    best = float(sums.max())
    flat = int(np.flatnonzero(sums >= best - _TIE_RTOL * max(1.0, abs(best)))[0])
    row, col = divmod(flat, sums.shape[1])
    log.info("comparison region at (%d, %d), mean dispersion %.4g", row, col, sums[row, col] / region ** 2)
    return row, col


# ---------------- Reports ----------------

def correlate(x_name: str, y_name: str, ids: Sequence[str], xs: Sequence[float], ys: Sequence[float]) -> CorrelationResult:
    slope, intercept = linfit(xs, ys)
    n = len(ids)
    if n == 2:
        log.warning("%s vs %s: only 2 methods, correlation is degenerate", x_name, y_name)
    return CorrelationResult(
        x_name=x_name,
        y_name=y_name,
        pearson=pearson(xs, ys),
        slope=slope,
        intercept=intercept,
        n=n,
        degenerate=n == 2,
        points=[ScatterPoint(method_id=m, x=float(x), y=float(y)) for m, x, y in zip(ids, xs, ys)],
    )


def correlation_report(table: MethodScoreTable) -> CorrelationReport:
    ids = [r.method_id for r in table.rows]
    metric = [r.metric_score for r in table.rows]
    results = [correlate("metric", "glicko", ids, metric, [r.glicko for r in table.rows])]
    if table.has_backproj:
        results.append(correlate("metric", "backproj", ids, metric, [r.backproj for r in table.rows]))
    return CorrelationReport(results=results)


def render_svg(result: CorrelationResult, width: int = 480, height: int = 360, comment: str = "") -> str:
    """Scatter plot with the fitted line and two labelled axes."""
    pad = 48
    xs = [p.x for p in result.points]
    ys = [p.y for p in result.points]
    x0, x1 = min(xs), max(xs)
    y_line = [result.slope * x + result.intercept for x in (x0, x1)]
    y0, y1 = min(ys + y_line), max(ys + y_line)
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x: float) -> float:
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def py(y: float) -> float:
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    lines: List[str] = ['<?xml version="1.0" encoding="UTF-8"?>']
    if comment:
        lines.append(f"<!-- {comment.replace('--', '- -')} -->")
    lines.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
                 f'viewBox="0 0 {width} {height}">')
    lines.append(f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>')
    lines.append(f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>')
    lines.append(f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle">{escape(result.x_name)}</text>')
    lines.append(f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 14 {height / 2:.1f})">{escape(result.y_name)}</text>')
    lines.append(f'<line x1="{px(x0):.2f}" y1="{py(y_line[0]):.2f}" x2="{px(x1):.2f}" '
                 f'y2="{py(y_line[1]):.2f}" stroke="red"/>')
    for p in result.points:
        lines.append(f'<circle cx="{px(p.x):.2f}" cy="{py(p.y):.2f}" r="4" fill="steelblue">'
                     f'<title>{escape(p.method_id)}</title></circle>')
    lines.append(f'<text x="{width - pad}" y="{pad - 12}" text-anchor="end">r = {result.pearson:.4f}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
