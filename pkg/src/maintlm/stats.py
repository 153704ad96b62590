"""Pearson correlation, simple OLS with SPSS-style summary, MSE and error histograms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConstantPredictorError,
    InsufficientDataError,
    LengthMismatchError,
    StatsError,
    ZeroVarianceError,
)


@dataclass(frozen=True)
class RegressionSummary:
    slope: float
    intercept: float
    r: float
    r2: float
    adj_r2: float
    se_estimate: float
    n: int


@dataclass(frozen=True)
class ErrorHistogram:
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    zero_mark: float = 0.0


def _pair(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatchError(f"series lengths differ: {x.size} vs {y.size}")
    return x, y


def _moments(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    dx = x - x.mean()
    dy = y - y.mean()
    return float(dx @ dy), float(dx @ dx), float(dy @ dy)


def pearson_r(xs: Sequence[float], ys: Sequence[float]) -> float:
    x, y = _pair(xs, ys)
    if x.size < 2:
        raise InsufficientDataError(f"pearson_r needs n >= 2, got {x.size}")
    sxy, sxx, syy = _moments(x, y)
    if sxx == 0 or syy == 0:
        raise ZeroVarianceError("pearson_r undefined for a constant series")
    r = sxy / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def adjusted_r2(r2: float, n: int, predictors: int = 1) -> float:
    if n - predictors - 1 <= 0:
        raise InsufficientDataError(f"adjusted R^2 needs n > predictors + 1, got n={n}")
    return 1.0 - (1.0 - r2) * (n - 1) / (n - predictors - 1)


def ols_fit(xs: Sequence[float], ys: Sequence[float]) -> RegressionSummary:
    """Least-squares line ys ~ slope * xs + intercept, with the Table-style summary.

    The adjusted R^2 is the one-predictor form. If ys is constant the
    correlation is undefined; r and r2 are then reported as 0.
    """
    x, y = _pair(xs, ys)
    n = x.size
    if n < 3:
        raise InsufficientDataError(f"ols_fit needs n >= 3, got {n}")
    sxy, sxx, syy = _moments(x, y)
    if sxx == 0:
        raise ConstantPredictorError("constant predictor: xs has zero variance")
    slope = sxy / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    res = y - (slope * x + intercept)
    sse = float(res @ res)
    r = 0.0 if syy == 0 else min(1.0, max(-1.0, sxy / math.sqrt(sxx * syy)))
    r2 = r * r
    adj = adjusted_r2(r2, n)
    return RegressionSummary(slope, intercept, r, r2, adj, math.sqrt(sse / (n - 2)), n)


def mse(residuals: Sequence[float]) -> float:
    r = np.asarray(residuals, dtype=np.float64)
    if r.size == 0:
        raise StatsError("mse of an empty residual list")
    return float(r @ r) / r.size


def error_histogram(residuals: Sequence[float], bins: int = 20) -> ErrorHistogram:
    """Equal-width bins over [min, max]; bins are [lo, hi) except the last, which is closed.

    An all-equal input gives one zero-width bin. If the range is too narrow
    for `bins` distinct float edges, coincident edges are merged.
    """
    r = np.asarray(residuals, dtype=np.float64)
    if r.size == 0:
        raise StatsError("error_histogram of an empty residual list")
    if bins < 1:
        raise StatsError(f"bins must be >= 1, got {bins}")
    if not np.all(np.isfinite(r)):
        raise StatsError("residuals must be finite")
    lo, hi = float(r.min()), float(r.max())
    if lo == hi:
        return ErrorHistogram((lo, hi), (int(r.size),))
    edges = np.unique(np.linspace(lo, hi, bins + 1))
    edges[-1] = hi
    idx = np.searchsorted(edges, r, side="right") - 1
    idx = np.minimum(idx, edges.size - 2)
    counts = np.bincount(idx, minlength=edges.size - 1)
    return ErrorHistogram(tuple(float(e) for e in edges), tuple(int(c) for c in counts))
