"""Scaling-law regression and bootstrap intervals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, UsageError

MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    stderr_slope: float
    r_squared: float
    window: tuple[int, int]
    n_points: int
    censored_count: int = 0


def linear_fit(x, y, window=(0, 0), censored_count: int = 0) -> ScalingFit:
    """Ordinary least squares of ``y`` on ``x`` with slope stderr and r^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"need at least 2 points, got {n}")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0:
        raise InsufficientDataError("abscissae are all equal")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    sse = float(np.sum(resid**2))
    syy = float(np.sum((y - ym) ** 2))
    stderr = float(np.sqrt(sse / (n - 2) / sxx)) if n > 2 else 0.0
    r2 = 1.0 if syy == 0 or sse <= 1e-28 * max(syy, 1.0) else min(max(1.0 - sse / syy, 0.0), 1.0)
    return ScalingFit(slope, intercept, stderr, r2, tuple(window), n, censored_count)


def loglog_fit(x, y, window: tuple[int, int] | None = None, censored_count: int = 0) -> ScalingFit:
    """Fit ``log y = intercept + slope * log x`` over ``window`` (a half-open index range)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise UsageError("x and y must have the same shape")
    lo, hi = window if window is not None else (0, x.size)
    xs, ys = x[lo:hi], y[lo:hi]
    bad = [lo + int(i) for i in np.flatnonzero((xs <= 0) | (ys <= 0))]
    if bad:
        raise UsageError(f"nonpositive data at indices {bad}")
    if xs.size < MIN_FIT_POINTS:
        raise InsufficientDataError(f"need at least {MIN_FIT_POINTS} points in the window, got {xs.size}")
    return linear_fit(np.log(xs), np.log(ys), (lo, hi), censored_count)


@dataclass(frozen=True)
class EnvelopeFit:
    """Least squares plus lower/upper envelope fits of one scaling curve.

    The envelopes are finite-scale stand-ins for liminf and limsup: within
    every sliding window of three consecutive scales the point lying lowest
    (highest) relative to the least-squares line is kept, and a line is fitted
    through the kept points.
    """

    lower: ScalingFit
    upper: ScalingFit
    ls: ScalingFit

    @property
    def agree(self) -> bool:
        return abs(self.upper.slope - self.lower.slope) <= self.ls.stderr_slope + 1e-12

    @property
    def rate(self) -> float | None:
        """Plain least-squares slope when the envelopes agree, else ``None``."""
        return self.ls.slope if self.agree else None


def _window_extremes(resid: np.ndarray, pick) -> np.ndarray:
    n = resid.size
    keep = set()
    for c in range(n):
        lo, hi = max(c - 1, 0), min(c + 2, n)
        keep.add(lo + int(pick(resid[lo:hi])))
    return np.array(sorted(keep))


def envelope_fit(x, y, censored_count: int = 0) -> EnvelopeFit:
    """Envelope and least-squares fits of ``y`` against ``x`` (already in log space)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < MIN_FIT_POINTS:
        raise InsufficientDataError(f"need at least {MIN_FIT_POINTS} points, got {x.size}")
    ls = linear_fit(x, y, (0, x.size), censored_count)
    resid = y - (ls.intercept + ls.slope * x)
    scale = max(float(np.abs(y).max()), 1.0)
    resid = np.where(np.abs(resid) <= 1e-12 * scale, 0.0, resid)
    low = _window_extremes(resid, np.argmin)
    high = _window_extremes(resid, np.argmax)
    return EnvelopeFit(
        lower=linear_fit(x[low], y[low], (0, x.size), censored_count),
        upper=linear_fit(x[high], y[high], (0, x.size), censored_count),
        ls=ls,
    )


def bootstrap_ci(values, n_resamples: int = 1000, level: float = 0.95, seed: int = 0) -> tuple[float, float]:
    """Percentile bootstrap interval for the median."""
    v = np.asarray(values, dtype=float)
    if v.size < 30:
        raise InsufficientDataError(f"bootstrap needs at least 30 values, got {v.size}")
    if n_resamples < 200:
        raise UsageError("bootstrap needs at least 200 resamples")
    if not 0 < level < 1:
        raise UsageError("level must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, v.size, size=(n_resamples, v.size))
    # lower median: always a data value, so shifts pass through exactly
    meds = np.quantile(v[idx], 0.5, axis=1, method="inverted_cdf")
    alpha = (1 - level) / 2
    lo, hi = np.quantile(meds, [alpha, 1 - alpha], method="inverted_cdf")
    return float(lo), float(hi)

