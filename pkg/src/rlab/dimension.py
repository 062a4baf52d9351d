"""Ball-measure models and pointwise-dimension estimation.

Balls are open balls of the max metric, i.e. cubes of side ``2r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import InsufficientDataError, UsageError
from .stats import EnvelopeFit, envelope_fit
from .torus import U64, TorusPoint, above_threshold, below_threshold, distance_units, random_lattice


def _volume(k: int, r) -> np.ndarray:
    return np.minimum(2.0 * np.asarray(r, dtype=float), 1.0) ** k


def _check_radius(r: float) -> None:
    if not 0 < r <= 0.5:
        raise UsageError(f"radius must lie in (0, 1/2], got {r}")


@dataclass(frozen=True)
class AnalyticLebesgue:
    """Lebesgue measure: ``mu(B(x, r)) = min(2r, 1)**k``."""

    k: int

    def ball(self, x: TorusPoint, r: float) -> tuple[float, float]:
        _check_radius(r)
        return float(_volume(self.k, r)), 0.0

    def ball_curve(self, x: TorusPoint, radii) -> tuple[np.ndarray, np.ndarray]:
        radii = np.asarray(radii, dtype=float)
        return _volume(self.k, radii), np.zeros_like(radii)

    def annulus(self, x: TorusPoint, lo: float, hi: float) -> float:
        """Measure of ``{y : lo < d(x, y) < hi}``."""
        if hi <= lo:
            return 0.0
        return float(_volume(self.k, hi) - _volume(self.k, max(lo, 0.0)))


class AtomicMeasure:
    """Weighted atoms plus an optional Lebesgue component, queried exactly.

    ``weights`` are normalised together with ``lebesgue_weight`` to total mass 1.
    """

    def __init__(self, points, weights=None, lebesgue_weight: float = 0.0):
        pts = np.asarray(points, dtype=U64)
        if pts.ndim == 1:
            pts = pts[:, None]
        n = pts.shape[0]
        w = np.full(n, 1.0 / max(n, 1)) if weights is None else np.asarray(weights, dtype=float)
        if w.shape != (n,) or np.any(w < 0) or lebesgue_weight < 0:
            raise UsageError("weights must be nonnegative, one per atom")
        total = w.sum() + lebesgue_weight
        if total <= 0:
            raise UsageError("measure has zero total mass")
        self.points = pts
        self.weights = w / total
        self.lebesgue_weight = lebesgue_weight / total
        self.k = pts.shape[1]

    def _units(self, x: TorusPoint) -> np.ndarray:
        if x.k != self.k:
            raise UsageError(f"dimension mismatch: {x.k} vs {self.k}")
        return distance_units(self.points, x.coords)

    def ball(self, x: TorusPoint, r: float) -> tuple[float, float]:
        _check_radius(r)
        val, err = self.ball_curve(x, [r])
        return float(val[0]), float(err[0])

    def ball_curve(self, x: TorusPoint, radii) -> tuple[np.ndarray, np.ndarray]:
        units = self._units(x)
        order = np.argsort(units, kind="stable")
        cum = np.concatenate([[0.0], np.cumsum(self.weights[order])])
        th = np.array([below_threshold(r) for r in np.atleast_1d(radii)], dtype=U64)
        counts = np.searchsorted(units[order], th, side="left")
        vals = cum[counts] + self.lebesgue_weight * _volume(self.k, radii)
        return np.minimum(vals, 1.0), self._stderr(vals)

    def _stderr(self, vals: np.ndarray) -> np.ndarray:
        return np.zeros_like(vals)

    def annulus(self, x: TorusPoint, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        units = self._units(x)
        lo_t = above_threshold(lo)
        inside = (units < U64(below_threshold(hi)))
        if lo_t >= 0:
            inside &= units > U64(lo_t)
        leb = self.lebesgue_weight * float(_volume(self.k, hi) - _volume(self.k, max(lo, 0.0)))
        return float(self.weights[inside].sum()) + leb


class EmpiricalSample(AtomicMeasure):
    """Uniform empirical measure of ``M`` samples, with binomial standard errors."""

    MIN_SAMPLES = 10_000

    def __init__(self, points):
        super().__init__(points)
        if self.points.shape[0] < self.MIN_SAMPLES:
            raise UsageError(f"empirical sample needs at least {self.MIN_SAMPLES} points")

    @classmethod
    def lebesgue(cls, k: int, m: int, seed: int) -> "EmpiricalSample":
        return cls(random_lattice(np.random.default_rng(seed), m, k))

    def _stderr(self, vals):
        p = np.clip(vals, 0.0, 1.0)
        return np.sqrt(p * (1 - p) / self.points.shape[0])


MeasureModel = Union[AnalyticLebesgue, AtomicMeasure]


def ball_measure(model: MeasureModel, x: TorusPoint, r: float) -> tuple[float, float]:
    """``(value, stderr)`` of the measure of the open ball ``B(x, r)``."""
    return model.ball(x, r)


@dataclass(frozen=True)
class BallMeasureCurve:
    base: TorusPoint
    radii: np.ndarray
    mu: np.ndarray
    stderr: np.ndarray


def ball_measure_curve(model: MeasureModel, x: TorusPoint, radii) -> BallMeasureCurve:
    radii = np.asarray(radii, dtype=float)
    for r in radii:
        _check_radius(r)
    mu, err = model.ball_curve(x, radii)
    return BallMeasureCurve(x, radii, mu, err)


def pointwise_dimension_fit(model: MeasureModel, x: TorusPoint, radii) -> EnvelopeFit:
    """Envelope fits of ``log mu(B(x, r))`` against ``log r``; zero-mass radii are dropped."""
    curve = ball_measure_curve(model, x, radii)
    ok = curve.mu > 0
    if ok.sum() < 4:
        raise InsufficientDataError(
            f"only {int(ok.sum())} radii with positive mass", profile=curve.mu.tolist()
        )
    return envelope_fit(np.log(curve.radii[ok]), np.log(curve.mu[ok]), censored_count=int((~ok).sum()))


def hd_estimate(model: MeasureModel, points: Sequence[TorusPoint], radii, quantile: float = 0.95) -> float:
    """95th percentile of per-point lower-dimension slopes (finite-sample ess-sup)."""
    if len(points) < 50:
        raise UsageError("hd_estimate needs at least 50 sample points")
    slopes, failures = [], 0
    for x in points:
        try:
            slopes.append(pointwise_dimension_fit(model, x, radii).lower.slope)
        except InsufficientDataError:
            failures += 1
    if failures > 0.2 * len(points):
        raise InsufficientDataError(f"{failures} of {len(points)} points had too few usable radii")
    return float(np.quantile(slopes, quantile))


@dataclass(frozen=True)
class InequalityReport:
    lower_ok: np.ndarray
    upper_ok: np.ndarray
    tol: float
    required_fraction: float

    @property
    def point_ok(self) -> np.ndarray:
        return self.lower_ok & self.upper_ok

    @property
    def fraction(self) -> float:
        return float(self.point_ok.mean()) if self.point_ok.size else 0.0

    @property
    def passed(self) -> bool:
        return self.point_ok.size > 0 and self.fraction >= self.required_fraction


def inequality_check(r_fits, d_fits, tol: float = 0.2, required_fraction: float = 0.9) -> InequalityReport:
    """Per-point test of ``R_lower <= d_lower + tol`` and ``R_upper <= d_upper + tol``.

    ``r_fits`` and ``d_fits`` are equal-length sequences of :class:`EnvelopeFit`
    (or of ``(lower, upper)`` slope pairs) for the same points.
    """
    if len(r_fits) != len(d_fits):
        raise UsageError(f"mismatched point sets: {len(r_fits)} vs {len(d_fits)}")

    def pair(f):
        if isinstance(f, EnvelopeFit):
            return f.lower.slope, f.upper.slope
        lo, hi = f
        return float(lo), float(hi)

    r = np.array([pair(f) for f in r_fits], dtype=float).reshape(-1, 2)
    d = np.array([pair(f) for f in d_fits], dtype=float).reshape(-1, 2)
    return InequalityReport(r[:, 0] <= d[:, 0] + tol, r[:, 1] <= d[:, 1] + tol, tol, required_fraction)
