"""Lipschitz observables, covariance estimation and decay classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import UsageError
from .orbits import Ensemble, OrbitStream
from .stats import linear_fit
from .systems import SystemSpec
from .torus import SCALE, U64, TorusPoint, distance_units, random_lattice

N_BATCHES = 32
MIN_SAMPLES = 1000


def lipschitz_bump(r: float, t):
    """1 on ``[0, r]``, 0 on ``[2r, inf)``, linear in between (Lipschitz constant ``1/r``)."""
    if r <= 0:
        raise UsageError("bump radius must be positive")
    return np.clip(2.0 - np.asarray(t, dtype=float) / r, 0.0, 1.0)


@dataclass(frozen=True)
class FourierMode:
    """``amplitude * cos(2 pi <q, x>)`` (or sin); the phase is reduced mod 1 exactly."""

    q: tuple[int, ...]
    phase: str = "cos"
    amplitude: float = 1.0

    def __post_init__(self):
        if self.phase not in ("cos", "sin"):
            raise UsageError("phase must be 'cos' or 'sin'")
        if abs(self.amplitude) > 1:
            raise UsageError("observables must stay in [-1, 1]")
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))

    @property
    def lipschitz_constant(self) -> float:
        return 2 * math.pi * sum(abs(v) for v in self.q) * abs(self.amplitude)

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        qs = np.array(self.q, dtype=np.int64).astype(U64)
        angle = (xs @ qs).astype(float) * (2 * math.pi / SCALE)
        vals = np.cos(angle) if self.phase == "cos" else np.sin(angle)
        return self.amplitude * vals


@dataclass(frozen=True)
class BumpAtPoint:
    """``eta_r(d(center, y))``: equals 1 on ``B(center, r)`` and vanishes off ``B(center, 2r)``."""

    center: TorusPoint
    radius: float

    @property
    def lipschitz_constant(self) -> float:
        return 1.0 / self.radius

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        d = distance_units(xs, self.center.coords).astype(float) / SCALE
        return lipschitz_bump(self.radius, d)


@dataclass(frozen=True)
class Coordinate:
    """The ``i``-th coordinate in [0, 1); discontinuous across the seam at 0."""

    i: int

    @property
    def lipschitz_constant(self) -> float:
        return math.inf

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        return xs[:, self.i].astype(float) / SCALE


Observable = Union[FourierMode, BumpAtPoint, Coordinate]


@dataclass(frozen=True)
class CorrelationSeries:
    lags: np.ndarray
    cov: np.ndarray
    stderr: np.ndarray
    n_samples: int
    estimator: str = "space"

    @property
    def noise_floor(self) -> np.ndarray:
        return 3.0 * self.stderr

    @property
    def above_floor(self) -> np.ndarray:
        return np.abs(self.cov) > self.noise_floor


def _batch_cov(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Covariance over all samples and its batch-means standard error."""
    n = a.size
    edges = np.linspace(0, n, N_BATCHES + 1).astype(int)
    sab, sa, sb, covs = [], [], [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        pa, pb = a[lo:hi], b[lo:hi]
        sab.append(float(np.dot(pa, pb)))
        sa.append(float(pa.sum()))
        sb.append(float(pb.sum()))
        m = hi - lo
        covs.append(sab[-1] / m - (sa[-1] / m) * (sb[-1] / m))
    cov = math.fsum(sab) / n - (math.fsum(sa) / n) * (math.fsum(sb) / n)
    stderr = float(np.std(covs, ddof=1) / math.sqrt(N_BATCHES))
    return cov, stderr


def _space_series(system, phi, psi, lags, n_samples, seed):
    rng = np.random.default_rng(seed)
    start = random_lattice(rng, n_samples, system.dimension)
    psi_vals = psi(start)
    ens = Ensemble(system, start, rng)
    out = {}
    current = 0
    phi_vals = phi(start)
    for lag in sorted(set(lags)):
        while current < lag:
            ens.step()
            current += 1
        if current:
            phi_vals = phi(ens.points)
        out[lag] = _batch_cov(phi_vals, psi_vals)
    return out


def _time_series(system, phi, psi, lags, n_samples, seed):
    rng = np.random.default_rng(seed)
    base = TorusPoint(random_lattice(rng, 1, system.dimension)[0])
    longest = max(lags)
    pts = np.vstack([base.coords[None, :], OrbitStream(system, base).take(n_samples + longest - 1)])
    phi_all, psi_all = phi(pts), psi(pts[:n_samples])
    return {lag: _batch_cov(phi_all[lag:lag + n_samples], psi_all) for lag in lags}


def _series(system, phi, psi, lags, n_samples, seed, estimator):
    if n_samples < MIN_SAMPLES:
        raise UsageError(f"need at least {MIN_SAMPLES} samples")
    if estimator == "space":
        return _space_series(system, phi, psi, lags, n_samples, seed)
    if estimator == "time":
        return _time_series(system, phi, psi, lags, n_samples, seed)
    raise UsageError(f"unknown estimator {estimator!r}")


def covariance_estimate(system: SystemSpec, phi: Observable, psi: Observable, n: int,
                        n_samples: int, seed: int, estimator: str = "space") -> tuple[float, float]:
    """Estimate ``cov(phi o f^n, psi)`` under Lebesgue measure: ``(cov_hat, stderr)``."""
    return _series(system, phi, psi, [n], n_samples, seed, estimator)[n]


def decay_profile(system: SystemSpec, phi: Observable, psi: Observable, n_max: int,
                  n_samples: int, seed: int, estimator: str = "space") -> CorrelationSeries:
    """Covariances at lags ``0..n_max`` from one shared sample set."""
    lags = list(range(n_max + 1))
    res = _series(system, phi, psi, lags, n_samples, seed, estimator)
    cov = np.array([res[n][0] for n in lags])
    err = np.array([res[n][1] for n in lags])
    return CorrelationSeries(np.array(lags), cov, err, n_samples, estimator)


@dataclass(frozen=True)
class DecayClass:
    kind: str  # exponential | polynomial | none | censored
    rate: float | None = None
    exponent: float | None = None
    lags_used: int = 0
    r2_exponential: float | None = None
    r2_polynomial: float | None = None

    @property
    def superpolynomial_compatible(self) -> bool:
        return self.kind in ("exponential", "censored")


MIN_LAGS = 10


def decay_classify(series: CorrelationSeries) -> DecayClass:
    """Exponential vs polynomial vs no decay, using only lags above the noise floor."""
    lags, cov = series.lags, np.abs(series.cov)
    floor = series.noise_floor
    n_max = int(lags.max())
    late = lags >= n_max / 2
    if np.any(cov[late] > 3 * floor[late]):
        return DecayClass("none", lags_used=int(series.above_floor.sum()))
    use = series.above_floor & (lags >= 1)
    if use.sum() < MIN_LAGS:
        return DecayClass("censored", lags_used=int(use.sum()))
    y = np.log(cov[use])
    expo = linear_fit(lags[use].astype(float), y)
    poly = linear_fit(np.log(lags[use].astype(float)), y)
    if expo.r_squared >= poly.r_squared:
        kind = "exponential"
    else:
        kind = "polynomial"
    return DecayClass(kind, rate=-expo.slope, exponent=-poly.slope, lags_used=int(use.sum()),
                      r2_exponential=expo.r_squared, r2_polynomial=poly.r_squared)


def hit_fraction(system: SystemSpec, x: TorusPoint, r: float, n: int, n_samples: int,
                 seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate of ``mu(B(x, r) & f^-n B(x, 2r))`` with its binomial stderr."""
    from .torus import below_threshold

    rng = np.random.default_rng(seed)
    start = random_lattice(rng, n_samples, system.dimension)
    inside = distance_units(start, x.coords) < U64(below_threshold(r))
    ens = Ensemble(system, start, rng)
    for _ in range(n):
        ens.step()
    back = distance_units(ens.points, x.coords) < U64(below_threshold(2 * r))
    p = float(np.mean(inside & back))
    return p, math.sqrt(max(p * (1 - p), 1.0 / n_samples) / n_samples)
