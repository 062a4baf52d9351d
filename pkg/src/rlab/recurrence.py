"""First return times to shrinking balls and recurrence-rate fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dimension import MeasureModel
from .errors import CapacityError, InsufficientDataError, UsageError
from .orbits import OrbitStream
from .stats import EnvelopeFit, envelope_fit
from .systems import SystemSpec
from .torus import U64, TorusPoint, below_threshold, distance_units, units_to_point


@dataclass(frozen=True)
class RadiusGrid:
    """Strictly decreasing radii in (0, 1/2) with exact lattice thresholds."""

    radii: tuple[float, ...]
    thresholds: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii:
            raise UsageError("radius grid is empty")
        if any(not 0 < r < 0.5 for r in radii):
            raise UsageError("radii must lie in (0, 1/2)")
        if any(b >= a for a, b in zip(radii, radii[1:])):
            raise UsageError("radii must be strictly decreasing")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "thresholds", tuple(below_threshold(r) for r in radii))

    @classmethod
    def exponential(cls, m_min: float, m_max: float, step: float = 1.0) -> "RadiusGrid":
        """Radii ``e^{-m}`` for ``m = m_min, m_min + step, ..., m_max``."""
        count = int(round((m_max - m_min) / step)) + 1
        return cls(tuple(math.exp(-(m_min + i * step)) for i in range(count)))

    @classmethod
    def geometric(cls, r0: float, q: float, count: int) -> "RadiusGrid":
        return cls(tuple(r0 * q**i for i in range(count)))

    def __len__(self) -> int:
        return len(self.radii)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.radii)


@dataclass(frozen=True)
class ReturnCurve:
    """First return times ``tau[i]`` to ``B(x, radii[i])``; censored entries hold ``n_max``."""

    base: TorusPoint
    radii: np.ndarray
    tau: np.ndarray
    censored: np.ndarray
    n_max: int

    def uncensored(self) -> tuple[np.ndarray, np.ndarray]:
        keep = ~self.censored
        return self.radii[keep], self.tau[keep]


def return_curve(system: SystemSpec, x: TorusPoint, grid: RadiusGrid, n_max: int) -> ReturnCurve:
    """One forward pass over ``f^n x``, recording the first ``n`` entering each ball."""
    if n_max < 1:
        raise UsageError("n_max must be at least 1")
    thresholds = np.array(grid.thresholds, dtype=U64)
    tau = np.full(len(grid), n_max, dtype=np.int64)
    unset = np.ones(len(grid), dtype=bool)
    stream = OrbitStream(system, x)
    offset = 0
    for block in stream.blocks(largest=1 << 18):
        block = block[: n_max - offset]
        units = units_to_point(block, x.coords)
        closest = units.min()
        # radii are decreasing, so unset entries form a suffix of the grid
        for i in np.flatnonzero(unset):
            if closest >= thresholds[i]:
                break
            tau[i] = offset + int(np.argmax(units < thresholds[i])) + 1
            unset[i] = False
        offset += block.shape[0]
        if not unset.any() or offset >= n_max:
            break
    return ReturnCurve(x, grid.array, tau, unset.copy(), n_max)


def recurrence_rate_fit(curve: ReturnCurve) -> EnvelopeFit:
    """Envelope and least-squares fits of ``log tau_r`` against ``log(1/r)``."""
    radii, tau = curve.uncensored()
    if radii.size < 4:
        raise InsufficientDataError(
            f"only {radii.size} uncensored radii (need 4)",
            profile={"radii": curve.radii.tolist(), "censored": curve.censored.tolist()},
        )
    return envelope_fit(np.log(1.0 / radii), np.log(tau.astype(float)), int(curve.censored.sum()))


@dataclass(frozen=True)
class LongFlyReport:
    base: TorusPoint
    r: float
    delta: float
    epsilon: float
    n_lo: int
    n_hi: int
    passed: bool
    violation: int | None = None
    vacuous: bool = False

    def recheck(self, system: SystemSpec) -> bool:
        """Re-evaluate the recorded violation; True when it reproduces."""
        if self.violation is None:
            return False
        pts = OrbitStream(system, self.base).take(self.violation)
        return bool(distance_units(pts[-1], self.base.coords) < U64(below_threshold(self.r)))


def long_fly_window(r: float, delta: float, epsilon: float, mu_ball: float) -> tuple[int, int]:
    n_lo = max(1, math.ceil(r ** (-delta)))
    n_hi = math.floor(mu_ball ** (-1.0 + epsilon))
    return n_lo, n_hi


def long_fly_check(
    system: SystemSpec,
    x: TorusPoint,
    r: float,
    delta: float,
    epsilon: float,
    measure: MeasureModel,
    budget: int = 10**8,
) -> LongFlyReport:
    """Check that ``d(f^n x, x) >= r`` for every ``n`` in ``[r^-delta, mu(B(x,r))^(-1+epsilon)]``."""
    if not 0 < epsilon < 1 or delta <= 0:
        raise UsageError("need delta > 0 and 0 < epsilon < 1")
    mu, _ = measure.ball(x, r)
    if mu <= 0:
        raise UsageError("ball has zero measure; the window is unbounded")
    n_lo, n_hi = long_fly_window(r, delta, epsilon, mu)
    if n_hi < n_lo:
        return LongFlyReport(x, r, delta, epsilon, n_lo, n_hi, True, vacuous=True)
    limit = min(n_hi, budget)
    threshold = U64(below_threshold(r))
    stream = OrbitStream(system, x)
    offset = 0
    for block in stream.blocks():
        block = block[: limit - offset]
        start = offset + 1
        offset += block.shape[0]
        if offset < n_lo:
            continue
        skip = max(n_lo - start, 0)
        hits = np.flatnonzero(units_to_point(block[skip:], x.coords) < threshold)
        if hits.size:
            return LongFlyReport(x, r, delta, epsilon, n_lo, n_hi, False, start + skip + int(hits[0]))
        if offset >= limit:
            break
    report = LongFlyReport(x, r, delta, epsilon, n_lo, n_hi, True)
    if n_hi > budget:
        raise CapacityError(f"long-fly window ends at {n_hi}, beyond the budget {budget}", partial=report)
    return report
