"""Partitions, itineraries, repetition times and entropy estimates.

Two partition families are provided: exact dyadic grids, and the
separated-ball construction whose ball radii are chosen so that thin annuli
around each radius carry little mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numba
import numpy as np

from .dimension import MeasureModel
from .errors import CapacityError, InsufficientDataError, UndefinedCellError, UsageError
from .orbits import Ensemble, OrbitStream
from .stats import ScalingFit, linear_fit, loglog_fit
from .systems import SystemSpec
from .torus import SCALE, U64, TorusPoint, below_threshold, distance_units, random_lattice

UNDEFINED = -1


@numba.njit(cache=True, nogil=True)
def _grid_cells(xs, drop, g, out):
    n, k = xs.shape
    for p in range(n):
        cell = 0
        for c in range(k):
            cell |= np.int64(xs[p, c] >> drop) << (g * c)
        out[p] = cell


@dataclass(frozen=True)
class GridPartition:
    """Dyadic cubes of side ``2**-g``; the cell id packs the top ``g`` bits of each coordinate."""

    g: int
    k: int

    def __post_init__(self):
        if not 1 <= self.g or self.g * self.k > 62:
            raise UsageError("need g >= 1 and g * k <= 62")

    @property
    def n_cells(self) -> int:
        return 1 << (self.g * self.k)

    def cells(self, xs: np.ndarray) -> np.ndarray:
        xs = np.ascontiguousarray(np.asarray(xs, dtype=U64).reshape(-1, self.k))
        out = np.empty(xs.shape[0], dtype=np.int64)
        _grid_cells(xs, U64(64 - self.g), self.g, out)
        return out


@numba.njit(cache=True, nogil=True)
def _first_ball(xs, centers, thresholds, out):
    n, k = xs.shape
    for p in range(n):
        out[p] = -1
        for i in range(centers.shape[0]):
            far = False
            for c in range(k):
                d = xs[p, c] - centers[i, c]
                nd = -d
                if nd < d:
                    d = nd
                if d >= thresholds[i]:
                    far = True
                    break
            if not far:
                out[p] = i
                break


@dataclass(frozen=True)
class SeparatedBalls:
    """Cells ``Q_i = B_i minus (B_1 u ... u B_{i-1})`` for balls ``B_i = B(x_i, rho_i)``."""

    centers: np.ndarray
    radii: np.ndarray
    s: float
    thresholds: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=U64)
        if centers.ndim == 1:
            centers = centers[:, None]
        radii = np.asarray(self.radii, dtype=float)
        if radii.shape != (centers.shape[0],):
            raise UsageError("one radius per center")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "thresholds", np.array([below_threshold(r) for r in radii], dtype=U64))

    @property
    def k(self) -> int:
        return self.centers.shape[1]

    @property
    def n_cells(self) -> int:
        return self.centers.shape[0]

    def cells(self, xs: np.ndarray) -> np.ndarray:
        xs = np.ascontiguousarray(np.asarray(xs, dtype=U64).reshape(-1, self.k))
        out = np.empty(xs.shape[0], dtype=np.int64)
        _first_ball(xs, np.ascontiguousarray(self.centers), self.thresholds, out)
        return out

    def boundary_distance(self, xs: np.ndarray) -> np.ndarray:
        """Max-metric distance to the union of ball boundaries (an upper bound set for the cell boundaries)."""
        xs = np.asarray(xs, dtype=U64).reshape(-1, self.k)
        best = np.full(xs.shape[0], np.inf)
        for c, rho in zip(self.centers, self.radii):
            d = distance_units(xs, c).astype(float) / SCALE
            best = np.minimum(best, np.abs(d - rho))
        return best


Partition = Union[GridPartition, SeparatedBalls]


def cell_of(partition: Partition, x: TorusPoint) -> int:
    """Symbol of the cell containing ``x``; ``UNDEFINED`` (-1) when no ball contains it."""
    return int(partition.cells(x.coords[None, :])[0])


@numba.njit(cache=True, nogil=True)
def _greedy_separated(samples, order, threshold, out):
    n, k = samples.shape
    count = 0
    for idx in range(order.size):
        p = order[idx]
        ok = True
        for j in range(count):
            q = out[j]
            dmax = np.uint64(0)
            for c in range(k):
                d = samples[p, c] - samples[q, c]
                nd = -d
                if nd < d:
                    d = nd
                if d > dmax:
                    dmax = d
            if dmax < threshold:
                ok = False
                break
        if ok:
            out[count] = p
            count += 1
    return count


def maximal_separated_set(samples: np.ndarray, s: float, seed: int | None = None) -> np.ndarray:
    """Greedy ``s``-separated subset of ``samples``, maximal over the sample set.

    Samples are visited in their given order, or in a seed-shuffled order when
    ``seed`` is not None.  Returns the accepted centers, shape ``(n, k)``.
    """
    pts = np.ascontiguousarray(np.asarray(samples, dtype=U64))
    if pts.ndim == 1:
        pts = pts[:, None]
    if not 0 < s < 0.5:
        raise UsageError("scale s must lie in (0, 1/2)")
    if pts.shape[0] < min((4.0 / s) ** pts.shape[1], 1e6) and pts.shape[0] > 2:
        raise UsageError(f"need about (4/s)^k = {(4.0 / s) ** pts.shape[1]:.0f} samples")
    order = np.arange(pts.shape[0])
    if seed is not None:
        order = np.random.default_rng(seed).permutation(order)
    out = np.empty(pts.shape[0], dtype=np.int64)
    count = _greedy_separated(pts, order, U64(below_threshold(s)), out)
    return pts[out[:count]]


@dataclass(frozen=True)
class Quadrisection:
    intervals: tuple[tuple[float, float], ...]
    masses: tuple[float, ...]
    s: float

    @property
    def rho(self) -> float:
        a, b = self.intervals[-1]
        return self.s * (a + b) / 2


def quadrisection(x: TorusPoint, s: float, measure: MeasureModel, depth: int) -> Quadrisection:
    """Nested intervals ``I_0 = (1, 2) > I_1 > ... > I_depth``, each a central quarter of its parent.

    ``m(I) = mu({s a < d(x, .) < s b})`` for ``I = (a, b)``; the lighter of the
    two central quarters is kept (ties go left), so ``m(I_{n+1}) <= m(I_n) / 2``.
    """
    if depth < 1:
        raise UsageError("depth must be at least 1")
    a, b = 1.0, 2.0
    intervals = [(a, b)]
    masses = [measure.annulus(x, s * a, s * b)]
    for _ in range(depth):
        q = (b - a) / 4
        left = (a + q, a + 2 * q)
        right = (a + 2 * q, a + 3 * q)
        ml = measure.annulus(x, s * left[0], s * left[1])
        mr = measure.annulus(x, s * right[0], s * right[1])
        (a, b), m = (left, ml) if ml <= mr else (right, mr)
        intervals.append((a, b))
        masses.append(m)
    return Quadrisection(tuple(intervals), tuple(masses), s)


def select_thin_radius(x: TorusPoint, s: float, measure: MeasureModel, depth: int = 8) -> float:
    """Radius ``rho`` in ``(s, 2s)`` whose thin annuli carry geometrically small mass."""
    return quadrisection(x, s, measure, depth).rho


def annulus_bound_holds(x: TorusPoint, s: float, rho: float, measure: MeasureModel, n: int) -> bool:
    """``mu(rho - 4^-n s < d < rho + 4^-n s) <= 2^-(n-1) mu(B(x, 2s))``."""
    width = s * 4.0**-n
    lhs = measure.annulus(x, rho - width, rho + width)
    rhs = 2.0 ** (-(n - 1)) * measure.annulus(x, 0.0, 2 * s)
    return lhs <= rhs * (1 + 1e-12) + 1e-15


@dataclass(frozen=True)
class PartitionDiagnostics:
    n_cells: int
    coverage: float
    boundary_c: float
    boundary_a: float
    boundary_eps: tuple[float, ...]
    boundary_mass: tuple[float, ...]


def build_partition(samples: np.ndarray, s: float, measure: MeasureModel, seed: int | None = 0,
                    depth: int = 8, boundary_samples: int = 200_000,
                    boundary_levels: Sequence[int] = (1, 2, 3, 4, 5, 6)) -> tuple[SeparatedBalls, PartitionDiagnostics]:
    """Separated-ball partition with thin-annulus radii, plus coverage and boundary diagnostics."""
    centers = maximal_separated_set(samples, s, seed)
    radii = [select_thin_radius(TorusPoint(c), s, measure, depth) for c in centers]
    part = SeparatedBalls(centers, radii, s)
    coverage = float(np.mean(part.cells(samples) != UNDEFINED))
    rng = np.random.default_rng(None if seed is None else seed + 1)
    probe = random_lattice(rng, boundary_samples, part.k)
    bd = part.boundary_distance(probe)
    eps = [s * 4.0**-n for n in boundary_levels]
    mass = [float(np.mean(bd < e)) for e in eps]
    good = [i for i, m in enumerate(mass) if m > 0]
    if len(good) >= 4:
        fit = loglog_fit(np.array(eps)[good], np.array(mass)[good])
        c, a = math.exp(fit.intercept), fit.slope
    else:
        c, a = math.nan, math.nan
    diag = PartitionDiagnostics(part.n_cells, coverage, c, a, tuple(eps), tuple(mass))
    return part, diag


def itinerary(system: SystemSpec, x: TorusPoint, partition: Partition, length: int) -> np.ndarray:
    """Symbols of ``x, f x, ..., f^(length-1) x``."""
    stream = OrbitStream(system, x)
    pts = np.vstack([x.coords[None, :], stream.take(max(length - 1, 0))])
    return partition.cells(pts)


class _SymbolChunks:
    """Itinerary in consecutive chunks; each chunk keeps ``overlap`` symbols of its predecessor.

    ``prefix`` holds the first symbols of the itinerary.
    """

    def __init__(self, system, x, partition, prefix_len: int, overlap: int):
        self.partition = partition
        self.stream = OrbitStream(system, x)
        first = np.vstack([x.coords[None, :], self.stream.take(max(prefix_len - 1, 0))])
        self.prefix = partition.cells(first)
        self.overlap = overlap
        self.buffer = self.prefix.copy()
        self.start = 0  # itinerary index of buffer[0]

    def advance(self, size: int) -> None:
        keep = self.buffer[-self.overlap:] if self.overlap else self.buffer[:0]
        new = self.partition.cells(self.stream.take(size))
        self.start += self.buffer.size - keep.size
        self.buffer = np.concatenate([keep, new])


_HASH_BASE = np.uint64(0x9E3779B97F4A7C15)
_CHUNK = 1 << 18


@numba.njit(cache=True, nogil=True)
def _hash_search(buf, start, prefix, n, k_from, target, top_power):
    # candidates k >= k_from whose length-n word lies inside buf (buf[0] is index start)
    i0 = k_from - start
    if i0 + n > buf.size:
        return -1
    h = np.uint64(0)
    for i in range(n):
        h = h * _HASH_BASE + np.uint64(buf[i0 + i] + 1)
    i = i0
    while True:
        if h == target:
            same = True
            for j in range(n):
                if buf[i + j] != prefix[j]:
                    same = False
                    break
            if same:
                return start + i
        if i + n >= buf.size:
            return -1
        h = (h - np.uint64(buf[i] + 1) * top_power) * _HASH_BASE + np.uint64(buf[i + n] + 1)
        i += 1


def _word_hash(sym: np.ndarray, n: int) -> tuple[np.uint64, np.uint64]:
    h, p = 0, 1
    mask = (1 << 64) - 1
    for i in range(n):
        h = (h * int(_HASH_BASE) + int(sym[i]) + 1) & mask
    for _ in range(n - 1):
        p = (p * int(_HASH_BASE)) & mask
    return np.uint64(h), np.uint64(p)


@dataclass(frozen=True)
class Censored:
    k_max: int


def repetition_time(system: SystemSpec, x: TorusPoint, n: int, partition: Partition,
                    k_max: int) -> int | Censored:
    """Least ``k >= 1`` with ``f^k x`` in the length-``n`` cylinder of ``x``, or ``Censored``.

    Candidate positions are filtered with a rolling hash and confirmed symbol by symbol.
    """
    if n < 1 or k_max < 1:
        raise UsageError("need n >= 1 and k_max >= 1")
    chunks = _SymbolChunks(system, x, partition, n, n - 1)
    prefix = chunks.prefix
    if np.any(prefix == UNDEFINED):
        raise UndefinedCellError(f"the first {n} orbit points leave the partition")
    target, top = _word_hash(prefix, n)
    k = 1
    while k <= k_max:
        chunks.advance(min(_CHUNK, k_max + n - chunks.start - chunks.buffer.size + 1))
        found = _hash_search(chunks.buffer, chunks.start, prefix, n, k, target, top)
        if 0 <= found <= k_max:
            return int(found)
        k = chunks.start + chunks.buffer.size - n + 1
    return Censored(k_max)


@numba.njit(cache=True, nogil=True)
def _prefix_scan(buf, start, prefix, k_from, first):
    # first[n] = least k with itinerary[k:k+n] == prefix[:n]; 0 while unknown.
    # Scans every k >= k_from whose full comparison window lies inside buf.
    n_max = prefix.size
    best = 0
    while best < n_max and first[best + 1] != 0:
        best += 1
    k = k_from
    while k - start + n_max <= buf.size:
        if best >= n_max:
            break
        i = k - start
        l = 0
        while l < n_max and buf[i + l] == prefix[l]:
            l += 1
        while best < l:
            best += 1
            first[best] = k
        k += 1
    return k


def repetition_times(system: SystemSpec, x: TorusPoint, n_values: Sequence[int], partition: Partition,
                     k_max: int) -> dict[int, int | Censored]:
    """Repetition times for several word lengths from a single pass over one itinerary."""
    n_values = sorted(set(int(n) for n in n_values))
    if n_values[0] < 1 or k_max < 1:
        raise UsageError("need n >= 1 and k_max >= 1")
    n_max = n_values[-1]
    chunks = _SymbolChunks(system, x, partition, n_max, n_max)
    bad = np.flatnonzero(chunks.prefix == UNDEFINED)
    usable = n_max if not bad.size else int(bad[0])
    if usable < n_values[0]:
        raise UndefinedCellError(f"orbit point {usable} lies outside the partition")
    prefix = np.ascontiguousarray(chunks.prefix[:usable])
    first = np.zeros(usable + 1, dtype=np.int64)
    k = 1
    while k <= k_max and first[usable] == 0:
        chunks.advance(min(_CHUNK, k_max + usable - chunks.start - chunks.buffer.size))
        k = _prefix_scan(chunks.buffer, chunks.start, prefix, k, first)
    out: dict[int, int | Censored] = {}
    for n in n_values:
        if n > usable:
            raise UndefinedCellError(f"orbit point {usable} lies outside the partition")
        out[n] = int(first[n]) if 0 < first[n] <= k_max else Censored(k_max)
    return out


@dataclass(frozen=True)
class EntropyEstimate:
    n_values: np.ndarray
    table: np.ndarray  # points x n, repetition times (k_max where censored)
    censored: np.ndarray
    median_rate: np.ndarray  # per-n median of log(R_n) / n
    mean_rate: np.ndarray
    median_log_r: np.ndarray
    fit: ScalingFit

    @property
    def slope(self) -> float:
        return self.fit.slope

    @property
    def censored_fraction(self) -> np.ndarray:
        return self.censored.mean(axis=0)


def entropy_estimate(system: SystemSpec, partition: Partition, n_values: Sequence[int],
                     points: Sequence[TorusPoint], k_max: int, max_censored: float = 0.2) -> EntropyEstimate:
    """Median repetition-time growth rate ``(1/n) log R_n`` and the slope of median ``log R_n`` in ``n``."""
    if len(points) < 50:
        raise UsageError("entropy estimation needs at least 50 points")
    n_values = np.array(sorted(set(int(n) for n in n_values)))
    rows = [repetition_times(system, x, n_values, partition, k_max) for x in points]
    return entropy_from_rows(n_values, rows, k_max, max_censored)


def entropy_from_rows(n_values, rows, k_max: int, max_censored: float = 0.2) -> EntropyEstimate:
    n_values = np.asarray(n_values)
    table = np.array([[k_max if isinstance(r[n], Censored) else r[n] for n in n_values] for r in rows],
                     dtype=np.int64)
    censored = np.array([[isinstance(r[n], Censored) for n in n_values] for r in rows])
    frac = censored.mean(axis=0)
    if np.any(frac > max_censored):
        worst = int(n_values[np.argmax(frac > max_censored)])
        usable = n_values[n_values < worst]
        hint = f"largest usable n is {int(usable[-1])}" if usable.size else "no n is usable"
        raise InsufficientDataError(f"censoring above {max_censored:.0%} from n={worst}; {hint}",
                                    profile=dict(zip(n_values.tolist(), frac.tolist())))
    log_r = np.log(table.astype(float))
    med_log = np.median(log_r, axis=0)
    fit = linear_fit(n_values.astype(float), med_log, (0, n_values.size), int(censored.sum()))
    return EntropyEstimate(n_values, table, censored, np.median(log_r / n_values, axis=0),
                           np.mean(log_r / n_values, axis=0), med_log, fit)


def _probe_itineraries(system: SystemSpec, probes: np.ndarray, partition: Partition, n: int,
                       seed: int) -> np.ndarray:
    ens = Ensemble(system, probes, np.random.default_rng(seed))
    out = np.empty((probes.shape[0], n), dtype=np.int64)
    out[:, 0] = partition.cells(ens.points)
    for j in range(1, n):
        out[:, j] = partition.cells(ens.step())
    return out


def inner_radius(system: SystemSpec, partition: Partition, x: TorusPoint, n: int, probes: int = 64,
                 seed: int = 0, rel_tol: float = 0.01) -> float:
    """Largest tested ``rho`` such that ``probes`` points of ``B(x, rho)`` share the n-itinerary of ``x``.

    One-sided: probing can miss a thin sliver of a foreign cell, so the result
    over-estimates the true inner radius.
    """
    if probes < 32:
        raise UsageError("need at least 32 probes")
    rng = np.random.default_rng(seed)
    offsets = rng.uniform(-1.0, 1.0, size=(probes, x.k))
    word = itinerary(system, x, partition, n)

    def inside(rho: float) -> bool:
        shift = np.round(offsets * rho * SCALE).astype(np.int64).astype(U64)
        pts = x.coords[None, :] + shift
        its = _probe_itineraries(system, pts, partition, n, seed)
        return bool(np.all(its == word[None, :]))

    lo, hi = 2.0**-60, 0.5
    if inside(hi):
        return hi
    if not inside(lo):
        raise CapacityError(f"cylinder of length {n} is thinner than the lattice probe scale")
    while hi / lo > 1 + rel_tol:
        mid = math.sqrt(lo * hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return lo


def large_interior_exponent(system: SystemSpec, partition: Partition, x: TorusPoint, n_values: Sequence[int],
                            probes: int = 64, seed: int = 0) -> ScalingFit:
    """Slope of ``log(1/rho_n)`` against ``n``: the exponent ``chi`` of the inner radius of ``xi^n(x)``."""
    n_values = np.array(sorted(set(int(n) for n in n_values)))
    rho = np.array([inner_radius(system, partition, x, int(n), probes, seed) for n in n_values])
    return linear_fit(n_values.astype(float), np.log(1.0 / rho), (0, n_values.size))
