"""Points of the k-torus stored as 64-bit fixed-point fractions.

Coordinate ``u`` represents the real number ``u / 2**64`` in [0, 1).  All
arithmetic on coordinates is wrapping ``uint64`` arithmetic, which is exactly
arithmetic modulo 1 on the lattice ``2**-64 Z^k / Z^k``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numba
import numpy as np

from .errors import UsageError

SCALE = 1 << 64
MASK = SCALE - 1
U64 = np.uint64


class TorusPoint:
    """Immutable point of the k-torus with exact fixed-point coordinates."""

    __slots__ = ("_coords",)

    def __init__(self, coords: Iterable[int] | np.ndarray):
        if isinstance(coords, np.ndarray) and coords.dtype == U64:
            arr = coords.reshape(-1).copy()
        else:
            arr = np.array([int(c) & MASK for c in coords], dtype=U64)
        if arr.size < 1:
            raise UsageError("a torus point needs at least one coordinate")
        arr.setflags(write=False)
        self._coords = arr

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def k(self) -> int:
        return int(self._coords.size)

    @classmethod
    def from_real(cls, values: float | Sequence[float]) -> "TorusPoint":
        """Round real coordinates to the nearest lattice point (wrapping mod 1)."""
        vals = np.atleast_1d(np.asarray(values, dtype=float))
        return cls([fixed_from_real(v) for v in vals])

    @classmethod
    def random(cls, rng: np.random.Generator, k: int) -> "TorusPoint":
        return cls(random_lattice(rng, 1, k)[0])

    def to_real(self) -> np.ndarray:
        return self._coords.astype(float) / float(SCALE)

    def to_fractions(self) -> list[Fraction]:
        return [Fraction(int(c), SCALE) for c in self._coords]

    def translate(self, t: "TorusPoint") -> "TorusPoint":
        _check_dims(self, t)
        return TorusPoint(self._coords + t._coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TorusPoint):
            return NotImplemented
        return self.k == other.k and bool(np.all(self._coords == other._coords))

    def __hash__(self) -> int:
        return hash(tuple(int(c) for c in self._coords))

    def __repr__(self) -> str:
        vals = ", ".join(f"{v:.6f}" for v in self.to_real())
        return f"TorusPoint({vals})"


def fixed_from_real(v: float) -> int:
    """Nearest 64-bit fraction to ``v mod 1``, computed exactly."""
    return int(round(Fraction(float(v)) * SCALE)) & MASK


def random_lattice(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """``n`` points drawn uniformly from the 64-bit lattice, shape ``(n, k)``."""
    return rng.integers(0, SCALE, size=(n, k), dtype=U64, endpoint=False)


def _check_dims(x: TorusPoint, y: TorusPoint) -> None:
    if x.k != y.k:
        raise UsageError(f"dimension mismatch: {x.k} vs {y.k}")


def circle_gap(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Per-coordinate wraparound distance in lattice units (at most 2**63)."""
    d = np.subtract(u, v, dtype=U64)
    return np.minimum(d, np.negative(d))


def distance_units(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Max-metric torus distance in lattice units; broadcasts over leading axes."""
    return circle_gap(u, v).max(axis=-1)


@numba.njit(cache=True, nogil=True)
def _units_to(block, base, out):
    n, k = block.shape
    for t in range(n):
        best = np.uint64(0)
        for c in range(k):
            d = block[t, c] - base[c]
            nd = -d
            if nd < d:
                d = nd
            if d > best:
                best = d
        out[t] = best


def units_to_point(block: np.ndarray, base: np.ndarray) -> np.ndarray:
    """Distances (lattice units) from every row of ``block`` to ``base``."""
    out = np.empty(block.shape[0], dtype=U64)
    _units_to(np.ascontiguousarray(block), np.ascontiguousarray(base), out)
    return out


def torus_distance(x: TorusPoint, y: TorusPoint) -> float:
    """Max-metric distance on the torus, in [0, 1/2]."""
    _check_dims(x, y)
    return int(distance_units(x.coords, y.coords)) / SCALE


def below_threshold(r: float) -> int:
    """Integer ``T`` such that ``d < r`` iff ``units < T`` for lattice distances."""
    if not r > 0:
        raise UsageError(f"radius must be positive, got {r}")
    q = Fraction(float(r)) * SCALE
    t = -(-q.numerator // q.denominator)
    return min(t, SCALE - 1)


def above_threshold(r: float) -> int:
    """Integer ``L`` such that ``d > r`` iff ``units > L``."""
    if r <= 0:
        return -1
    q = Fraction(float(r)) * SCALE
    return q.numerator // q.denominator
