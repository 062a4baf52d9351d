"""Exact orbit generation.

Toral automorphisms and rotations are iterated bit-exactly on the 64-bit
lattice.  Expanding maps ``x -> m x`` are realised as a sliding window over a
base-``m`` digit stream: the leading digits form the current point and each
step shifts one digit out and one fresh digit in.  With ``tail="random"`` the
fresh digits come from a PCG64 stream keyed by the system seed and the base
point, which reproduces the joint law of the orbit of a Lebesgue-random point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numba
import numpy as np

from .errors import CapacityError, UsageError
from .systems import CircleRotation, ExpandingCircleMap, SystemSpec, ToralAutomorphism
from .torus import SCALE, U64, TorusPoint

MAX_ORBIT_BYTES = 1 << 31
_ONE = np.uint64(1)
_SIXTY_THREE = np.uint64(63)


@numba.njit(cache=True, nogil=True)
def _toral_run(A, x, out):
    k = x.size
    cur = x.copy()
    nxt = np.empty_like(cur)
    for t in range(out.shape[0]):
        for i in range(k):
            s = np.uint64(0)
            for j in range(k):
                s += A[i, j] * cur[j]
            nxt[i] = s
        for i in range(k):
            cur[i] = nxt[i]
            out[t, i] = nxt[i]
    return cur


@numba.njit(cache=True, nogil=True)
def _shift_run(w, shift, digits, out):
    for t in range(digits.size):
        w = (w << shift) | digits[t]
        out[t, 0] = w
    return w


@numba.njit(cache=True, nogil=True)
def _scaled_quotient(w, modulus):
    # floor(w * 2**64 / modulus) for w < modulus < 2**64, by restoring division
    q = np.uint64(0)
    rem = w
    for _ in range(64):
        top = rem >> _SIXTY_THREE
        rem = rem << _ONE
        q = q << _ONE
        if top != 0 or rem >= modulus:
            rem = rem - modulus
            q = q | _ONE
    return q


@numba.njit(cache=True, nogil=True)
def _window_run(w, m, lead, modulus, digits, out):
    for t in range(digits.size):
        w = (w % lead) * m + digits[t]
        out[t, 0] = _scaled_quotient(w, modulus)
    return w


@numba.njit(cache=True, nogil=True)
def _window_points(ws, modulus, out):
    for i in range(ws.size):
        out[i] = _scaled_quotient(ws[i], modulus)


def _digit_layout(m: int) -> tuple[int, int, int]:
    """Return ``(shift, L, m**L)``; ``shift > 0`` selects the pure bit-shift path."""
    bits = m.bit_length() - 1
    if m == 1 << bits and 64 % bits == 0:
        return bits, 64 // bits, 0
    length = 1
    while m ** (length + 1) < SCALE:
        length += 1
    return 0, length, m**length


def digit_stream(system: ExpandingCircleMap, base: TorusPoint) -> np.random.Generator:
    ss = np.random.SeedSequence(system.seed, spawn_key=tuple(int(c) for c in base.coords))
    return np.random.Generator(np.random.PCG64(ss))


class OrbitStream:
    """Sequential producer of ``f x, f^2 x, ...`` in blocks.

    The produced sequence does not depend on how it is split into blocks.
    """

    def __init__(self, system: SystemSpec, base: TorusPoint):
        if base.k != system.dimension:
            raise UsageError(f"point has dimension {base.k}, system has {system.dimension}")
        self.system = system
        self.base = base
        self.produced = 0
        self._state = base.coords.copy()
        if isinstance(system, ExpandingCircleMap):
            self._shift, self._length, self._modulus = _digit_layout(system.m)
            if self._shift == 0:
                self._state = np.array(
                    [int(base.coords[0]) * self._modulus >> 64], dtype=U64
                )
            self._rng = digit_stream(system, base) if system.tail == "random" else None

    def _digits(self, n: int) -> np.ndarray:
        if self._rng is None:
            return np.zeros(n, dtype=U64)
        return self._rng.integers(0, self.system.m, size=n, dtype=U64)

    def take(self, n: int) -> np.ndarray:
        """Next ``n`` orbit points as a ``(n, k)`` uint64 array."""
        system = self.system
        out = np.empty((n, system.dimension), dtype=U64)
        if n == 0:
            return out
        if isinstance(system, ToralAutomorphism):
            self._state = _toral_run(system.words, self._state, out)
        elif isinstance(system, CircleRotation):
            idx = np.arange(self.produced + 1, self.produced + n + 1, dtype=U64)
            out[:, 0] = self.base.coords[0] + idx * U64(system.alpha)
        elif isinstance(system, ExpandingCircleMap):
            digits = self._digits(n)
            if self._shift:
                w = _shift_run(self._state[0], U64(self._shift), digits, out)
            else:
                w = _window_run(
                    self._state[0], U64(system.m), U64(self._modulus // system.m),
                    U64(self._modulus), digits, out,
                )
            self._state = np.array([w], dtype=U64)
        else:
            raise UsageError(f"unknown system {system!r}")
        self.produced += n
        return out

    def blocks(self, first: int = 256, largest: int = 1 << 16) -> Iterator[np.ndarray]:
        """Endless blocks of geometrically growing size."""
        size = first
        while True:
            yield self.take(size)
            size = min(2 * size, largest)


@dataclass(frozen=True)
class Orbit:
    base: TorusPoint
    points: np.ndarray
    system: SystemSpec

    def __len__(self) -> int:
        return self.points.shape[0]

    def point(self, n: int) -> TorusPoint:
        return TorusPoint(self.points[n])


def iterate_orbit(system: SystemSpec, x0: TorusPoint, n: int, max_bytes: int = MAX_ORBIT_BYTES) -> Orbit:
    """Orbit ``x0, f x0, ..., f^n x0`` as an ``(n + 1, k)`` array."""
    if n < 0:
        raise UsageError("orbit length must be nonnegative")
    if (n + 1) * system.dimension * 8 > max_bytes:
        raise CapacityError(f"orbit of length {n} exceeds the {max_bytes}-byte cap")
    stream = OrbitStream(system, x0)
    pts = np.empty((n + 1, system.dimension), dtype=U64)
    pts[0] = x0.coords
    pts[1:] = stream.take(n)
    pts.setflags(write=False)
    return Orbit(x0, pts, system)


class Ensemble:
    """Many independent points advanced together (space-average estimators).

    Expanding-map members carry their own random tails drawn from ``rng``.
    """

    def __init__(self, system: SystemSpec, points: np.ndarray, rng: np.random.Generator | None = None):
        self.system = system
        pts = np.array(points, dtype=U64).reshape(-1, system.dimension)
        self.points = pts
        if isinstance(system, ExpandingCircleMap):
            self._rng = rng if rng is not None else np.random.default_rng(system.seed)
            self._shift, _, self._modulus = _digit_layout(system.m)
            if not self._shift:
                mod = self._modulus
                self._windows = np.array([int(u) * mod >> 64 for u in pts[:, 0]], dtype=U64)

    def step(self) -> np.ndarray:
        system = self.system
        if isinstance(system, ExpandingCircleMap):
            n = self.points.shape[0]
            if system.tail == "random":
                digits = self._rng.integers(0, system.m, size=n, dtype=U64)
            else:
                digits = np.zeros(n, dtype=U64)
            if self._shift:
                self.points = ((self.points[:, 0] << U64(self._shift)) | digits)[:, None]
            else:
                lead = U64(self._modulus // system.m)
                self._windows = (self._windows % lead) * U64(system.m) + digits
                out = np.empty(n, dtype=U64)
                _window_points(self._windows, U64(self._modulus), out)
                self.points = out[:, None]
        elif isinstance(system, ToralAutomorphism):
            self.points = self.points @ system.words.T
        elif isinstance(system, CircleRotation):
            self.points = self.points + U64(system.alpha)
        else:
            raise UsageError(f"unknown system {system!r}")
        return self.points
