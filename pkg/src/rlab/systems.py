"""The map zoo: toral automorphisms, expanding circle maps, circle rotations.

Every system preserves Lebesgue measure.  Single-step maps act exactly on the
64-bit lattice; see :mod:`rlab.orbits` for orbit generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np
import sympy

from .errors import UsageError
from .torus import U64, TorusPoint, fixed_from_real

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
HYPERBOLIC_TOL = 1e-9

CAT_MATRIX = ((2, 1), (1, 1))
# companion matrix of x^4 - 2x^3 - 2x + 1: ergodic but not hyperbolic
QUARTIC_MATRIX = ((0, 0, 0, -1), (1, 0, 0, 2), (0, 1, 0, 0), (0, 0, 1, 2))


def integer_det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss elimination)."""
    a = [[int(v) for v in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise UsageError("matrix must be square")
    sign, prev = 1, 1
    for i in range(n - 1):
        if a[i][i] == 0:
            swap = next((j for j in range(i + 1, n) if a[j][i] != 0), None)
            if swap is None:
                return 0
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for j in range(i + 1, n):
            for c in range(i + 1, n):
                a[j][c] = (a[j][c] * a[i][i] - a[j][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class ToralAutomorphism:
    """``x -> A x mod Z^k`` for an integer matrix with ``|det A| = 1``."""

    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        mat = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", mat)
        if abs(integer_det(mat)) != 1:
            raise UsageError(f"|det A| must be 1 for a toral automorphism, got {integer_det(mat)}")

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    @cached_property
    def words(self) -> np.ndarray:
        """The matrix as wrapping uint64 entries (negative entries in two's complement)."""
        return np.array(self.matrix, dtype=np.int64).astype(U64)

    @cached_property
    def inverse_matrix(self) -> tuple[tuple[int, ...], ...]:
        inv = sympy.Matrix(self.matrix).inv()
        return tuple(tuple(int(v) for v in inv.row(i)) for i in range(self.dimension))

    @cached_property
    def inverse_words(self) -> np.ndarray:
        return np.array(self.inverse_matrix, dtype=object).astype(np.int64).astype(U64)


@dataclass(frozen=True)
class ExpandingCircleMap:
    """``x -> m x mod 1`` on the circle.

    ``tail`` controls the digits that lie below the 64-bit window during orbit
    generation: ``"random"`` draws them i.i.d. from a stream seeded by ``seed``
    and the base point (the orbit of a Lebesgue-typical point), ``"zero"``
    keeps the exact lattice map, whose orbits collapse onto 0 after a few dozen
    steps when ``m`` is even.
    """

    m: int = 2
    seed: int = 0
    tail: str = "random"

    def __post_init__(self):
        if int(self.m) < 2:
            raise UsageError(f"expanding map needs m >= 2, got {self.m}")
        if self.tail not in ("random", "zero"):
            raise UsageError(f"tail must be 'random' or 'zero', got {self.tail!r}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def dimension(self) -> int:
        return 1


@dataclass(frozen=True)
class CircleRotation:
    """``x -> x + alpha mod 1`` with ``alpha`` a 64-bit fraction (stored as an integer)."""

    alpha: int = field(default_factory=lambda: fixed_from_real(GOLDEN))

    def __post_init__(self):
        object.__setattr__(self, "alpha", int(self.alpha) & ((1 << 64) - 1))
        if self.alpha == 0:
            raise UsageError("rotation angle must be nonzero")

    @classmethod
    def from_real(cls, alpha: float) -> "CircleRotation":
        return cls(fixed_from_real(alpha))

    @property
    def alpha_real(self) -> float:
        return self.alpha / 2.0**64

    @property
    def dimension(self) -> int:
        return 1


SystemSpec = Union[ToralAutomorphism, ExpandingCircleMap, CircleRotation]


def cat_map() -> ToralAutomorphism:
    return ToralAutomorphism(CAT_MATRIX)


def quartic_automorphism() -> ToralAutomorphism:
    return ToralAutomorphism(QUARTIC_MATRIX)


def _check_point(system: SystemSpec, x: TorusPoint) -> None:
    if x.k != system.dimension:
        raise UsageError(f"point has dimension {x.k}, system has {system.dimension}")


def step_many(system: SystemSpec, xs: np.ndarray) -> np.ndarray:
    """Apply one exact lattice step to an ``(n, k)`` array of points."""
    xs = np.asarray(xs, dtype=U64)
    if isinstance(system, ToralAutomorphism):
        return xs @ system.words.T
    if isinstance(system, CircleRotation):
        return xs + U64(system.alpha)
    if isinstance(system, ExpandingCircleMap):
        return xs * U64(system.m)
    raise UsageError(f"unknown system {system!r}")


def step(system: SystemSpec, x: TorusPoint) -> TorusPoint:
    """One exact step of the map on the 64-bit lattice.

    For expanding maps this is ``m u mod 2**64``, i.e. the unseen low digits
    are taken to be zero; orbits with random tails are produced by
    :func:`rlab.orbits.iterate_orbit`.
    """
    _check_point(system, x)
    return TorusPoint(step_many(system, x.coords[None, :])[0])


def inverse_step_many(system: SystemSpec, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=U64)
    if isinstance(system, ToralAutomorphism):
        return xs @ system.inverse_words.T
    if isinstance(system, CircleRotation):
        return xs - U64(system.alpha)
    raise UsageError(f"{type(system).__name__} is not invertible")


def inverse_step(system: SystemSpec, x: TorusPoint) -> TorusPoint:
    _check_point(system, x)
    return TorusPoint(inverse_step_many(system, x.coords[None, :])[0])


@dataclass(frozen=True)
class Invariants:
    k: int
    h: float
    lambda_max: float
    measure: str = "lebesgue"


def analytic_invariants(system: SystemSpec) -> Invariants:
    """Dimension, metric entropy and top Lyapunov exponent (all in nats)."""
    if isinstance(system, ToralAutomorphism):
        moduli = np.abs(np.linalg.eigvals(np.array(system.matrix, dtype=float)))
        logs = np.log(moduli)
        h = float(logs[moduli > 1 + HYPERBOLIC_TOL].sum())
        return Invariants(system.dimension, h, max(float(logs.max()), 0.0))
    if isinstance(system, ExpandingCircleMap):
        lm = math.log(system.m)
        return Invariants(1, lm, lm)
    if isinstance(system, CircleRotation):
        return Invariants(1, 0.0, 0.0)
    raise UsageError(f"unknown system {system!r}")


@dataclass(frozen=True)
class ErgodicityReport:
    det: int
    det_ok: bool
    char_poly: tuple[int, ...]
    irreducible_factors: tuple[tuple[tuple[int, ...], int], ...]
    cyclotomic_divisors: tuple[int, ...]
    eigenvalue_moduli: tuple[float, ...]
    has_unit_root_eigenvalue: bool
    is_ergodic: bool
    is_hyperbolic: bool


def _cyclotomic_orders(k: int) -> list[int]:
    # phi(d) >= sqrt(d/2), so every d with phi(d) <= k satisfies d <= 2 k^2
    return [d for d in range(1, 2 * k * k + 3) if sympy.totient(d) <= k]


def validate_toral_matrix(matrix: Sequence[Sequence[int]], tol: float = HYPERBOLIC_TOL) -> ErgodicityReport:
    """Exact ergodicity and numeric hyperbolicity check for an integer matrix.

    Root-of-unity eigenvalues are detected by exact division of the
    characteristic polynomial by the cyclotomic polynomials of every order
    ``d`` with ``phi(d) <= k``.
    """
    rows = [list(r) for r in matrix]
    k = len(rows)
    if k == 0 or any(len(r) != k for r in rows):
        raise UsageError("matrix must be square and nonempty")
    if any(int(v) != v for r in rows for v in r):
        raise UsageError("matrix entries must be integers")
    det = integer_det(rows)
    t = sympy.Symbol("t")
    cp = sympy.Matrix(rows).charpoly(t)
    coeffs = tuple(int(c) for c in cp.all_coeffs())
    divisors = tuple(
        d for d in _cyclotomic_orders(k)
        if sympy.rem(cp.as_expr(), sympy.cyclotomic_poly(d, t), t) == 0
    )
    _, factors = sympy.factor_list(cp.as_expr(), t)
    irreducible = tuple(
        (tuple(int(c) for c in sympy.Poly(f, t).all_coeffs()), int(mult)) for f, mult in factors
    )
    moduli = tuple(float(v) for v in np.sort(np.abs(np.roots(np.array(coeffs, dtype=float)))))
    unit_root = bool(divisors)
    return ErgodicityReport(
        det=det,
        det_ok=abs(det) == 1,
        char_poly=coeffs,
        irreducible_factors=irreducible,
        cyclotomic_divisors=divisors,
        eigenvalue_moduli=moduli,
        has_unit_root_eigenvalue=unit_root,
        is_ergodic=abs(det) == 1 and not unit_root,
        is_hyperbolic=all(abs(mod - 1.0) > tol for mod in moduli),
    )
