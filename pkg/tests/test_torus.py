import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rlab.torus import (
    MASK, SCALE, U64, TorusPoint, above_threshold, below_threshold, circle_gap, distance_units,
    fixed_from_real, torus_distance, units_to_point,
)

u64s = st.integers(min_value=0, max_value=MASK)


def translate_oracle(x: TorusPoint, y: TorusPoint) -> Fraction:
    """min over integer translates z of the max-norm |x - y - z|, exactly."""
    xs, ys = x.to_fractions(), y.to_fractions()
    best = None
    for shift in itertools.product((-1, 0, 1), repeat=x.k):
        d = max(abs(a - b - s) for a, b, s in zip(xs, ys, shift))
        best = d if best is None or d < best else best
    return best


def test_distance_matches_translate_enumeration(rng):
    for k in (1, 2, 4):
        for _ in range(10_000 // 3 + 1):
            x, y = TorusPoint.random(rng, k), TorusPoint.random(rng, k)
            exact = translate_oracle(x, y)
            units = int(distance_units(x.coords, y.coords))
            assert Fraction(units, SCALE) == exact


def test_distance_near_wraparound():
    x = TorusPoint([1])
    y = TorusPoint([MASK])
    assert int(distance_units(x.coords, y.coords)) == 2
    assert torus_distance(TorusPoint.from_real(0.01), TorusPoint.from_real(0.99)) == pytest.approx(0.02)
    assert int(circle_gap(U64(0), U64(1 << 63))) == 1 << 63


def test_units_to_point_matches_numpy(rng):
    block = rng.integers(0, 2**63, size=(500, 3), dtype=np.uint64) * U64(2) + U64(1)
    base = block[7]
    np.testing.assert_array_equal(units_to_point(block, base), distance_units(block, base))


@given(u64s, u64s, u64s)
def test_triangle_inequality(a, b, c):
    pa, pb, pc = (np.array([v], dtype=np.uint64) for v in (a, b, c))
    ab, bc, ac = (int(distance_units(p, q)) for p, q in ((pa, pb), (pb, pc), (pa, pc)))
    assert ac <= ab + bc
    assert ab == int(distance_units(pb, pa))
    assert ab <= SCALE // 2


@given(st.lists(u64s, min_size=2, max_size=2), st.lists(u64s, min_size=2, max_size=2),
       st.lists(u64s, min_size=2, max_size=2))
def test_distance_translation_invariant(x, y, t):
    x, y, t = TorusPoint(x), TorusPoint(y), TorusPoint(t)
    assert torus_distance(x.translate(t), y.translate(t)) == torus_distance(x, y)


@given(st.floats(min_value=1e-15, max_value=0.5))
def test_thresholds_are_exact(r):
    lo, hi = below_threshold(r), above_threshold(r)
    exact = Fraction(r) * SCALE
    # d < r  <=>  units < below_threshold(r)
    assert Fraction(lo - 1) < exact <= Fraction(lo) or lo == MASK
    assert Fraction(hi) <= exact < Fraction(hi + 1)


def test_point_roundtrip_and_hash():
    p = TorusPoint.from_real([0.25, 0.5])
    assert p.to_fractions() == [Fraction(1, 4), Fraction(1, 2)]
    assert p == TorusPoint([1 << 62, 1 << 63])
    assert hash(p) == hash(TorusPoint([1 << 62, 1 << 63]))
    assert fixed_from_real(1.25) == 1 << 62
    with pytest.raises(ValueError):
        p.coords[0] = 3
