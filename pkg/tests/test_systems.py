import math

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from rlab.errors import UsageError
from rlab.orbits import iterate_orbit
from rlab.systems import (
    CircleRotation, ExpandingCircleMap, ToralAutomorphism, analytic_invariants, cat_map, integer_det,
    inverse_step, inverse_step_many, quartic_automorphism, step, step_many, validate_toral_matrix,
)
from rlab.torus import MASK, SCALE, TorusPoint, random_lattice

SYSTEMS = [cat_map(), quartic_automorphism(), CircleRotation(), ToralAutomorphism([[1, 1], [0, 1]])]


@pytest.mark.parametrize("system", SYSTEMS, ids=["cat", "quartic", "rotation", "shear"])
def test_inverse_roundtrip_bit_exact(system, rng):
    xs = random_lattice(rng, 10_000, system.dimension)
    np.testing.assert_array_equal(inverse_step_many(system, step_many(system, xs)), xs)
    np.testing.assert_array_equal(step_many(system, inverse_step_many(system, xs)), xs)


def test_toral_step_matches_big_integer_arithmetic(rng):
    a = quartic_automorphism()
    for _ in range(200):
        x = TorusPoint.random(rng, 4)
        want = [sum(a.matrix[i][j] * int(x.coords[j]) for j in range(4)) % SCALE for i in range(4)]
        assert [int(v) for v in step(a, x).coords] == want


def test_quartic_inverse_by_cayley_hamilton():
    # C^4 - 2C^3 - 2C + I = 0  =>  C^-1 = -C^3 + 2C^2 + 2I
    c = sympy.Matrix(quartic_automorphism().matrix)
    oracle = -c**3 + 2 * c**2 + 2 * sympy.eye(4)
    assert oracle * c == sympy.eye(4)
    assert quartic_automorphism().inverse_matrix == tuple(tuple(int(v) for v in oracle.row(i)) for i in range(4))


def test_doubling_zero_tail_is_exact_multiplication(rng):
    f = ExpandingCircleMap(2, tail="zero")
    x = TorusPoint.random(rng, 1)
    orbit = iterate_orbit(f, x, 200)
    v = int(x.coords[0])
    for n in range(1, 201):
        assert int(orbit.points[n, 0]) == (v << n) % SCALE
    # base 3: the leading L ternary digits of x, shifted left n places
    big_m = 3**40
    assert 3**41 > SCALE > big_m
    w0 = v * big_m // SCALE
    orbit = iterate_orbit(ExpandingCircleMap(3, tail="zero"), x, 50)
    want = [(w0 * 3**n % big_m) * SCALE // big_m for n in range(1, 51)]
    assert [int(u) for u in orbit.points[1:, 0]] == want


def test_random_tail_keeps_leading_digits(rng):
    # f^n x agrees with the exact lattice image m^n x up to the last n base-m digits
    x = TorusPoint.random(rng, 1)
    v = int(x.coords[0])
    for m in (2, 3, 10):
        orbit = iterate_orbit(ExpandingCircleMap(m, seed=5), x, 60)
        for n in range(1, 61):
            exact = v * m**n % SCALE
            got = int(orbit.points[n, 0])
            assert abs(got - exact) % SCALE < m ** (n + 1) or SCALE - abs(got - exact) < m ** (n + 1)


def test_expanding_map_is_not_invertible():
    with pytest.raises(UsageError):
        inverse_step(ExpandingCircleMap(2), TorusPoint([5]))


def test_rotation_step():
    r = CircleRotation(MASK)
    assert int(step(r, TorusPoint([0])).coords[0]) == MASK
    assert CircleRotation().alpha_real == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)


def test_det_validation():
    with pytest.raises(UsageError):
        ToralAutomorphism([[2, 0], [0, 1]])
    with pytest.raises(UsageError):
        step(cat_map(), TorusPoint([1, 2, 3]))


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3))
def test_bareiss_matches_sympy(rows):
    assert integer_det(rows) == int(sympy.Matrix(rows).det())


def test_validator_cat_and_quartic():
    cat = validate_toral_matrix([[2, 1], [1, 1]])
    assert cat.is_ergodic and cat.is_hyperbolic and cat.char_poly == (1, -3, 1)
    q = validate_toral_matrix(quartic_automorphism().matrix)
    assert q.is_ergodic and not q.is_hyperbolic
    assert q.char_poly == (1, -2, 0, -2, 1)
    assert sum(abs(m - 1) < 1e-9 for m in q.eigenvalue_moduli) == 2


@pytest.mark.parametrize("matrix,order", [([[0, 1], [-1, 0]], 4), ([[0, -1], [1, 1]], 6),
                                          ([[1, 1], [0, 1]], 1), ([[0, 1], [1, 0]], 2)])
def test_validator_detects_roots_of_unity(matrix, order):
    rep = validate_toral_matrix(matrix)
    assert order in rep.cyclotomic_divisors
    assert not rep.is_ergodic


def test_validator_rejects_bad_input():
    with pytest.raises(UsageError):
        validate_toral_matrix([[1, 2, 3], [4, 5, 6]])
    assert not validate_toral_matrix([[2, 0], [0, 1]]).det_ok


def test_analytic_invariants():
    golden = (1 + math.sqrt(5)) / 2
    inv = analytic_invariants(cat_map())
    assert inv.h == pytest.approx(2 * math.log(golden))
    assert inv.lambda_max == pytest.approx(2 * math.log(golden))
    q = analytic_invariants(quartic_automorphism())
    assert q.k == 4 and q.h == pytest.approx(0.8314429455, abs=1e-8)
    assert analytic_invariants(ExpandingCircleMap(3)).h == pytest.approx(math.log(3))
    assert analytic_invariants(CircleRotation()).h == 0.0
