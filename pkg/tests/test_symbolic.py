import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rlab.dimension import AnalyticLebesgue, AtomicMeasure
from rlab.errors import CapacityError, InsufficientDataError, UndefinedCellError, UsageError
from rlab.orbits import iterate_orbit
from rlab.symbolic import (
    UNDEFINED, Censored, GridPartition, SeparatedBalls, annulus_bound_holds, build_partition, cell_of,
    entropy_estimate, entropy_from_rows, inner_radius, itinerary, large_interior_exponent,
    maximal_separated_set, quadrisection, repetition_time, repetition_times, select_thin_radius,
)
from rlab.systems import CircleRotation, ExpandingCircleMap, cat_map
from rlab.torus import SCALE, TorusPoint, random_lattice, torus_distance


def naive_repetition(word_source, n, k_max):
    sym = word_source
    for k in range(1, k_max + 1):
        if np.array_equal(sym[k:k + n], sym[:n]):
            return k
    return None


# ---- partitions

def test_grid_cells():
    g = GridPartition(1, 1)
    assert cell_of(g, TorusPoint.from_real(0.3)) == 0
    assert cell_of(g, TorusPoint.from_real(0.7)) == 1
    g3 = GridPartition(3, 2)
    assert g3.n_cells == 64
    x = TorusPoint.from_real([0.4, 0.9])
    assert cell_of(g3, x) == 3 | (7 << 3)


@given(st.integers(1, 8), st.lists(st.integers(0, 2**64 - 1), min_size=2, max_size=2))
def test_grid_cells_match_floor(g, coords):
    part = GridPartition(g, 2)
    x = TorusPoint(coords)
    want = sum(((c * 2**g) // SCALE) << (g * i) for i, c in enumerate(coords))
    assert cell_of(part, x) == want


def test_first_ball_rule_and_undefined():
    centers = TorusPoint.from_real([0.5]).coords[None, :].repeat(2, axis=0)
    centers[1] = TorusPoint.from_real([0.55]).coords
    part = SeparatedBalls(centers, [0.1, 0.1], 0.05)
    assert cell_of(part, TorusPoint.from_real(0.52)) == 0
    assert cell_of(part, TorusPoint.from_real(0.62)) == 1
    assert cell_of(part, TorusPoint.from_real(0.9)) == UNDEFINED


def test_maximal_separated_set_examples():
    grid = (np.arange(4000, dtype=np.uint64) * np.uint64(SCALE // 4000))[:, None]
    assert maximal_separated_set(grid, 0.3).shape[0] == 3
    assert maximal_separated_set(grid, 0.3, seed=5).shape[0] == 3
    twins = np.array([[123], [123]], dtype=np.uint64)
    assert maximal_separated_set(twins, 0.2).shape[0] == 1
    with pytest.raises(UsageError):
        maximal_separated_set(grid[:10], 0.1)
    with pytest.raises(UsageError):
        maximal_separated_set(grid, 0.5)


@pytest.mark.parametrize("k,s", [(1, 0.05), (2, 0.2)])
def test_maximal_separated_set_by_double_loop(k, s, rng):
    samples = random_lattice(rng, int((4 / s) ** k) + 50, k)
    centers = maximal_separated_set(samples, s, seed=1)
    pts = [TorusPoint(c) for c in centers]
    for i in range(len(pts)):
        for j in range(i):
            assert torus_distance(pts[i], pts[j]) >= s
    for p in samples:
        assert any(torus_distance(TorusPoint(p), c) < s for c in pts)


def test_build_partition_properties(rng):
    samples = random_lattice(rng, 400, 2)
    part, diag = build_partition(samples, 0.2, AnalyticLebesgue(2), seed=0, boundary_samples=50_000)
    assert np.all((part.radii > 0.2) & (part.radii < 0.4))
    cells = part.cells(samples)
    assert np.all(cells != UNDEFINED) and diag.coverage == 1.0
    # each sample lies in the first ball containing it, so cells are disjoint by construction
    for p, c in zip(samples[:100], cells[:100]):
        d = [torus_distance(TorusPoint(p), TorusPoint(x)) for x in part.centers]
        assert c == next(i for i, (di, ri) in enumerate(zip(d, part.radii)) if di < ri)
        assert d[c] < 2 * 0.2
    assert abs(diag.boundary_a - 1) < 0.25


def test_build_partition_on_circle():
    samples = (np.arange(4000, dtype=np.uint64) * np.uint64(SCALE // 4000))[:, None]
    part, diag = build_partition(samples, 0.3, AnalyticLebesgue(1), seed=None, boundary_samples=10_000)
    assert part.n_cells == 3 and diag.coverage == 1.0


def test_undefined_fraction_small():
    rng = np.random.default_rng(0)
    s = 0.1
    part, _ = build_partition(random_lattice(rng, int((4 / s) ** 2), 2), s, AnalyticLebesgue(2), seed=0,
                              boundary_samples=1000)
    probes = random_lattice(rng, 1_000_000, 2)
    assert np.mean(part.cells(probes) == UNDEFINED) <= 0.01


# ---- quadrisection

def test_quadrisection_examples():
    x = TorusPoint.from_real([0.0])
    s = 0.1
    assert select_thin_radius(x, s, AnalyticLebesgue(1), depth=1) == pytest.approx(0.15, abs=0.025)
    for depth in range(1, 9):
        rho = select_thin_radius(x, s, AnalyticLebesgue(1), depth)
        assert s < rho < 2 * s
        for n in range(1, depth):
            assert annulus_bound_holds(x, s, rho, AnalyticLebesgue(1), n)
    # an atom of mass 1/2 at distance 1.5 s must be avoided
    atom = TorusPoint.from_real([0.15]).coords[None, :]
    mu = AtomicMeasure(atom, [0.5], lebesgue_weight=0.5)
    q = quadrisection(x, s, mu, 8)
    assert abs(q.rho - 0.15) > 1e-6
    assert q.masses[1] < 0.5  # the level-1 quarter holding the atom was rejected


@given(st.integers(0, 2**32), st.integers(1, 30), st.floats(0.02, 0.2))
def test_quadrisection_halving_and_bound(seed, n_atoms, s):
    rng = np.random.default_rng(seed)
    mu = AtomicMeasure(random_lattice(rng, n_atoms, 1), rng.random(n_atoms), lebesgue_weight=rng.random())
    x = TorusPoint.random(rng, 1)
    q = quadrisection(x, s, mu, 8)
    for a, b in zip(q.masses, q.masses[1:]):
        assert b <= a / 2 + 1e-15
    for n in range(1, 8):
        assert annulus_bound_holds(x, s, q.rho, mu, n)


# ---- repetition times

def test_repetition_examples():
    half = CircleRotation(1 << 63)
    g1 = GridPartition(1, 1)
    for n in (1, 5, 40):
        assert repetition_time(half, TorusPoint.from_real(0.25), n, g1, 100) == 2
    assert repetition_time(cat_map(), TorusPoint([0, 0]), 10, GridPartition(3, 2), 10) == 1
    assert isinstance(repetition_time(cat_map(), TorusPoint.from_real([0.1, 0.2]), 12, GridPartition(3, 2), 5),
                      Censored)


def test_repetition_time_matches_naive_word_match(rng):
    part = GridPartition(3, 2)
    n, k_max = 4, 20_000
    for _ in range(40):
        x = TorusPoint.random(rng, 2)
        sym = itinerary(cat_map(), x, part, n + k_max)
        want = naive_repetition(sym, n, k_max)
        got = repetition_time(cat_map(), x, n, part, k_max)
        assert (got == want) if want is not None else isinstance(got, Censored)


def test_repetition_times_multi_n_matches_single(rng):
    part = GridPartition(1, 1)
    f = ExpandingCircleMap(2, seed=4)
    for _ in range(10):
        x = TorusPoint.random(rng, 1)
        multi = repetition_times(f, x, range(1, 14), part, 1 << 20)
        for n, v in multi.items():
            assert repetition_time(f, x, n, part, 1 << 20) == v
        vals = [multi[n] for n in range(1, 14)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_undefined_cell_in_base_word():
    part = SeparatedBalls(TorusPoint.from_real([0.5]).coords[None, :], [0.1], 0.05)
    with pytest.raises(UndefinedCellError):
        repetition_time(CircleRotation(), TorusPoint.from_real(0.0), 3, part, 10)


# ---- entropy

def test_entropy_doubling_small():
    rng = np.random.default_rng(0)
    pts = [TorusPoint.random(rng, 1) for _ in range(60)]
    est = entropy_estimate(ExpandingCircleMap(2, seed=0), GridPartition(1, 1), range(6, 14), pts, 10**6)
    assert abs(est.slope - math.log(2)) < 0.15
    assert np.all(np.diff(est.table, axis=1) >= 0)
    with pytest.raises(UsageError):
        entropy_estimate(ExpandingCircleMap(2), GridPartition(1, 1), [3], pts[:10], 100)


def test_entropy_censoring_names_usable_n():
    rows = [{5: 10, 6: 40, 7: Censored(50)} for _ in range(60)]
    with pytest.raises(InsufficientDataError, match="largest usable n is 6"):
        entropy_from_rows([5, 6, 7], rows, 50)


# ---- large interior

def test_inner_radius_doubling_and_rotation():
    x = TorusPoint.from_real(0.3141592653589793)
    f = ExpandingCircleMap(2, seed=0)
    chi = large_interior_exponent(f, GridPartition(1, 1), x, range(4, 44, 4))
    assert abs(chi.slope - math.log(2)) < 0.2 * math.log(2)
    # inner radii shrink like 1/n, so the slope in n vanishes only over long ranges
    rot = large_interior_exponent(CircleRotation(), GridPartition(2, 1), x, range(16, 257, 16))
    assert abs(rot.slope) < 0.05
    with pytest.raises(UsageError):
        inner_radius(f, GridPartition(1, 1), x, 4, probes=8)


def test_cat_interior_exponent_below_lyapunov_bound():
    x = TorusPoint.from_real([0.2718281828, 0.1414213562])
    chi = large_interior_exponent(cat_map(), GridPartition(3, 2), x, range(2, 12, 2))
    assert chi.slope <= 0.9624 + 0.3


def test_repetition_rate_over_interior_exponent_cat():
    # finite-n chain: log R_n / (n chi_hat) stays bounded away from zero for most points
    rng = np.random.default_rng(7)
    part = GridPartition(3, 2)
    ratios = []
    for _ in range(30):
        x = TorusPoint.random(rng, 2)
        chi = large_interior_exponent(cat_map(), part, x, range(2, 12, 2)).slope
        r = repetition_time(cat_map(), x, 8, part, 10**7)
        if isinstance(r, Censored):
            r = r.k_max
        ratios.append(math.log(r) / (8 * chi))
    assert np.mean(np.array(ratios) >= 0.3) >= 0.8
