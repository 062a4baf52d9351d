import numpy as np
import pytest
from hypothesis import given, strategies as st

from rlab.errors import CapacityError
from rlab.orbits import Ensemble, OrbitStream, iterate_orbit
from rlab.systems import CircleRotation, ExpandingCircleMap, cat_map, quartic_automorphism, step
from rlab.torus import TorusPoint

ALL = [cat_map(), quartic_automorphism(), CircleRotation(), ExpandingCircleMap(2, seed=3),
       ExpandingCircleMap(3, seed=3), ExpandingCircleMap(16, seed=3)]
IDS = ["cat", "quartic", "rotation", "doubling", "tripling", "m16"]


@pytest.mark.parametrize("system", ALL, ids=IDS)
@given(cuts=st.lists(st.integers(0, 300), max_size=6))
def test_stream_independent_of_chunking(system, cuts):
    x = TorusPoint([0x9E3779B97F4A7C15] * system.dimension)
    whole = OrbitStream(system, x).take(sum(cuts))
    s = OrbitStream(system, x)
    parts = [s.take(c) for c in cuts]
    joined = np.concatenate(parts) if parts else np.empty((0, system.dimension), dtype=np.uint64)
    np.testing.assert_array_equal(joined, whole)


@pytest.mark.parametrize("system", ALL[:3], ids=IDS[:3])
def test_orbit_matches_repeated_step(system, rng):
    x = TorusPoint.random(rng, system.dimension)
    orbit = iterate_orbit(system, x, 100)
    y = x
    for n in range(101):
        assert orbit.point(n) == y
        y = step(system, y)


def test_orbit_is_read_only_and_capped(rng):
    orbit = iterate_orbit(cat_map(), TorusPoint.random(rng, 2), 10)
    assert len(orbit) == 11
    with pytest.raises(ValueError):
        orbit.points[0, 0] = 1
    with pytest.raises(CapacityError):
        iterate_orbit(cat_map(), TorusPoint([1, 2]), 10**6, max_bytes=10**6)


def test_same_seed_same_digits_different_base_different_digits():
    f = ExpandingCircleMap(2, seed=11)
    a = OrbitStream(f, TorusPoint([12345])).take(200)
    b = OrbitStream(f, TorusPoint([12345])).take(200)
    c = OrbitStream(f, TorusPoint([12346])).take(200)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a[100:] >> np.uint64(40), c[100:] >> np.uint64(40))


@pytest.mark.parametrize("m", [2, 3, 5])
def test_ensemble_zero_tail_matches_stream(m, rng):
    f = ExpandingCircleMap(m, tail="zero")
    pts = rng.integers(0, 2**64, size=(20, 1), dtype=np.uint64)
    ens = Ensemble(f, pts)
    for _ in range(30):
        ens.step()
    for i in range(20):
        np.testing.assert_array_equal(ens.points[i], OrbitStream(f, TorusPoint(pts[i])).take(30)[-1])


def test_ensemble_random_tail_is_uniform(rng):
    f = ExpandingCircleMap(2, seed=0)
    ens = Ensemble(f, rng.integers(0, 2**64, size=(40_000, 1), dtype=np.uint64), rng)
    for _ in range(100):
        ens.step()
    u = ens.points[:, 0].astype(float) / 2.0**64
    hist = np.histogram(u, bins=10, range=(0, 1))[0]
    assert np.all(np.abs(hist - 4000) < 5 * np.sqrt(4000))
