import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rlab.errors import UsageError
from rlab.mixing import (
    BumpAtPoint, Coordinate, CorrelationSeries, FourierMode, covariance_estimate, decay_classify,
    decay_profile, hit_fraction, lipschitz_bump,
)
from rlab.systems import CircleRotation, ExpandingCircleMap, cat_map
from rlab.torus import TorusPoint, random_lattice

N = 50_000
COS1 = FourierMode((1,))


def test_bump_examples():
    assert lipschitz_bump(0.1, 0.0) == 1.0
    assert lipschitz_bump(0.1, 0.2) == 0.0
    assert lipschitz_bump(0.1, 0.15) == pytest.approx(0.5)
    with pytest.raises(UsageError):
        lipschitz_bump(0.0, 0.1)


@given(st.floats(1e-3, 1), st.floats(0, 3), st.floats(0, 3))
def test_bump_sandwich_and_lipschitz(r, s, t):
    a, b = float(lipschitz_bump(r, s)), float(lipschitz_bump(r, t))
    assert abs(a - b) <= abs(s - t) / r * (1 + 1e-9) + 1e-12
    assert (s <= r) <= a <= (s < 2 * r)


def test_fourier_mode_exact_phase(rng):
    xs = random_lattice(rng, 1000, 2)
    f = FourierMode((3, -2), "sin", 0.5)
    want = 0.5 * np.sin(2 * np.pi * ((3 * xs[:, 0].astype(object) - 2 * xs[:, 1].astype(object)) % 2**64)
                        .astype(float) / 2**64)
    np.testing.assert_allclose(f(xs), want, atol=1e-12)
    assert f.lipschitz_constant == pytest.approx(2 * math.pi * 5 * 0.5)
    with pytest.raises(UsageError):
        FourierMode((1,), amplitude=2.0)


def test_observables_bounded(rng):
    xs = random_lattice(rng, 5000, 2)
    for phi in (FourierMode((1, 1)), BumpAtPoint(TorusPoint([0, 0]), 0.2), Coordinate(1)):
        v = phi(xs)
        assert np.all((v >= -1) & (v <= 1))
    assert BumpAtPoint(TorusPoint([0]), 0.25).lipschitz_constant == 4.0
    assert Coordinate(0).lipschitz_constant == math.inf


def test_variance_at_lag_zero():
    phi = FourierMode((1, 0))
    c, e = covariance_estimate(cat_map(), phi, phi, 0, N, seed=1)
    assert abs(c - 0.5) <= 3 * e + 1e-3


def test_doubling_modes_are_orthogonal():
    for n in (1, 2, 5):
        c, e = covariance_estimate(ExpandingCircleMap(2, seed=0), COS1, COS1, n, N, seed=2)
        assert abs(c) <= 4 * e


def test_rotation_closed_form():
    rot = CircleRotation()
    s = decay_profile(rot, COS1, COS1, 20, N, seed=3)
    want = 0.5 * np.cos(2 * np.pi * s.lags * rot.alpha_real)
    assert np.all(np.abs(s.cov - want) <= 4 * s.stderr + 1e-12)
    t = decay_profile(rot, COS1, COS1, 20, N, seed=3, estimator="time")
    assert np.all(np.abs(t.cov - want) < 0.02)


def test_constant_observable_has_zero_covariance():
    zero = FourierMode((0,))
    s = decay_profile(ExpandingCircleMap(2, seed=0), zero, COS1, 5, 2000, seed=0)
    assert np.all(np.abs(s.cov) <= 1e-12)


def test_bilinearity_and_determinism():
    half = FourierMode((1, 0), amplitude=0.5)
    full = FourierMode((1, 0))
    a = covariance_estimate(cat_map(), half, full, 3, 5000, seed=9)
    b = covariance_estimate(cat_map(), full, full, 3, 5000, seed=9)
    assert b[0] == pytest.approx(2 * a[0], rel=1e-12, abs=1e-15)
    assert covariance_estimate(cat_map(), full, full, 3, 5000, seed=9) == b
    with pytest.raises(UsageError):
        covariance_estimate(cat_map(), full, full, 3, 500, seed=9)


def _synthetic(values, stderr):
    lags = np.arange(len(values))
    return CorrelationSeries(lags, np.asarray(values, float), np.full(len(values), stderr), 10**6)


def test_classify_synthetic_exponential_and_polynomial():
    n = np.arange(0, 31)
    # stderrs chosen so the tails sink below the floor before lag n_max/2, as real estimates do
    c = decay_classify(_synthetic(0.5 * np.exp(-0.7 * n), stderr=1e-5))
    assert c.kind == "exponential" and c.rate == pytest.approx(0.7, rel=1e-6)
    p = decay_classify(_synthetic(np.r_[0.5, 0.5 * n[1:] ** -2.0], stderr=3e-4))
    assert p.kind == "polynomial" and p.exponent == pytest.approx(2, rel=1e-6)


def test_classify_none_and_censored():
    n = np.arange(0, 101)
    assert decay_classify(_synthetic(0.5 * np.cos(2 * np.pi * n * 0.618034), 1e-3)).kind == "none"
    noise = np.r_[0.5, np.zeros(100)]
    c = decay_classify(_synthetic(noise, 1e-3))
    assert c.kind == "censored" and c.superpolynomial_compatible


def test_mixing_bound_proxy_for_cat():
    # mu(B(x,r) & f^-n B(x,2r)) <= r^-2 theta_n + mu(B(x,4r))^2 + 5 stderr, with theta_n ~ 0 beyond the decay range
    x = TorusPoint.from_real([0.3, 0.6])
    r = 0.05
    for n in (10, 20):
        p, e = hit_fraction(cat_map(), x, r, n, 200_000, seed=n)
        assert p <= (8 * r) ** 4 + 5 * e
        assert abs(p - (2 * r) ** 2 * (4 * r) ** 2) <= 5 * e
