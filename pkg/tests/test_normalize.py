import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats
from scipy.special import ndtri

from rainshape.normalize import NormalizingMap, skewness_profile
from rainshape.starhull import AngularGrid, RadialFunction


def test_constant_pool():
    g = AngularGrid(4)
    nmap = NormalizingMap.fit([RadialFunction(g, np.full(4, 5.0), (0, 0))])
    assert nmap.sorted_values.tolist() == [5.0] * 4
    assert nmap.apply(5.0) == 0.0
    assert nmap.invert(0.0) == 5.0


def test_pool_order_and_complete_only():
    nmap = NormalizingMap.fit([np.array([1.0, 2.0]), np.array([3.0, 4.0])])
    assert nmap.sorted_values.tolist() == [1, 2, 3, 4]
    g = AngularGrid(4)
    rfs = [RadialFunction(g, np.full(4, 1.0), (0, 0)), RadialFunction(g, np.full(4, 9.0), (0, 0), censored=True)]
    assert NormalizingMap.fit(rfs, complete_only=True).sorted_values.max() == 1.0


def test_median_maps_to_zero():
    nmap = NormalizingMap([3, 1, 2, 5, 4])
    assert nmap.apply(3.0) == 0.0


def test_below_minimum_is_clamped():
    nmap = NormalizingMap(np.arange(1.0, 11.0))
    assert nmap.apply(-100.0) == pytest.approx(ndtri(0.5 / 10))
    assert np.isfinite(nmap.apply(1e9))


def test_inverse_limits_and_even_median():
    nmap = NormalizingMap([4.0, 1.0, 3.0, 2.0])
    assert nmap.invert(-np.inf) == 1.0
    assert nmap.invert(-40.0) == 1.0
    assert nmap.invert(0.0) == 2.0
    assert nmap.invert(np.inf) == 4.0


def test_exponential_pool_is_symmetrized():
    draws = np.random.default_rng(0).exponential(size=200)
    z = NormalizingMap(draws).apply(draws)
    assert abs(stats.skew(z)) < 0.15


def test_serialization_round_trip():
    nmap = NormalizingMap(np.random.default_rng(1).gamma(2.0, size=50))
    back = NormalizingMap.loads(nmap.dumps())
    assert np.array_equal(back.sorted_values, nmap.sorted_values)
    with pytest.raises(ValueError):
        NormalizingMap.loads("value\n1\n")


def test_empty_or_nonfinite_pool():
    with pytest.raises(ValueError):
        NormalizingMap([])
    with pytest.raises(ValueError):
        NormalizingMap([1.0, np.nan])


pools = st.lists(st.floats(0.01, 1e4), min_size=1, max_size=200)


@given(pools)
def test_round_trip_on_pool(values):
    nmap = NormalizingMap(values)
    v = np.asarray(values)
    assert np.array_equal(nmap.invert(nmap.apply(v)), v)


@given(pools, st.floats(0.01, 1e4), st.floats(0.01, 1e4))
def test_apply_monotone(values, a, b):
    nmap = NormalizingMap(values)
    lo, hi = min(a, b), max(a, b)
    assert nmap.apply(lo) <= nmap.apply(hi)
    u = np.unique(values)
    if u.size > 1:
        assert np.all(np.diff(nmap.apply(u)) > 0)


@given(pools, st.floats(-6, 6), st.floats(-6, 6))
def test_invert_monotone(values, a, b):
    nmap = NormalizingMap(values)
    assert nmap.invert(min(a, b)) <= nmap.invert(max(a, b))


def test_skewness_symmetric_and_degenerate():
    c = np.array([[-2.0, -1.0], [0.0, 0.0], [2.0, 1.0]])
    assert np.allclose(skewness_profile(c), 0.0)
    assert np.all(np.isnan(skewness_profile(np.ones((5, 3)))))
    assert np.all(np.isnan(skewness_profile(np.ones((2, 3)))))


def test_skewness_matches_scipy():
    x = np.random.default_rng(2).gamma(1.5, size=(40, 6))
    assert np.allclose(skewness_profile(x), stats.skew(x, axis=0, bias=True))


def test_lognormal_radii_before_and_after():
    rng = np.random.default_rng(3)
    m = 50
    radii = np.exp(3.0 + 0.6 * rng.standard_normal((3000, m)))  # skewness sd ~ sqrt(6/n)
    nmap = NormalizingMap(radii)
    before, after = skewness_profile(radii), skewness_profile(nmap.apply(radii))
    assert np.all(before > 0.5)
    assert np.all(np.abs(after) < 0.2)
