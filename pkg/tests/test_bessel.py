import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jv

from thzcavity.bessel import bessel_j, bessel_j_table


@pytest.mark.parametrize("x", [0.0, 1e-8, 0.3, 1.0, 7.4, 15.6, 31.27, 80.0, 250.0])
def test_table_matches_scipy(x):
    nmax = 60
    got = bessel_j_table(nmax, x)
    want = jv(np.arange(nmax + 1), x)
    np.testing.assert_allclose(got, want, rtol=0, atol=5e-15)


def test_vector_path_matches_scalar_path():
    xs = np.linspace(0.0, 40.0, 37)
    table = bessel_j_table(30, xs)
    assert table.shape == (31, 37)
    for j in (0, 5, 36):
        np.testing.assert_allclose(table[:, j], bessel_j_table(30, xs[j]), rtol=0, atol=1e-15)


def test_zero_argument():
    t = bessel_j_table(5, 0.0)
    assert t[0] == 1.0
    assert np.all(t[1:] == 0.0)


@pytest.mark.parametrize("n", [-7, -2, -1])
def test_negative_orders(n):
    x = np.array([0.5, 3.0, 12.0])
    np.testing.assert_allclose(bessel_j(n, x), jv(n, x), atol=1e-15)


@pytest.mark.parametrize("bad", [-1.0, np.nan, np.inf])
def test_rejects_bad_arguments(bad):
    with pytest.raises(ValueError):
        bessel_j_table(3, bad)


def test_rejects_negative_nmax():
    with pytest.raises(ValueError):
        bessel_j_table(-1, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.05, max_value=200.0))
def test_normalization_sum_and_recurrence(x):
    t = bessel_j_table(400, x)
    total = t[0] + 2.0 * t[2::2].sum()
    assert total == pytest.approx(1.0, abs=1e-13)
    n = np.arange(1, 40)
    lhs = 2.0 * n / x * t[n]
    np.testing.assert_allclose(lhs, t[n - 1] + t[n + 1], atol=1e-12 * max(1.0, 1.0 / x))
