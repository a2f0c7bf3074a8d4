import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import norm

from ncrand import lawlib
from ncrand.errors import ValidationError
from ncrand.lawlib import (
    STANDARD_GAUSSIAN,
    STANDARD_SEMICIRCLE,
    cdf,
    density,
    empirical,
    exact_moment,
    gaussian,
    ks_distance,
    numeric_moment,
    semicircle,
)


def test_density_examples():
    assert density(STANDARD_SEMICIRCLE, 2.0) == 0
    assert density(STANDARD_SEMICIRCLE, -2.0) == 0
    assert density(STANDARD_SEMICIRCLE, 0.0) == pytest.approx(1 / math.pi, rel=1e-15)
    assert density(STANDARD_GAUSSIAN, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
    with pytest.raises(ValidationError):
        density(empirical([1.0]), 0.0)


def test_law_validation():
    with pytest.raises(ValidationError):
        gaussian(0, 0)
    with pytest.raises(ValidationError):
        semicircle(0, -1)
    with pytest.raises(ValidationError):
        empirical([])
    assert empirical([3, 1, 2]).samples.tolist() == [1, 2, 3]


@given(st.floats(-10, 10), st.floats(-3, 3), st.floats(0.1, 4))
def test_density_nonnegative_and_supported(x, m, r):
    assert density(semicircle(m, r), x) >= 0
    assert density(gaussian(m, r), x) >= 0
    if abs(x - m) > r:
        assert density(semicircle(m, r), x) == 0


@pytest.mark.parametrize(
    "kind,n,expected",
    [("standard_gaussian", 4, 3), ("standard_semicircle", 4, 2), ("standard_gaussian", 7, 0), ("standard_semicircle", 7, 0)],
)
def test_exact_moment_examples(kind, n, expected):
    assert exact_moment(kind, n) == expected


def test_exact_moment_recursions():
    g = [exact_moment("standard_gaussian", 2 * k) for k in range(13)]
    c = [exact_moment("standard_semicircle", 2 * k) for k in range(13)]
    for k in range(1, 13):
        assert g[k] == (2 * k - 1) * g[k - 1]
        assert c[k] == sum(c[j] * c[k - 1 - j] for j in range(k))


@pytest.mark.parametrize(
    "law,n,expected,tol",
    [(STANDARD_SEMICIRCLE, 6, 5, 1e-8), (STANDARD_GAUSSIAN, 6, 15, 1e-6), (STANDARD_SEMICIRCLE, 0, 1, 1e-9), (STANDARD_GAUSSIAN, 0, 1, 1e-9)],
)
def test_numeric_moment_examples(law, n, expected, tol):
    assert numeric_moment(law, n) == pytest.approx(expected, abs=tol)


@pytest.mark.parametrize("n", range(11))
def test_exact_and_numeric_agree(n):
    assert numeric_moment(STANDARD_GAUSSIAN, n) == pytest.approx(exact_moment("standard_gaussian", n), abs=1e-6)
    assert numeric_moment(STANDARD_SEMICIRCLE, n) == pytest.approx(exact_moment("standard_semicircle", n), abs=1e-6)


def test_shifted_laws_moments():
    # second moment about 0 of N(m, s^2) is m^2 + s^2; of sc(m, r) is m^2 + r^2/4
    assert numeric_moment(gaussian(1.5, 0.5), 2) == pytest.approx(1.5**2 + 0.25, abs=1e-9)
    assert numeric_moment(semicircle(-1, 3), 2) == pytest.approx(1 + 9 / 4, abs=1e-9)


def test_empirical_moment():
    assert numeric_moment(empirical([1, 2, 3]), 2) == pytest.approx(14 / 3)


def test_semicircle_cdf_derivative_matches_density():
    x = np.linspace(-2, 2, 1003)[1:-1]
    h = 1e-6
    deriv = (cdf(STANDARD_SEMICIRCLE, x + h) - cdf(STANDARD_SEMICIRCLE, x - h)) / (2 * h)
    np.testing.assert_allclose(deriv, density(STANDARD_SEMICIRCLE, x), atol=1e-6)
    assert cdf(STANDARD_SEMICIRCLE, -2) == 0 and cdf(STANDARD_SEMICIRCLE, 2) == pytest.approx(1)


def test_ks_quantile_grid():
    grid = norm.ppf(np.arange(1, 1000) / 1000)
    assert ks_distance(empirical(grid), STANDARD_GAUSSIAN) < 2e-3


def test_ks_single_point():
    assert ks_distance(empirical([0.0]), STANDARD_SEMICIRCLE) == pytest.approx(0.5)


def test_ks_rejects_empirical_reference():
    with pytest.raises(ValidationError):
        ks_distance(empirical([0.0]), empirical([1.0]))
    with pytest.raises(ValidationError):
        ks_distance(STANDARD_GAUSSIAN, STANDARD_SEMICIRCLE)


def test_ks_matches_scipy():
    from scipy.stats import kstest

    x = np.random.default_rng(0).standard_normal(500)
    assert ks_distance(empirical(x), STANDARD_GAUSSIAN) == pytest.approx(kstest(x, "norm").statistic, abs=1e-12)


def test_histogram_schema_and_normalization():
    x = np.random.default_rng(1).uniform(-1, 1, 10000)
    h = lawlib.histogram(x, 20, (-1, 1))
    assert h.header() == ["bin_left", "bin_right", "count", "density_estimate"]
    assert h.counts.sum() == 10000
    assert np.sum(h.density * np.diff(h.edges)) == pytest.approx(1)
    rows = list(h.rows())
    assert len(rows) == 20 and rows[0][0] == -1
