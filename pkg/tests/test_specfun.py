import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapfield.errors import DomainError
from gapfield.specfun import digamma, digamma_value, euler_gamma, polygamma, polygamma_value, psi

CATALAN = 0.915965594177219015054603514932


def brute_digamma(x, n=200_000):
    # digamma(x) - digamma(1) = sum_k [1/(k+1) - 1/(k+x)], tail by Euler-Maclaurin
    k = np.arange(n, dtype=float)
    head = math.fsum((1.0 / (k + 1) - 1.0 / (k + x)).tolist())
    tail = math.log((n + x - 0.5) / (n + 0.5))
    return head + tail - euler_gamma()


def brute_trigamma(x, n=200_000):
    k = np.arange(n, dtype=float)
    y = n + x
    return math.fsum((1.0 / (k + x) ** 2).tolist()) + 1 / y + 1 / (2 * y * y) + 1 / (6 * y**3)


def brute_tetragamma3(x, n=20_000):
    k = np.arange(n, dtype=float)
    y = n + x
    return 6 * (math.fsum((1.0 / (k + x) ** 4).tolist()) + 1 / (3 * y**3) + 1 / (2 * y**4) + 1 / (3 * y**5))


def test_euler_gamma_from_harmonic_numbers():
    m = 10_000
    h = math.fsum(1.0 / k for k in range(1, m + 1))
    approx = h - math.log(m) - 1 / (2 * m) + 1 / (12 * m * m)
    assert abs(approx - euler_gamma()) < 1e-13


@pytest.mark.parametrize("x", [1e-3, 0.1, 1 / 3, 0.5, 0.9, 1.0, 2.5, 7.9, 8.1, 40.0])
def test_digamma_vs_series(x):
    assert digamma(x) == pytest.approx(brute_digamma(x), abs=1e-9)


@pytest.mark.parametrize("x", [0.05, 0.25, 0.5, 1.0, 3.0, 12.0])
def test_trigamma_vs_series(x):
    assert polygamma(1, x) == pytest.approx(brute_trigamma(x), rel=1e-11)


@pytest.mark.parametrize("x", [0.05, 0.25, 0.5, 1.0, 3.0, 12.0])
def test_third_polygamma_vs_series(x):
    assert polygamma(3, x) == pytest.approx(brute_tetragamma3(x), rel=1e-10)


@pytest.mark.parametrize(
    "x, expected",
    [
        (1.0, -0.5772156649015329),
        (0.5, -0.5772156649015329 - 2 * math.log(2)),
        (1 / 3, -0.5772156649015329 - math.pi / (2 * math.sqrt(3)) - 1.5 * math.log(3)),
        (0.25, -0.5772156649015329 - math.pi / 2 - 3 * math.log(2)),
    ],
)
def test_digamma_known_values(x, expected):
    assert abs(digamma(x) - expected) < 1e-13


def test_shifted_digamma():
    assert abs(psi(1.0)) < 1e-14
    assert abs(psi(0.5) + 2 * math.log(2)) < 1e-12


@pytest.mark.parametrize(
    "n, x, expected",
    [
        (1, 1.0, math.pi**2 / 6),
        (1, 0.5, math.pi**2 / 2),
        (1, 0.25, math.pi**2 + 8 * CATALAN),
        (3, 1.0, math.pi**4 / 15),
        (3, 0.5, math.pi**4),
    ],
)
def test_polygamma_known_values(n, x, expected):
    assert polygamma(n, x) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=50.0))
def test_recurrences(x):
    assert digamma(x + 1) == pytest.approx(digamma(x) + 1 / x, rel=1e-12, abs=1e-12)
    # the subtraction cancels, so compare on the scale of the larger term
    assert abs(polygamma(1, x + 1) - (polygamma(1, x) - 1 / x**2)) < 1e-13 * (1 + 1 / x**2)
    assert abs(polygamma(3, x + 1) - (polygamma(3, x) - 6 / x**4)) < 1e-12 * (1 + 6 / x**4)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.01, max_value=0.99))
def test_reflection_formula(x):
    assert digamma(1 - x) - digamma(x) == pytest.approx(math.pi / math.tan(math.pi * x), rel=1e-11, abs=1e-11)


def test_error_estimates_are_small():
    v = digamma_value(0.3)
    assert v.abs_error_estimate < 1e-13
    assert polygamma_value(3, 0.3).abs_error_estimate < 1e-9 * abs(polygamma(3, 0.3))


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, float("nan"), float("inf")])
def test_domain(x):
    with pytest.raises(DomainError):
        digamma(x)
    with pytest.raises(DomainError):
        polygamma(1, x)


@pytest.mark.parametrize("n", [0, 2, 4, -1])
def test_unsupported_order(n):
    with pytest.raises(DomainError):
        polygamma(n, 1.0)
