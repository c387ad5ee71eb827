import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wmeans import special
from wmeans.errors import ValidationError

mpmath.mp.dps = 30

A_VALUES = (0.5, 1.0, 2.0, 3.5)
X_VALUES = (0.1, 1.0, 5.0)


def test_upper_gamma_spot_values():
    assert special.upper_incomplete_gamma(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert special.upper_incomplete_gamma(2.0, 1.0) == pytest.approx(2.0 / math.e, rel=1e-12)
    assert special.upper_incomplete_gamma(3.0, 0.0) == pytest.approx(2.0, rel=1e-14)


def test_lower_gamma_matches_mpmath():
    for a in A_VALUES + (0.2, 7.0, 20.0):
        for x in X_VALUES + (0.01, 12.0, 40.0):
            want = float(mpmath.gammainc(a, 0, x))
            assert special.lower_incomplete_gamma(a, x) == pytest.approx(want, rel=1e-11)


def test_upper_gamma_matches_mpmath():
    for a in A_VALUES + (0.2, 7.0):
        for x in X_VALUES + (0.01, 12.0, 40.0):
            want = float(mpmath.gammainc(a, x, mpmath.inf))
            assert special.upper_incomplete_gamma(a, x) == pytest.approx(want, rel=1e-11)


@pytest.mark.parametrize("a", A_VALUES)
@pytest.mark.parametrize("x", X_VALUES)
def test_complement_and_recurrence(a, x):
    g = special.lower_incomplete_gamma(a, x)
    G = special.upper_incomplete_gamma(a, x)
    assert abs(g + G - math.gamma(a)) <= 1e-10 * math.gamma(a)
    lhs = special.lower_incomplete_gamma(a + 1, x)
    rhs = a * g - x ** a * math.exp(-x)
    assert abs(lhs - rhs) <= 1e-9 * abs(lhs)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(0.1, 15.0), x=st.floats(0.0, 40.0))
def test_regularized_pair_sums_to_one(a, x):
    P = special.regularized_lower_gamma(a, x)
    Q = special.regularized_upper_gamma(a, x)
    assert 0.0 <= P <= 1.0 and 0.0 <= Q <= 1.0
    assert P + Q == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.1, 10.0), x=st.floats(0.0, 30.0), dx=st.floats(1e-3, 5.0))
def test_monotone_in_x(a, x, dx):
    assert special.lower_incomplete_gamma(a, x + dx) >= special.lower_incomplete_gamma(a, x)
    assert special.upper_incomplete_gamma(a, x + dx) <= special.upper_incomplete_gamma(a, x)


def _e1_series(z, terms=80):
    total = mpmath.mpf(0)
    for k in range(1, terms):
        total += (-1) ** (k + 1) * mpmath.mpf(z) ** k / (k * mpmath.factorial(k))
    return -mpmath.euler - mpmath.log(z) + total


def test_e1_against_series_oracle():
    assert special.exponential_integral_e1(1.0) == pytest.approx(float(_e1_series(1.0)), abs=1e-7)
    assert special.exponential_integral_e1(1.0) == pytest.approx(0.2193839, abs=1e-7)
    assert special.exponential_integral_e1(0.5) == pytest.approx(0.5597736, abs=1e-7)


@pytest.mark.parametrize("z", [1e-6, 0.01, 0.3, 0.99, 1.0, 1.01, 2.5, 10.0, 50.0, 300.0])
def test_e1_matches_mpmath(z):
    assert special.exponential_integral_e1(z) == pytest.approx(float(mpmath.e1(z)), rel=1e-11)


def test_e1_tail_bound():
    z = 50.0
    assert 0.0 < special.exponential_integral_e1(z) < math.exp(-z) / z


def test_euler_gamma():
    g = special.euler_gamma()
    assert round(g, 6) == 0.577216
    assert g == pytest.approx(float(mpmath.euler), abs=1e-15)
    z = 1e-8
    assert special.exponential_integral_e1(z) + math.log(z) == pytest.approx(-g, abs=1e-6)
    assert special.euler_gamma() == g


def test_bad_arguments():
    with pytest.raises(ValidationError):
        special.lower_incomplete_gamma(0.0, 1.0)
    with pytest.raises(ValidationError):
        special.upper_incomplete_gamma(1.0, -1.0)
    with pytest.raises(ValidationError):
        special.exponential_integral_e1(0.0)
    with pytest.raises(ValidationError):
        special.SpecialFnConfig(rel_tol=0.0)
