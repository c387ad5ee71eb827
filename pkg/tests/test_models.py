import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wmeans.aging import classify
from wmeans.errors import ValidationError
from wmeans.models import (CONSTANT, DECREASING, INCREASING, NON_MONOTONE, additive_weibull,
                           constant_weight, exponential, exponential_weight, kies, kies_ratio_weight,
                           make_hazard, make_weight, marshall_olkin, marshall_olkin_weight, pareto_one,
                           power_weight, scan_monotonicity, tabulated_weight, weibull)
from wmeans.quadrature import integrate
from wmeans.weighted import WeightedModel


def test_hazard_examples():
    assert exponential(0.5).h(3.0) == 0.5
    assert weibull(1.0, 2.0).h(2.0) == pytest.approx(4.0)
    assert kies(0.0, 1.0, 1.0, 2.0).survival(0.5) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_weight_examples():
    assert power_weight(1.0).W(2.0) == pytest.approx(2.0)
    assert exponential_weight(-1.0).W(1.0) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    for x in (1.0, 5.0, 10.0):
        assert constant_weight().W(x) == x


def test_power_weight_rejects_nonintegrable():
    with pytest.raises(ValidationError, match="not locally integrable"):
        power_weight(-1.0)


@pytest.mark.parametrize("spec", [
    {"family": "weibull", "alpha": -1, "beta": 2},
    {"family": "exponential"},
    {"family": "kies", "a": 2, "b": 1, "lambda": 1, "beta": 1},
    {"family": "nope"},
])
def test_make_hazard_validation(spec):
    with pytest.raises(ValidationError):
        make_hazard(spec)


def test_make_from_specs():
    h = make_hazard({"family": "weibull", "alpha": 1, "beta": 2})
    w = make_weight({"family": "exponential", "n": -1})
    assert h.h(2.0) == pytest.approx(4.0)
    assert w.w(1.0) == pytest.approx(math.exp(-1))
    assert make_weight(None).family == "constant"


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.3, 4.0), st.floats(0.1, 5.0))
def test_weibull_cumulative_hazard_matches_quadrature(alpha, beta, x):
    m = weibull(alpha, beta)
    assert float(m.H(x)) == pytest.approx(integrate(m.hazard_fn, 0.0, x).value, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.3, 3.0), st.floats(0.2, 3.0), st.floats(0.3, 3.0),
       st.floats(0.1, 4.0))
def test_additive_weibull_cumulative(alpha, theta, beta, gamma, x):
    m = additive_weibull(alpha, theta, beta, gamma)
    assert float(m.H(x)) == pytest.approx(integrate(m.hazard_fn, 0.0, x).value, rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 0.999))
def test_quantile_inverts_cdf(u):
    for m in (weibull(1.3, 0.7), kies(0.5, 2.0, 1.0, 1.5), pareto_one(2.0)):
        assert float(m.cdf(m.quantile(u))) == pytest.approx(u, rel=1e-10)


def test_marshall_olkin_neutral_tilt():
    base = weibull(0.8, 1.7)
    mo = marshall_olkin(base, 1.0)
    xs = np.linspace(0.01, 4.0, 50)
    np.testing.assert_allclose(mo.h(xs), base.h(xs), rtol=1e-12)
    np.testing.assert_allclose(marshall_olkin_weight(base, 1.0).w(xs), 1.0, rtol=1e-12)


def test_marshall_olkin_survival_form():
    base = weibull(1.0, 2.0)
    a = 2.5
    mo = marshall_olkin(base, a)
    for x in (0.3, 1.0, 2.0):
        sg = float(base.survival(x))
        assert float(mo.survival(x)) == pytest.approx(a * sg / (1 - (1 - a) * sg), rel=1e-12)


@pytest.mark.parametrize("beta, c", [(0.5, 1.0), (0.5, 0.3), (0.8, 0.1), (1.5, -0.3)])
def test_power_weight_form_invariance(beta, c):
    # w h with w = x^c and Weibull h stays Weibull-shaped: alpha beta x^(beta + c - 1).
    m = WeightedModel(weibull(1.0, beta), power_weight(c))
    xs = np.linspace(0.1, 5.0, 40)
    np.testing.assert_allclose(m.weighted_hazard(xs), beta * xs ** (beta + c - 1), rtol=1e-12)
    label = scan_monotonicity(m.weighted_hazard, (0.1, 5.0)).label
    assert label == (INCREASING if beta + c > 1 else DECREASING)


@pytest.mark.parametrize("theta, gamma, c", [(0.5, 0.7, 0.6), (0.8, 0.9, 0.3)])
def test_additive_weibull_shift(theta, gamma, c):
    m = WeightedModel(additive_weibull(1.0, theta, 1.0, gamma), power_weight(c))
    expected = INCREASING if (c + theta > 1 and c + gamma > 1) else None
    label = scan_monotonicity(m.weighted_hazard, (0.05, 5.0)).label
    if expected is not None:
        assert label == expected
    assert scan_monotonicity(m.hazard.h, (0.05, 5.0)).label == DECREASING


@pytest.mark.parametrize("beta", [0.3, 0.5, 1.0, 2.0])
def test_kies_ratio_weight_makes_ifr(beta):
    m = WeightedModel(kies(0.0, 1.0, 1.0, beta), kies_ratio_weight(0.0, 1.0))
    assert scan_monotonicity(m.weighted_hazard, (0.01, 0.99)).label == INCREASING


def test_scan_examples():
    assert scan_monotonicity(weibull(1.0, 2.0).h, (0.1, 10.0)).label == INCREASING
    v = scan_monotonicity(lambda x: 3 * x ** 2 * np.exp(-x), (0.1, 10.0))
    assert v.label == NON_MONOTONE
    assert len(v.change_points) == 1
    assert v.change_points[0] == pytest.approx(2.0, abs=1e-4)
    assert scan_monotonicity(lambda x: np.full_like(x, 0.5), (0.0, 1.0)).label == CONSTANT


def test_scan_validation():
    with pytest.raises(ValidationError):
        scan_monotonicity(np.exp, (1.0, 0.0))
    with pytest.raises(ValidationError):
        scan_monotonicity(np.exp, (0.0, 1.0), grid_size=4)


def test_tabulated_weight_cumulative():
    w = tabulated_weight([0.0, 1.0, 3.0], [1.0, 2.0, 0.0])
    assert float(w.W(1.0)) == pytest.approx(1.5)
    assert float(w.W(3.0)) == pytest.approx(3.5)
    assert float(w.W(4.0)) == pytest.approx(3.5)
    with pytest.raises(ValidationError):
        tabulated_weight([0.0, 1.0], [1.0, -1.0])


def test_kies_support_clamp():
    m = kies(0.0, 1.0, 1.0, 2.0)
    assert math.isfinite(float(m.h(1.0)))
    assert float(m.h(-0.5)) == 0.0


def test_classify_weibull_dfr_labels():
    r = classify(WeightedModel(weibull(1.0, 0.5)))
    assert {"DFR", "Dw-AFR", "Dw-GFR", "Dw-HFR"} <= r.labels
