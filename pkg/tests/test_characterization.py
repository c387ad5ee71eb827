import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wmeans.characterization import (CONSISTENT, INCONCLUSIVE, INCONSISTENT, hazard_exponent,
                                     recover_hazard_from_proportionality,
                                     test_exponentiality_via_mean_equality as mean_equality,
                                     test_proportionality as proportionality, weibull_for_power_weight)
from wmeans.errors import DegenerateError, ValidationError
from wmeans.models import (CONSTANT, INCREASING, constant_weight, custom_hazard, exponential,
                           exponential_weight, power_weight, weibull)
from wmeans.weighted import WeightedModel, mean_triple, wafr

GRID = np.linspace(0.2, 4.0, 12)


@pytest.mark.parametrize("which", ["AG", "GH", "AH"])
def test_exponential_is_consistent_for_every_pair(which):
    v = mean_equality(WeightedModel(exponential(0.7), power_weight(2.0)), which, GRID)
    assert v.verdict == CONSISTENT and v.statistic <= 1e-9
    assert v.details["h_constant"]


def test_weibull_am_gm_gap_is_detected():
    v = mean_equality(WeightedModel(weibull(1.0, 2.0)), "AG", GRID)
    assert v.verdict == INCONSISTENT
    # A = x, G = 2x/e, so the relative gap is 1 - 2/e everywhere.
    assert v.statistic == pytest.approx(1 - 2 / math.e, rel=1e-9)


def test_near_exponential_probe():
    v = mean_equality(WeightedModel(weibull(1.0, 1.0000001)), "AG", GRID, threshold=1e-4)
    assert v.verdict == CONSISTENT


def test_divergent_mean_is_inconclusive():
    v = mean_equality(WeightedModel(weibull(1.0, 2.0)), "GH", GRID)
    assert v.verdict == INCONCLUSIVE
    with pytest.raises(ValidationError):
        mean_equality(WeightedModel(exponential(1.0)), "AX", GRID)


def test_power_weight_round_trip():
    w = power_weight(1.0)
    hz = recover_hazard_from_proportionality(w, "A", 0.5, 2.0)
    xs = np.linspace(0.1, 5.0, 20)
    np.testing.assert_allclose(hz.h(xs), xs ** 2, rtol=1e-12)
    m = WeightedModel(hz, w)
    for x in xs:
        assert wafr(m, float(x), "quadrature") / float(hz.h(x)) == pytest.approx(0.5, abs=1e-6)
    wb = weibull_for_power_weight(1.0, 0.5, 2.0)
    assert wb.params["beta"] == 3.0
    np.testing.assert_allclose(wb.h(xs), xs ** 2, rtol=1e-12)


def test_boundary_cases():
    hz = recover_hazard_from_proportionality(power_weight(1.0), "A", 1.0, 3.0)
    np.testing.assert_allclose(hz.h([0.5, 2.0]), 3.0)
    assert hz.params["exponent"] == 0.0
    with pytest.raises(ValidationError):
        recover_hazard_from_proportionality(power_weight(1.0), "G", math.e, 1.0)
    with pytest.raises(ValidationError):
        recover_hazard_from_proportionality(power_weight(1.0), "A", 0.5, -1.0)
    with pytest.raises(ValidationError):
        hazard_exponent("Q", 0.5)


@pytest.mark.parametrize("which, ratio", [("A", 0.5), ("A", 2.0), ("G", 0.8), ("G", 1.5),
                                          ("H", 0.7), ("H", 1.3)])
@pytest.mark.parametrize("weight", [power_weight(1.0), exponential_weight(-0.5), constant_weight()],
                         ids=["power", "exp", "const"])
def test_recovery_round_trip(which, ratio, weight):
    hz = recover_hazard_from_proportionality(weight, which, ratio, 1.5)
    m = WeightedModel(hz, weight)
    key = {"A": "afr", "G": "gfr", "H": "hfr"}[which]
    for x in (0.3, 1.0, 2.5):
        t = mean_triple(m, x, "quadrature")
        assert getattr(t, key) / float(hz.h(x)) == pytest.approx(ratio, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.2, 4.0))
def test_arithmetic_round_trip_property(a, k):
    w = power_weight(0.5)
    hz = recover_hazard_from_proportionality(w, "A", a, k)
    m = WeightedModel(hz, w)
    assert wafr(m, 1.7, "quadrature") / float(hz.h(1.7)) == pytest.approx(a, rel=1e-6)


def test_proportionality_fit():
    w = power_weight(1.0)
    m = WeightedModel(recover_hazard_from_proportionality(w, "A", 0.5, 2.0), w)
    r = proportionality(m, "A", GRID)
    assert r.ratio == pytest.approx(0.5, rel=1e-9)
    assert r.verdict.verdict == CONSISTENT
    assert r.expected_h_direction == INCREASING and r.remark_consistent


def test_proportionality_rejects_non_power_hazard():
    r = proportionality(WeightedModel(weibull(1.0, 2.0), exponential_weight(-1.0)), "A", GRID)
    assert r.verdict.verdict == INCONSISTENT


def test_proportionality_constant_hazard():
    r = proportionality(WeightedModel(exponential(0.4), power_weight(2.0)), "G", GRID)
    assert r.ratio == pytest.approx(1.0) and r.expected_h_direction == CONSTANT


def test_proportionality_degenerate_hazard():
    m = WeightedModel(custom_hazard(lambda x: np.where(np.asarray(x) < 1.0, 0.0, 1.0)))
    with pytest.raises(DegenerateError):
        proportionality(m, "A", GRID)
