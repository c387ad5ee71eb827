import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from battery import CHAIN_HAZARDS, HAZARDS, WEIGHTS, abscissae, models
from wmeans.errors import DivergenceError, ValidationError
from wmeans.models import (additive_weibull, constant_weight, exponential, exponential_weight,
                           power_weight, weibull)
from wmeans.weighted import (WeightedModel, check_validity_postulates, mean_integrals,
                             mean_triple, mean_triple_grid, unweighted, wafr, weibull_exponential_weight_forms,
                             weighted_density, weighted_survival, wgfr, whfr)


def _mp_quad(f, a, b):
    with mpmath.workdps(30):
        return float(mpmath.quad(f, [a, (a + b) / 2, b]))


# -- spot values ------------------------------------------------------------

@pytest.mark.parametrize("w", list(WEIGHTS.values()), ids=list(WEIGHTS))
def test_exponential_hazard_is_constant_under_any_weight(w):
    m = WeightedModel(exponential(0.5), w)
    assert wafr(m, 3.0) == pytest.approx(0.5, rel=1e-12)
    assert wgfr(m, 1.0) == pytest.approx(0.5, rel=1e-12)
    assert whfr(m, 2.0) == pytest.approx(0.5, rel=1e-12)


def test_weibull_arithmetic_means():
    assert wafr(WeightedModel(weibull(1.0, 2.0)), 2.0) == pytest.approx(2.0, rel=1e-12)
    m = WeightedModel(weibull(1.0, 2.0), power_weight(1.0))
    assert wafr(m, 2.0) == pytest.approx(8.0 / 3.0, rel=1e-12)
    assert wafr(m, 2.0, "quadrature") == pytest.approx(8.0 / 3.0, rel=1e-10)


def test_weibull_triples():
    t = mean_triple(WeightedModel(weibull(1.0, 1.5)), 4.0)
    assert (t.afr, t.gfr, t.hfr) == pytest.approx((2.0, 3.0 * math.exp(-0.5), 1.5), rel=1e-12)
    assert t.gfr == pytest.approx(1.8196, abs=1e-4)
    t = mean_triple(WeightedModel(weibull(1.0, 2.0)), 4.0)
    assert t.afr == pytest.approx(4.0)
    assert t.gfr == pytest.approx(8.0 / math.e, rel=1e-12)
    assert t.hfr == 0.0 and t.hfr_divergent


def test_harmonic_divergence_flag_by_quadrature():
    value, flag = whfr(WeightedModel(weibull(1.0, 2.0)), 1.0, "quadrature", with_flag=True)
    assert value == 0.0 and flag


def test_vanishing_hazard_is_degenerate():
    # exp(-1/x^2) underflows to 0 near the origin, so ln h is not finite there.
    from wmeans.errors import DegenerateError
    from wmeans.models import custom_hazard
    m = WeightedModel(custom_hazard(lambda x: np.exp(-1.0 / x ** 2)))
    with pytest.raises(DegenerateError):
        wgfr(m, 1.0)


def test_mean_triple_grid_examples():
    for t in mean_triple_grid(WeightedModel(exponential(1.0), power_weight(2.0)), [1.0, 2.0, 3.0]):
        assert (t.afr, t.gfr, t.hfr) == pytest.approx((1.0, 1.0, 1.0), rel=1e-12)
    (t,) = mean_triple_grid(WeightedModel(weibull(1.0, 1.5)), [4.0])
    assert (t.afr, t.gfr, t.hfr) == pytest.approx((2.0, 1.8196, 1.5), abs=1e-4)


def test_grid_matches_pointwise_quadrature():
    m = WeightedModel(HAZARDS["kies(0,1,1,0.5)"], WEIGHTS["power(1)"])
    grid = [0.2, 0.4, 0.6, 0.8]
    for t, x in zip(mean_triple_grid(m, grid), grid):
        s = mean_triple(m, x)
        assert (t.afr, t.gfr, t.hfr) == pytest.approx((s.afr, s.gfr, s.hfr), rel=1e-9)


# -- weighted survival ------------------------------------------------------

def test_weighted_survival_example():
    m = WeightedModel(weibull(1.0, 2.0), exponential_weight(-1.0))
    exact = math.exp(-2.0 * (1.0 - 2.0 / math.e))
    assert weighted_survival(m, 1.0) == pytest.approx(exact, rel=1e-12)
    # The digits 0.5894898 sometimes quoted for this value transpose two
    # digits of e^(-2(1-2/e)) = 0.58949901...
    assert weighted_survival(m, 1.0) == pytest.approx(0.5894990, abs=1e-7)
    assert weighted_survival(m, 1.0, "quadrature") == pytest.approx(exact, rel=1e-10)


def test_weighted_survival_trivial_cases():
    assert weighted_survival(WeightedModel(weibull(1.3, 0.8), power_weight(1.0)), 0.0) == 1.0
    assert weighted_survival(WeightedModel(exponential(1.0)), math.log(2.0)) == pytest.approx(0.5)


def test_weighted_density_is_hazard_times_survival():
    m = WeightedModel(weibull(1.0, 2.0), power_weight(1.0))
    x = 0.7
    assert weighted_density(m, x) == pytest.approx(x * 2 * x * math.exp(-2 * x ** 3 / 3), rel=1e-12)


# -- closed forms for the Weibull hazard under w = e^(n x) --------------------

BETAS = (0.5, 2.0, 3.0)
XS = np.linspace(0.1, 5.0, 20)


@pytest.mark.parametrize("beta", BETAS)
def test_exponential_weight_closed_forms_vs_mpmath(beta):
    n = -1.0
    for x in XS:
        forms = weibull_exponential_weight_forms(1.0, beta, n, float(x))
        with mpmath.workdps(30):
            K = mpmath.gammainc(beta, 0, x) * beta
            W = 1 - mpmath.exp(-x)
            assert forms["survival"] == pytest.approx(float(mpmath.exp(-K)), rel=1e-12)
            assert forms["afr"] == pytest.approx(float(K / W), rel=1e-12)
            L = _mp_quad(lambda u: mpmath.exp(-u) * mpmath.log(beta * u ** (beta - 1)), 0, float(x))
            assert forms["gfr"] == pytest.approx(float(mpmath.exp(L / W)), rel=1e-9)
            if beta < 2:
                V = _mp_quad(lambda u: mpmath.exp(-u) / (beta * u ** (beta - 1)), 0, float(x))
                assert forms["hfr"] == pytest.approx(float(W / V), rel=1e-9)
            else:
                assert forms["hfr"] is None


@pytest.mark.parametrize("beta", BETAS)
def test_closed_forms_vs_package_quadrature(beta):
    m = WeightedModel(weibull(1.0, beta), exponential_weight(-1.0))
    for x in XS:
        forms = weibull_exponential_weight_forms(1.0, beta, -1.0, float(x))
        t = mean_triple(m, float(x), "quadrature")
        assert t.afr == pytest.approx(forms["afr"], rel=1e-6)
        assert t.gfr == pytest.approx(forms["gfr"], rel=1e-6)
        assert weighted_survival(m, float(x), "quadrature") == pytest.approx(forms["survival"], rel=1e-6)
        if beta < 2:
            assert t.hfr == pytest.approx(forms["hfr"], rel=1e-6)
        else:
            assert t.hfr_divergent


@pytest.mark.parametrize("hazard", [weibull(1.0, 0.5), weibull(0.7, 1.6), weibull(1.2, 3.0)])
@pytest.mark.parametrize("weight", [constant_weight(), power_weight(0.5), power_weight(2.0),
                                    exponential_weight(-0.5)])
def test_fast_paths_agree_with_quadrature(hazard, weight):
    m = WeightedModel(hazard, weight)
    for x in (0.3, 1.0, 2.5):
        fast = mean_integrals(m, x, "closed")
        slow = mean_integrals(m, x, "quadrature")
        assert fast.weight_mass == pytest.approx(slow.weight_mass, rel=1e-10)
        assert fast.hazard_mass == pytest.approx(slow.hazard_mass, rel=1e-10)
        assert fast.log_mass == pytest.approx(slow.log_mass, rel=1e-9, abs=1e-12)
        assert fast.inverse_mass == pytest.approx(slow.inverse_mass, rel=1e-9)


def test_closed_method_without_fast_path():
    with pytest.raises(ValidationError):
        mean_integrals(WeightedModel(HAZARDS["pareto_one(2)"]), 3.0, "closed")


# -- invariants -------------------------------------------------------------

@pytest.mark.parametrize("name, m", list(models(CHAIN_HAZARDS)), ids=lambda v: v if isinstance(v, str) else "")
def test_am_gm_hm_chain(name, m):
    for t in mean_triple_grid(m, abscissae(m.hazard, 20)):
        if t.all_finite:
            assert t.afr >= t.gfr * (1 - 1e-9)
            assert t.gfr >= t.hfr * (1 - 1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 4.0), st.floats(0.3, 1.9), st.floats(-0.9, 3.0), st.floats(0.05, 6.0))
def test_chain_property_weibull_power(alpha, beta, c, x):
    assume(beta + c > 0.05)
    t = mean_triple(WeightedModel(weibull(alpha, beta), power_weight(c)), x)
    assert t.afr >= t.gfr * (1 - 1e-9) >= t.hfr * (1 - 1e-9) ** 2


@pytest.mark.parametrize("method", ["auto", "quadrature"])
def test_nonintegrable_weighted_hazard_diverges(method):
    # x^-0.75 times 0.5 x^-0.5 is not integrable at the origin.
    m = WeightedModel(weibull(1.0, 0.5), power_weight(-0.75))
    with pytest.raises(DivergenceError):
        mean_triple(m, 1.0, method)


@pytest.mark.parametrize("hname", list(HAZARDS))
def test_constant_weight_reduces_to_plain_means(hname):
    hz = HAZARDS[hname]
    m = unweighted(hz)
    for x in abscissae(hz, 5):
        t = mean_triple(m, float(x))
        lo = hz.lo
        A = float(hz.H(x)) / (x - lo)
        assert t.afr == pytest.approx(A, rel=1e-10)


def test_small_x_limit():
    for hz in (exponential(0.8), weibull(2.0, 1.0), additive_weibull(1.0, 1.0, 1.0, 2.0)):
        m = WeightedModel(hz, power_weight(1.0))
        h0 = float(hz.h(1e-12))
        assert wafr(m, 1e-6) == pytest.approx(h0, rel=1e-3)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.1, 5.0))
def test_weighted_survival_in_unit_interval_and_decreasing(alpha, beta, x):
    m = WeightedModel(weibull(alpha, beta), exponential_weight(-1.0))
    s1 = weighted_survival(m, x)
    s2 = weighted_survival(m, x * 1.5)
    assert 0.0 <= s2 <= s1 <= 1.0


# -- validity postulates ----------------------------------------------------

def test_postulates_proper_model():
    rep = check_validity_postulates(WeightedModel(weibull(1.0, 2.0)), 5.0)
    assert rep.nonnegative and rep.finite_on_horizon
    assert rep.divergence == "likely-divergent" and not rep.defective
    assert rep.infinite_propagation == "not-checkable"
    assert check_validity_postulates(WeightedModel(exponential(1.0)), 5.0).all_pass


def test_postulates_defective_model():
    rep = check_validity_postulates(WeightedModel(weibull(1.0, 2.0), exponential_weight(-1.0)), 5.0)
    assert rep.divergence == "likely-convergent" and rep.defective
    # K(infinity) = alpha beta gamma(beta) / m^beta = 2, so the survival floor is e^-2.
    assert rep.cumulative[-1] == pytest.approx(2.0, rel=1e-9)


def test_degenerate_inputs():
    with pytest.raises(ValidationError):
        mean_triple(WeightedModel(weibull(1.0, 2.0)), 0.0)
    with pytest.raises(ValidationError):
        mean_triple(WeightedModel(weibull(1.0, 2.0)), 1.0, method="magic")
