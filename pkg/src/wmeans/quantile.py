"""Quantile-side means of the hazard.

With quantile function Q, quantile density q = Q' and hazard quantile
h_q(u) = 1 / ((1-u) q(u)):

    QA(u) = -ln(1-u) / D(u)
    QG(u) = exp( int_0^u q ln h_q / D(u) )
    QH(u) = D(u) / int_0^u (1-p) q(p)^2 dp

The denominator D is Q(u) in "paper" mode and Q(u) - Q(0) in
"weighted-consistent" mode; the latter is what the weighted means give
with weight q and hazard h_q on [0, 1). The two differ only when Q(0) != 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateError, DivergenceError, ValidationError
from .models import HazardModel, custom_hazard, custom_weight, scan_monotonicity
from .quadrature import DEFAULT as QUAD_DEFAULT
from .quadrature import QuadratureConfig, integrate
from .weighted import DIVERGENT, WeightedModel, mean_triple, wafr

PAPER = "paper"
WEIGHTED = "weighted-consistent"
MODES = (PAPER, WEIGHTED)

U_GRID = np.linspace(0.01, 0.99, 99)


def _vec(fn):
    def wrapped(u):
        arr = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(fn(arr), dtype=float)
        return float(out) if out.ndim == 0 else out
    return wrapped


def _check_u(u):
    if not 0.0 < u < 1.0:
        raise ValidationError(f"u must lie in (0, 1), got {u}")


@dataclass(frozen=True, eq=False)
class QuantileModel:
    """Quantile function with its density and hazard quantile on [0, 1)."""

    Q_fn: Callable = field(repr=False)
    q_fn: Callable = field(repr=False)
    provenance: str = "closed-form"
    family: str = "custom"
    params: dict = field(default_factory=dict)
    hazard: Optional[HazardModel] = field(default=None, repr=False)
    quad: QuadratureConfig = field(default=QUAD_DEFAULT, repr=False)

    def Q(self, u):
        return _vec(self.Q_fn)(u)

    def q(self, u):
        return _vec(self.q_fn)(u)

    def h_q(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            out = 1.0 / ((1.0 - u) * np.asarray(self.q_fn(u), dtype=float))
        return float(out) if out.ndim == 0 else out

    @property
    def Q0(self) -> float:
        return float(self.Q(0.0))

    def denominator(self, u: float, mode: str = PAPER) -> float:
        if mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        d = float(self.Q(u)) - (self.Q0 if mode == WEIGHTED else 0.0)
        if not d > 0:
            raise DegenerateError(f"quantile denominator vanishes at u={u}")
        return d


def _central_difference(Q):
    def q(u):
        u = np.asarray(u, dtype=float)
        step = 1e-5 * np.minimum(np.maximum(np.minimum(u, 1.0 - u), 1e-6), 0.5)
        return (np.asarray(Q(u + step)) - np.asarray(Q(u - step))) / (2.0 * step)
    return q


def custom_quantile(Q: Callable, q: Optional[Callable] = None, family: str = "custom",
                    params: Optional[dict] = None) -> QuantileModel:
    """Quantile model from Q; q defaults to a central difference scaled to u's distance from {0, 1}."""
    return QuantileModel(Q, q if q is not None else _central_difference(Q), "closed-form",
                         family, dict(params or {}))


def exponential_quantile(lam: float) -> QuantileModel:
    if not lam > 0:
        raise ValidationError("lambda must be > 0")
    return QuantileModel(lambda u: -np.log1p(-u) / lam, lambda u: 1.0 / (lam * (1.0 - u)),
                         "closed-form", "exponential", {"lambda": lam})


def weibull_quantile(lam: float, alpha: float = 1.0) -> QuantileModel:
    """Q(u) = (-ln(1-u) / alpha)^(1/lam), the Weibull with H(x) = alpha x^lam."""
    if not lam > 0 or not alpha > 0:
        raise ValidationError("lam and alpha must be > 0")
    r = 1.0 / lam

    def Q(u):
        return (-np.log1p(-u) / alpha) ** r

    def q(u):
        L = -np.log1p(-u)
        return r * alpha ** (-r) * L ** (r - 1.0) / (1.0 - u)

    return QuantileModel(Q, q, "closed-form", "weibull", {"lam": lam, "alpha": alpha})


def pareto_quantile(alpha: float) -> QuantileModel:
    """Pareto I with scale and shape alpha: Q(u) = alpha (1-u)^(-1/alpha)."""
    if not alpha > 0:
        raise ValidationError("alpha must be > 0")
    c = 1.0 / alpha
    return QuantileModel(lambda u: alpha * (1.0 - u) ** (-c), lambda u: (1.0 - u) ** (-c - 1.0),
                         "closed-form", "pareto_one", {"alpha": alpha})


def quantile_from_hazard(m: HazardModel) -> QuantileModel:
    """Quantile model of a hazard model: closed form for exponential, Weibull
    and Pareto I, bracketed inversion of the cdf otherwise."""
    fam, p = m.family, m.params
    if fam == "exponential":
        qm = exponential_quantile(p["lambda"])
    elif fam == "weibull":
        qm = weibull_quantile(p["beta"], p["alpha"])
    elif fam == "pareto_one":
        qm = pareto_quantile(p["alpha"])
    else:
        if math.isinf(m.hi):
            probe = m.lo + 1e6
            if float(m.H(probe)) < -math.log(1e-12):
                # Check the tail of the cumulative hazard before trusting inversion.
                if float(m.H(m.lo + 1e8)) < -math.log(1e-12):
                    raise ValidationError("defective distribution: survival does not vanish")

        def Q(u):
            return m.quantile(u)

        def q(u):
            u = np.asarray(u, dtype=float)
            return 1.0 / ((1.0 - u) * np.asarray(m.h(m.quantile(u)), dtype=float))

        return QuantileModel(Q, q, "derived-from-hazard", fam, dict(p), m)
    return QuantileModel(qm.Q_fn, qm.q_fn, "closed-form", fam, dict(p), m)


# ---------------------------------------------------------------------------
# Quantile means
# ---------------------------------------------------------------------------

def qa(qm: QuantileModel, u: float, mode: str = PAPER) -> float:
    _check_u(u)
    return -math.log1p(-u) / qm.denominator(u, mode)


def _log_integral(qm, u):
    def f(p):
        qp = np.asarray(qm.q_fn(p), dtype=float)
        return -qp * np.log((1.0 - p) * qp)
    return integrate(f, 0.0, u, qm.quad).value


def qg(qm: QuantileModel, u: float, mode: str = PAPER):
    """QG(u), or DIVERGENT when int q ln h_q diverges at 0."""
    _check_u(u)
    try:
        L = _log_integral(qm, u)
    except DivergenceError:
        return DIVERGENT
    return math.exp(L / qm.denominator(u, mode))


def qh(qm: QuantileModel, u: float, mode: str = PAPER, with_flag: bool = False, form: str = "square"):
    """QH(u); 0 (flagged) when the integral diverges.

    ``form`` picks the integrand: "square" for (1-p) q^2, "ratio" for q / h_q.
    """
    _check_u(u)
    if form == "square":
        def f(p):
            return (1.0 - p) * np.asarray(qm.q_fn(p), dtype=float) ** 2
    elif form == "ratio":
        def f(p):
            qp = np.asarray(qm.q_fn(p), dtype=float)
            return qp / (1.0 / ((1.0 - p) * qp))
    else:
        raise ValidationError("form must be 'square' or 'ratio'")
    try:
        V = integrate(f, 0.0, u, qm.quad).value
        value, flag = qm.denominator(u, mode) / V, False
    except DivergenceError:
        value, flag = 0.0, True
    return (value, flag) if with_flag else value


@dataclass(frozen=True)
class QuantileMeanTriple:
    u: float
    qa: float
    qg: object
    qh: float
    qh_divergent: bool = False
    mode: str = PAPER

    def to_dict(self) -> dict:
        return {"u": self.u, "qa": self.qa,
                "qg": {"divergent": True} if self.qg is DIVERGENT else self.qg,
                "qh": {"divergent": True} if self.qh_divergent else self.qh}


def quantile_means(qm: QuantileModel, u: float, mode: str = PAPER) -> QuantileMeanTriple:
    value, flag = qh(qm, u, mode, with_flag=True)
    return QuantileMeanTriple(u, qa(qm, u, mode), qg(qm, u, mode), value, flag, mode)


def as_weighted_model(qm: QuantileModel) -> WeightedModel:
    """Weighted model on [0, 1) with hazard h_q and weight q."""
    hz = custom_hazard(lambda p: 1.0 / ((1.0 - p) * np.asarray(qm.q_fn(p), dtype=float)),
                       support=(0.0, 1.0), family="hazard_quantile")
    q0 = qm.Q0
    wt = custom_weight(lambda p: np.asarray(qm.q_fn(p), dtype=float),
                       cum_fn=lambda p: np.asarray(qm.Q_fn(p), dtype=float) - q0,
                       family="quantile_density")
    return WeightedModel(hz, wt, qm.quad)


def quantile_means_via_weighted(qm: QuantileModel, u: float, mode: str = PAPER) -> QuantileMeanTriple:
    """The triple from the weighted-means machinery (weight q, hazard h_q).

    That route divides by Q(u) - Q(0); in "paper" mode the results are
    rescaled to the Q(u) denominator.
    """
    _check_u(u)
    t = mean_triple(as_weighted_model(qm), u)
    if mode == WEIGHTED:
        return QuantileMeanTriple(u, t.afr, t.gfr, t.hfr, t.hfr_divergent, mode)
    if mode != PAPER:
        raise ValidationError(f"mode must be one of {MODES}")
    s = (float(qm.Q(u)) - qm.Q0) / float(qm.Q(u))
    g = t.gfr if t.gfr is DIVERGENT else t.gfr ** s
    return QuantileMeanTriple(u, t.afr * s, g, t.hfr / s, t.hfr_divergent, mode)


def pareto_closed_forms(alpha: float, u: float) -> dict:
    """QA, QG, QH of Pareto I in closed form (Q(u) denominator)."""
    t = (1.0 - u) ** (1.0 / alpha)
    return {
        "qa": -t * math.log1p(-u) / alpha,
        "qg": math.exp(1.0 - t) * t,
        "qh": -2.0 * t / ((1.0 - u) ** (2.0 / alpha) - 1.0),
    }


def quantile_verdicts(qm: QuantileModel, interval=(0.01, 0.99), grid_size: int = 99,
                      mode: str = PAPER) -> dict:
    """Monotonicity verdicts of h_q, QA, QG, QH on a u-interval."""
    out = {"h_q": scan_monotonicity(qm.h_q, interval, grid_size)}
    out["QA"] = scan_monotonicity(lambda u: qa(qm, float(u), mode), interval, grid_size)
    g0 = qg(qm, float(interval[0]), mode)
    if g0 is not DIVERGENT:
        out["QG"] = scan_monotonicity(lambda u: qg(qm, float(u), mode), interval, grid_size)
    h0, flag = qh(qm, float(interval[0]), mode, with_flag=True)
    if not flag:
        out["QH"] = scan_monotonicity(lambda u: qh(qm, float(u), mode), interval, grid_size)
    return out


# ---------------------------------------------------------------------------
# Proportional hazards
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PHMReport:
    theta: float
    distribution_gap: float
    quantile_gap: float
    identity_gap: float
    witness_u: float
    x_grid: tuple
    u_grid: tuple

    def to_dict(self) -> dict:
        return {"theta": self.theta, "distribution_gap": self.distribution_gap,
                "quantile_gap": self.quantile_gap, "identity_gap": self.identity_gap,
                "witness_u": self.witness_u}


def phm_transform(qx: QuantileModel, theta: float) -> QuantileModel:
    """Q_Y(u) = Q_X(1 - (1-u)^(1/theta)) for S_Y = S_X^theta."""
    if not theta > 0:
        raise ValidationError("theta must be > 0")
    r = 1.0 / theta

    def v(u):
        return -np.expm1(r * np.log1p(-np.asarray(u, dtype=float)))

    def Q(u):
        return np.asarray(qx.Q_fn(v(u)), dtype=float)

    def q(u):
        u = np.asarray(u, dtype=float)
        return np.asarray(qx.q_fn(v(u)), dtype=float) * r * (1.0 - u) ** (r - 1.0)

    hazard = None
    if qx.hazard is not None:
        base = qx.hazard
        hazard = custom_hazard(lambda x: theta * np.asarray(base.hazard_fn(x)),
                               (lambda x: theta * np.asarray(base.cum_hazard_fn(x)))
                               if base.cum_hazard_fn is not None else None,
                               support=base.support, family="phm", params={"theta": theta})
    return QuantileModel(Q, q, qx.provenance, "phm", {"theta": theta, "base": qx.family}, hazard, qx.quad)


def phm_quantile(qx: QuantileModel, theta: float, u_grid: Sequence[float] = U_GRID,
                 x_grid: Optional[Sequence[float]] = None, mode: str = PAPER):
    """Y under proportional hazards, plus the distribution/quantile comparison.

    ``distribution_gap`` is max |A_Y - theta A_X| / (theta A_X) over
    ``x_grid`` (A_Y by quadrature of theta h_X, A_X by the default route);
    ``quantile_gap`` is max |QA_Y(u) - theta QA_X(u)|; ``identity_gap`` is
    max |QA_Y(u) - theta QA_X(1 - (1-u)^(1/theta))|.
    """
    qy = phm_transform(qx, theta)
    u_grid = np.asarray(u_grid, dtype=float)
    qa_y = np.array([qa(qy, float(u), mode) for u in u_grid])
    qa_x = np.array([qa(qx, float(u), mode) for u in u_grid])
    v = -np.expm1(np.log1p(-u_grid) / theta)
    qa_xv = np.array([qa(qx, float(t), mode) for t in v])
    gaps = np.abs(qa_y - theta * qa_x)
    identity = float(np.max(np.abs(qa_y - theta * qa_xv)))
    dist_gap = math.nan
    xs = ()
    if qx.hazard is not None:
        base = qx.hazard
        if x_grid is None:
            x_grid = np.asarray(base.quantile(np.linspace(0.05, 0.95, 10)), dtype=float)
        xs = tuple(float(x) for x in x_grid)
        y_model = WeightedModel(custom_hazard(lambda x: theta * np.asarray(base.hazard_fn(x)),
                                              support=base.support), quad=qx.quad)
        x_model = WeightedModel(base, quad=qx.quad)
        rel = [abs(wafr(y_model, x, "quadrature") - theta * wafr(x_model, x)) / (theta * wafr(x_model, x))
               for x in xs]
        dist_gap = float(max(rel))
    i = int(np.argmax(gaps))
    report = PHMReport(theta, dist_gap, float(gaps[i]), identity, float(u_grid[i]), xs, tuple(u_grid))
    return qy, report


# ---------------------------------------------------------------------------
# Monotone transformations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TransformedQuantile:
    """Quantile model of T(X): Q_T = T(Q_X), q_T = T'(Q_X) q_X."""

    model: QuantileModel
    mode: str = PAPER

    def qa(self, u):
        return qa(self.model, u, self.mode)

    def qg(self, u):
        return qg(self.model, u, self.mode)

    def qh(self, u):
        return qh(self.model, u, self.mode)

    def triple(self, u) -> QuantileMeanTriple:
        return quantile_means(self.model, u, self.mode)


def transform_quantile(qx: QuantileModel, T: Callable, T_prime: Callable, mode: str = PAPER,
                       check_grid: Sequence[float] = U_GRID) -> TransformedQuantile:
    """Quantile means of T(X) for a continuous non-decreasing invertible T."""
    xs = np.asarray(qx.Q(np.asarray(check_grid, dtype=float)), dtype=float)
    with np.errstate(all="ignore"):
        slopes = np.asarray(T_prime(xs), dtype=float)
    if np.any(slopes < 0) or not np.all(np.isfinite(slopes)):
        raise ValidationError("transformation must be non-decreasing (T' >= 0) on the range of Q_X")

    def Q(u):
        return T(np.asarray(qx.Q_fn(u), dtype=float))

    def q(u):
        return T_prime(np.asarray(qx.Q_fn(u), dtype=float)) * np.asarray(qx.q_fn(u), dtype=float)

    model = QuantileModel(Q, q, qx.provenance, "transformed", {"base": qx.family}, None, qx.quad)
    return TransformedQuantile(model, mode)


# ---------------------------------------------------------------------------
# Quantile functions from proportional means
# ---------------------------------------------------------------------------

def recover_quantile_from_proportionality(which: str, ratio: float, k: float, A_const: float = 1.0,
                                          enable_h: bool = False) -> QuantileModel:
    """Q with QA = a h_q ("A"), QG = b h_q ("G") or QH = c h_q ("H").

    A: Q = (1/(a k))^a  ln(A/(1-u))^a
    G: Q = (s/k)^(1/s)  ln(A/(1-u))^(1/s), s = ln(e/b)
    H: Q = ((2-c) (k c)^(1-c) ln(A/(1-u)))^(1/(2-c)), only with ``enable_h``
    The proportionality holds exactly when A_const = 1 (so Q(0) = 0).
    """
    if not (ratio > 0 and k > 0 and A_const > 0):
        raise ValidationError("ratio, k and A_const must be > 0")
    if which == "A":
        a = ratio
        const = (1.0 / (a * k)) ** a
        power = a
    elif which == "G":
        s = math.log(math.e / ratio)
        if not s > 0:
            raise ValidationError("G recovery needs b < e")
        const = (s / k) ** (1.0 / s)
        power = 1.0 / s
    elif which == "H":
        if not enable_h:
            raise ValidationError("H recovery is disabled; pass enable_h=True to use the derived form")
        c = ratio
        if not c < 2:
            raise ValidationError("H recovery needs c < 2")
        power = 1.0 / (2.0 - c)
        const = ((2.0 - c) * (k * c) ** (1.0 - c)) ** power
    else:
        raise ValidationError("which must be 'A', 'G' or 'H'")
    logA = math.log(A_const)

    def Q(u):
        return const * (logA - np.log1p(-np.asarray(u, dtype=float))) ** power

    def q(u):
        u = np.asarray(u, dtype=float)
        L = logA - np.log1p(-u)
        return const * power * L ** (power - 1.0) / (1.0 - u)

    return QuantileModel(Q, q, "closed-form", f"proportional_{which}",
                         {"ratio": ratio, "k": k, "A_const": A_const})
