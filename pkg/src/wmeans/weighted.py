"""Weighted arithmetic, geometric and harmonic mean failure rates.

For a hazard h and weight w on [lo, x] (lo is the lower end of the
hazard's support, 0 for every family except Kies and Pareto I):

    A^w(x) = int w h / int w
    G^w(x) = exp(int w ln h / int w)
    H^w(x) = int w / int (w / h)

and the weighted lifetime has hazard w h and survival exp(-int w h).
Setting w = 1 gives the unweighted means A, G, H.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import special
from .errors import AccuracyError, DegenerateError, DivergenceError, DomainError, ValidationError
from .models import HazardModel, WeightFunction, constant_weight
from .quadrature import DEFAULT as QUAD_DEFAULT
from .quadrature import QuadratureConfig, integrate, integrate_to_grid


class Sentinel(enum.Enum):
    DIVERGENT = "undefined-divergent"

    def __repr__(self):
        return "DIVERGENT"


DIVERGENT = Sentinel.DIVERGENT

METHODS = ("auto", "closed", "quadrature")


@dataclass(frozen=True, eq=False)
class WeightedModel:
    hazard: HazardModel
    weight: WeightFunction = field(default_factory=constant_weight)
    quad: QuadratureConfig = field(default=QUAD_DEFAULT, repr=False)

    @property
    def lo(self) -> float:
        return self.hazard.lo

    def w(self, x):
        return self.weight.w(x)

    def h(self, x):
        return self.hazard.h(x)

    def weighted_hazard(self, x):
        """h^w(x) = w(x) h(x)."""
        with np.errstate(all="ignore"):
            return np.asarray(self.weight.w(x)) * np.asarray(self.hazard.h(x))

    def weight_mass(self, x) -> float:
        """W(x) = int_lo^x w."""
        if x <= self.lo:
            return 0.0
        if self.weight.has_closed_cumulative:
            return float(self.weight.cumulative(x) - self.weight.cumulative(self.lo))
        return integrate(self.weight.weight_fn, self.lo, x, self.quad).value

    def cumulative_weighted_hazard(self, x, method: str = "auto") -> float:
        """K(x) = int_lo^x w h."""
        return mean_integrals(self, x, method=method, which=("hazard",)).hazard_mass

    def reweighted(self, power: float = 1.0) -> "WeightedModel":
        """Model with hazard w^power * h and the same weight (sequence weighting)."""
        from .models import custom_hazard

        w_fn, h_fn = self.weight.weight_fn, self.hazard.hazard_fn
        hz = custom_hazard(lambda x: w_fn(x) ** power * h_fn(x), support=self.hazard.support,
                           family="reweighted", params={"power": power})
        return WeightedModel(hz, self.weight, self.quad)


def unweighted(model: HazardModel, quad: QuadratureConfig = QUAD_DEFAULT) -> WeightedModel:
    return WeightedModel(model, constant_weight(), quad)


@dataclass(frozen=True)
class MeanIntegrals:
    """The four integrals behind the three means at abscissa ``x``.

    ``log_mass`` is None when int w ln h diverges; ``inverse_mass`` is inf
    when int w/h diverges.
    """

    x: float
    weight_mass: float
    hazard_mass: float = math.nan
    log_mass: Optional[float] = math.nan
    inverse_mass: float = math.nan


@dataclass(frozen=True)
class MeanTriple:
    x: float
    afr: float
    gfr: object
    hfr: float
    hfr_divergent: bool = False

    @property
    def all_finite(self) -> bool:
        return (self.gfr is not DIVERGENT and not self.hfr_divergent
                and all(math.isfinite(v) and v > 0 for v in (self.afr, self.gfr, self.hfr)))

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "afr": self.afr,
            "gfr": {"divergent": True} if self.gfr is DIVERGENT else self.gfr,
            "hfr": {"divergent": True} if self.hfr_divergent else self.hfr,
        }


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def _closed_integrals(m: WeightedModel, x: float):
    """Closed-form (W, int wh, int w ln h, int w/h) or None when no fast path applies.

    Fast paths: constant hazard with any weight that has a closed cumulative,
    and Weibull hazards with constant, power, or decaying exponential weights.
    """
    hz, wt = m.hazard, m.weight
    if hz.family == "exponential" and wt.has_closed_cumulative:
        lam = hz.params["lambda"]
        W = m.weight_mass(x)
        return W, lam * W, W * math.log(lam), W / lam
    if hz.family != "weibull":
        return None
    a, b = hz.params["alpha"], hz.params["beta"]
    lab = math.log(a * b)
    if wt.family == "constant" or (wt.family in ("power", "exponential") and wt.params.get("c", wt.params.get("n")) == 0):
        W = x
        K = a * x ** b
        L = x * lab + (b - 1.0) * (x * math.log(x) - x)
        inv = x ** (2.0 - b) / ((2.0 - b) * a * b) if b < 2 else math.inf
        return W, K, L, inv
    if wt.family == "power":
        c = wt.params["c"]
        if not b + c > 0:
            raise DivergenceError(f"int w h diverges at 0: x^{c:g} times x^{b - 1.0:g} is not integrable",
                                  estimate=math.inf, error=math.inf)
        W = x ** (c + 1.0) / (c + 1.0)
        K = a * b * x ** (b + c) / (b + c)
        L = W * lab + (b - 1.0) * W * (math.log(x) - 1.0 / (c + 1.0))
        p = c + 2.0 - b
        inv = x ** p / (p * a * b) if p > 0 else math.inf
        return W, K, L, inv
    if wt.family == "exponential" and wt.params["n"] < 0:
        mm = -wt.params["n"]
        z = mm * x
        W = -math.expm1(-z) / mm
        K = a * b * mm ** (-b) * special.lower_incomplete_gamma(b, z)
        J = W * math.log(x) - (special.exponential_integral_e1(z) + math.log(z) + special.EULER_GAMMA) / mm
        L = W * lab + (b - 1.0) * J
        inv = mm ** (b - 2.0) * special.lower_incomplete_gamma(2.0 - b, z) / (a * b) if b < 2 else math.inf
        return W, K, L, inv
    return None


def weibull_exponential_weight_forms(alpha: float, beta: float, n: float, x: float) -> dict:
    """Weibull hazard alpha*beta*x^(beta-1) under weight e^(n x), n < 0.

    Returns survival, afr, gfr and hfr written with the incomplete gamma
    pair, E1 and Euler's constant. ``hfr`` is None for beta >= 2, where
    the harmonic mean integral diverges at the origin.
    """
    if not n < 0:
        raise ValidationError("closed forms need n < 0")
    m = -n
    z = m * x
    gam = special.upper_incomplete_gamma
    surv = math.exp(-alpha * beta * m ** (-beta) * (math.gamma(beta) - gam(beta, z)))
    afr = n * m ** (-beta) * alpha * beta * (math.gamma(beta) - gam(beta, z)) / math.expm1(n * x)
    em1 = math.expm1(n * x)
    gfr = (alpha * beta * x ** (beta - 1.0) * z ** ((beta - 1.0) / em1)
           * math.exp((beta - 1.0) * (special.exponential_integral_e1(z) + special.EULER_GAMMA) / em1))
    hfr = None
    if beta < 2:
        hfr = (alpha * beta * em1 * n * x ** beta * z ** (-beta)
               / (math.gamma(2.0 - beta) - gam(2.0 - beta, z)))
    return {"survival": surv, "afr": afr, "gfr": gfr, "hfr": hfr}


# ---------------------------------------------------------------------------
# Integrals by quadrature
# ---------------------------------------------------------------------------

def _integrands(m: WeightedModel):
    w, h = m.weight.weight_fn, m.hazard.hazard_fn

    def wh(u):
        return w(u) * h(u)

    def wlog(u):
        return w(u) * np.log(h(u))

    def winv(u):
        return w(u) / h(u)

    return {"weight": w, "hazard": wh, "log": wlog, "inverse": winv}


def _clamped(m, x):
    return float(m.hazard.clamp(x))


def mean_integrals(m: WeightedModel, x: float, method: str = "auto",
                   which=("hazard", "log", "inverse")) -> MeanIntegrals:
    if method not in METHODS:
        raise ValidationError(f"method must be one of {METHODS}")
    x = _clamped(m, x)
    if not x > m.lo:
        raise ValidationError(f"abscissa must exceed the support start {m.lo}, got {x}")
    if method != "quadrature":
        closed = _closed_integrals(m, x)
        if closed is not None:
            W, K, L, inv = closed
            return MeanIntegrals(x, W, K, L, inv)
        if method == "closed":
            raise ValidationError(f"no closed form for {m.hazard.family} x {m.weight.family}")
    fns = _integrands(m)
    q = m.quad
    W = integrate(fns["weight"], m.lo, x, q).value if method == "quadrature" else m.weight_mass(x)
    out = {"hazard_mass": math.nan, "log_mass": math.nan, "inverse_mass": math.nan}
    if "hazard" in which:
        out["hazard_mass"] = _guarded(integrate, fns["hazard"], m.lo, x, q, "weighted hazard")
    if "log" in which:
        try:
            out["log_mass"] = _guarded(integrate, fns["log"], m.lo, x, q, "weighted log hazard")
        except DivergenceError:
            out["log_mass"] = None
    if "inverse" in which:
        try:
            out["inverse_mass"] = _guarded(integrate, fns["inverse"], m.lo, x, q, "weighted inverse hazard")
        except DivergenceError:
            out["inverse_mass"] = math.inf
    return MeanIntegrals(x, W, **out)


def _guarded(fn, f, a, b, q, what):
    try:
        return fn(f, a, b, q).value
    except DomainError as exc:
        raise DegenerateError(f"{what}: hazard vanishes or blows up inside the interval ({exc})") from exc


def _means_from(I: MeanIntegrals) -> MeanTriple:
    W = I.weight_mass
    if not W > 0:
        raise DegenerateError(f"weight mass is zero on [lo, {I.x}]")
    afr = I.hazard_mass / W
    if I.log_mass is None:
        gfr = DIVERGENT
    elif math.isnan(I.log_mass):
        gfr = math.nan
    else:
        gfr = math.exp(I.log_mass / W)
    if math.isinf(I.inverse_mass):
        hfr, flag = 0.0, True
    else:
        hfr, flag = W / I.inverse_mass, False
    return MeanTriple(I.x, afr, gfr, hfr, flag)


def wafr(m: WeightedModel, x: float, method: str = "auto") -> float:
    """A^w(x), the weighted arithmetic mean failure rate."""
    I = mean_integrals(m, x, method, which=("hazard",))
    if not I.weight_mass > 0:
        raise DegenerateError(f"weight mass is zero on [lo, {x}]")
    return I.hazard_mass / I.weight_mass


def wgfr(m: WeightedModel, x: float, method: str = "auto"):
    """G^w(x); returns DIVERGENT when int w ln h diverges."""
    I = mean_integrals(m, x, method, which=("log",))
    return _means_from(I).gfr


def whfr(m: WeightedModel, x: float, method: str = "auto", with_flag: bool = False):
    """H^w(x); 0.0 when int w/h diverges (flag returned when ``with_flag``)."""
    I = mean_integrals(m, x, method, which=("inverse",))
    t = _means_from(I)
    return (t.hfr, t.hfr_divergent) if with_flag else t.hfr


def mean_triple(m: WeightedModel, x: float, method: str = "auto") -> MeanTriple:
    return _means_from(mean_integrals(m, x, method))


def mean_integrals_grid(m: WeightedModel, grid, method: str = "auto") -> list:
    """MeanIntegrals at every grid point, sharing cumulative panel sums."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0) or grid[0] <= m.lo:
        raise ValidationError("grid must be strictly ascending and above the support start")
    grid = np.asarray(m.hazard.clamp(grid), dtype=float)
    if method != "quadrature":
        closed = [_closed_integrals(m, float(x)) for x in grid]
        if all(c is not None for c in closed):
            return [MeanIntegrals(float(x), *c) for x, c in zip(grid, closed)]
        if method == "closed":
            raise ValidationError(f"no closed form for {m.hazard.family} x {m.weight.family}")
    fns = _integrands(m)
    q = m.quad
    if method == "quadrature" or not m.weight.has_closed_cumulative:
        W = integrate_to_grid(fns["weight"], grid, q, lower=m.lo)
    else:
        W = np.array([m.weight_mass(float(x)) for x in grid])
    K = _cumulative(fns["hazard"], grid, q, m.lo, "weighted hazard")
    L = _cumulative(fns["log"], grid, q, m.lo, "weighted log hazard", diverged=None)
    V = _cumulative(fns["inverse"], grid, q, m.lo, "weighted inverse hazard", diverged=math.inf)
    return [MeanIntegrals(float(x), float(W[i]), float(K[i]),
                          None if L is None else float(L[i]), float(V[i]))
            for i, x in enumerate(grid)]


def _cumulative(f, grid, q, lo, what, diverged="raise"):
    try:
        return integrate_to_grid(f, grid, q, lower=lo)
    except DivergenceError:
        if diverged == "raise":
            raise
        if diverged is None:
            return None
        return np.full(grid.size, diverged)
    except DomainError as exc:
        raise DegenerateError(f"{what}: {exc}") from exc


def mean_triple_grid(m: WeightedModel, grid, method: str = "auto") -> list:
    """MeanTriple at each grid point from a single cumulative sweep."""
    return [_means_from(I) for I in mean_integrals_grid(m, grid, method)]


# ---------------------------------------------------------------------------
# Weighted lifetime and validity
# ---------------------------------------------------------------------------

def weighted_survival(m: WeightedModel, x: float, method: str = "auto") -> float:
    """exp(-int_lo^x w h)."""
    if x <= m.lo:
        return 1.0
    return math.exp(-m.cumulative_weighted_hazard(x, method))


def weighted_hazard(m: WeightedModel, x: float) -> float:
    return float(m.weighted_hazard(x))


def weighted_density(m: WeightedModel, x: float, method: str = "auto") -> float:
    if x < m.lo:
        return 0.0
    return weighted_hazard(m, x) * weighted_survival(m, x, method)


@dataclass(frozen=True)
class ValidityReport:
    """Evidence for the four survival postulates on a finite horizon.

    ``divergence`` is a heuristic ("likely-divergent" / "likely-convergent"),
    never a proof; ``infinite_propagation`` is always "not-checkable".
    """

    nonnegative: bool
    finite_on_horizon: bool
    divergence: str
    infinite_propagation: str
    defective: bool
    probes: tuple
    cumulative: tuple

    @property
    def all_pass(self) -> bool:
        return self.nonnegative and self.finite_on_horizon and self.divergence == "likely-divergent"

    def to_dict(self) -> dict:
        return {
            "nonnegative": self.nonnegative,
            "finite_on_horizon": self.finite_on_horizon,
            "divergence": self.divergence,
            "infinite_propagation": self.infinite_propagation,
            "defective": self.defective,
            "probes": list(self.probes),
            "cumulative": list(self.cumulative),
        }


def check_validity_postulates(m: WeightedModel, horizon: float, grid_size: int = 200) -> ValidityReport:
    if not horizon > 0:
        raise ValidationError("horizon must be > 0")
    lo = m.lo
    xs = np.linspace(lo, lo + horizon, grid_size)[1:]
    xs = np.asarray(m.hazard.clamp(xs))
    with np.errstate(all="ignore"):
        wv = np.asarray(m.weight.w(xs))
        hv = np.asarray(m.hazard.h(xs))
    nonneg = bool(np.all(wv >= 0) and np.all(hv >= 0))
    try:
        k_h = m.cumulative_weighted_hazard(lo + horizon)
        finite = math.isfinite(k_h)
    except AccuracyError:
        finite = False
    probes = [float(m.hazard.clamp(lo + horizon * 2.0 ** k)) for k in range(7)]
    probes = sorted(set(probes))
    ks = []
    for p in probes:
        try:
            ks.append(m.cumulative_weighted_hazard(p))
        except AccuracyError:
            ks.append(math.inf)
    incs = np.diff(ks)
    monotone = bool(np.all(incs >= -m.quad.abs_tol))
    if any(math.isinf(k) for k in ks):
        verdict = "likely-divergent"
    elif len(ks) < 2:
        verdict = "likely-divergent" if math.isfinite(m.hazard.hi) else "likely-convergent"
    elif monotone and incs[-1] > max(m.quad.abs_tol, 1e-9 * abs(ks[-1])):
        verdict = "likely-divergent"
    else:
        verdict = "likely-convergent"
    if math.isfinite(m.hazard.hi) and ks and ks[-1] > 30:
        verdict = "likely-divergent"
    return ValidityReport(nonneg, finite, verdict, "not-checkable", verdict == "likely-convergent",
                          tuple(probes), tuple(float(k) for k in ks))
