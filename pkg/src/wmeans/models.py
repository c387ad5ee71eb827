"""Parametric hazard models, weight functions and the monotonicity scanner.

Every evaluator is vectorised: it accepts a float or an ndarray and returns
the same shape. Models are immutable once built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, ValidationError
from .quadrature import DEFAULT as QUAD_DEFAULT
from .quadrature import QuadratureConfig, integrate

INCREASING = "increasing"
DECREASING = "decreasing"
CONSTANT = "constant"
UNKNOWN = "unknown"
NON_MONOTONE = "non_monotone"


def _arr(x):
    return np.asarray(x, dtype=float)


def _out(y):
    y = np.asarray(y, dtype=float)
    return float(y) if y.ndim == 0 else y


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValidationError(f"{name} must be > 0, got {value}")
    return value


# ---------------------------------------------------------------------------
# Hazard models
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HazardModel:
    """A lifetime model given by its hazard ``h`` and cumulative hazard ``H``.

    ``support`` is ``(lo, hi)``; the hazard is zero below ``lo``. When
    ``hi`` is finite, evaluations at or beyond it are clamped to
    ``hi - 1e-12 * (hi - lo)``. ``direction`` is the analytic monotonicity
    of ``h`` on the support (``unknown`` when it depends on parameters in a
    way that is not simply monotone).
    """

    family: str
    params: dict
    hazard_fn: Callable = field(repr=False)
    cum_hazard_fn: Optional[Callable] = field(default=None, repr=False)
    support: tuple = (0.0, math.inf)
    direction: str = UNKNOWN
    base: Optional["HazardModel"] = None

    @property
    def lo(self) -> float:
        return self.support[0]

    @property
    def hi(self) -> float:
        return self.support[1]

    def clamp(self, x):
        x = _arr(x)
        lo, hi = self.support
        if math.isfinite(hi):
            x = np.minimum(x, hi - 1e-12 * (hi - lo))
        return x

    def h(self, x):
        x = self.clamp(x)
        with np.errstate(all="ignore"):
            y = np.where(x < self.lo, 0.0, self.hazard_fn(np.maximum(x, self.lo)))
        return _out(y)

    def H(self, x):
        x = self.clamp(x)
        if self.cum_hazard_fn is not None:
            with np.errstate(all="ignore"):
                y = np.where(x <= self.lo, 0.0, self.cum_hazard_fn(np.maximum(x, self.lo)))
            return _out(y)
        flat = np.atleast_1d(x).ravel()
        vals = np.array([0.0 if v <= self.lo else integrate(self.hazard_fn, self.lo, v).value
                         for v in flat])
        return _out(vals.reshape(np.shape(x)))

    def survival(self, x):
        return _out(np.exp(-_arr(self.H(x))))

    def density(self, x):
        return _out(_arr(self.h(x)) * _arr(self.survival(x)))

    def cdf(self, x):
        return _out(-np.expm1(-_arr(self.H(x))))

    def quantile(self, u):
        """Inverse of the cdf by bracketed root finding on ``H(x) = -ln(1-u)``."""
        return invert_cum_hazard(self, u)

    def to_dict(self) -> dict:
        d = {"family": self.family}
        for k, v in self.params.items():
            d[k] = v.to_dict() if isinstance(v, HazardModel) else v
        return d


def invert_cum_hazard(model: HazardModel, u, xtol=1e-14):
    """Solve ``H(x) = -log(1-u)`` for x; vectorised over ``u``."""
    u_arr = np.atleast_1d(_arr(u))
    out = np.empty_like(u_arr)
    for i, ui in enumerate(u_arr):
        if not 0.0 <= ui < 1.0:
            raise ValidationError(f"quantile level must lie in [0, 1), got {ui}")
        if ui == 0.0:
            out[i] = model.lo
            continue
        target = -math.log1p(-ui)
        lo = model.lo
        hi_sup = model.hi
        if math.isfinite(hi_sup):
            hi = hi_sup - 1e-12 * (hi_sup - lo)
            if model.H(hi) < target:
                raise ValidationError(f"level {ui} not reached inside the support")
        else:
            hi = lo + 1.0
            while model.H(hi) < target:
                hi = lo + 2.0 * (hi - lo)
                if hi > 1e300:
                    raise ValidationError(
                        f"cumulative hazard stays below {target} (defective distribution)")
        out[i] = brentq(lambda x: model.H(x) - target, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps,
                        maxiter=500)
    return _out(out.reshape(np.shape(u))) if np.ndim(u) else float(out[0])


def exponential(lam: float) -> HazardModel:
    lam = _positive("lambda", lam)
    return HazardModel(
        "exponential", {"lambda": lam},
        lambda x: np.full_like(x, lam), lambda x: lam * x,
        direction=CONSTANT,
    )


def weibull(alpha: float, beta: float) -> HazardModel:
    """h(x) = alpha * beta * x^(beta-1), H(x) = alpha * x^beta."""
    alpha = _positive("alpha", alpha)
    beta = _positive("beta", beta)
    direction = INCREASING if beta > 1 else DECREASING if beta < 1 else CONSTANT
    return HazardModel(
        "weibull", {"alpha": alpha, "beta": beta},
        lambda x: alpha * beta * x ** (beta - 1.0), lambda x: alpha * x ** beta,
        direction=direction,
    )


def additive_weibull(alpha: float, theta: float, beta: float, gamma: float) -> HazardModel:
    alpha, theta = _positive("alpha", alpha), _positive("theta", theta)
    beta, gamma = _positive("beta", beta), _positive("gamma", gamma)
    if theta >= 1 and gamma >= 1:
        direction = CONSTANT if theta == gamma == 1 else INCREASING
    elif theta <= 1 and gamma <= 1:
        direction = DECREASING
    else:
        direction = UNKNOWN
    return HazardModel(
        "additive_weibull", {"alpha": alpha, "theta": theta, "beta": beta, "gamma": gamma},
        lambda x: alpha * theta * x ** (theta - 1.0) + beta * gamma * x ** (gamma - 1.0),
        lambda x: alpha * x ** theta + beta * x ** gamma,
        direction=direction,
    )


def kies(a: float, b: float, lam: float, beta: float) -> HazardModel:
    """Four-parameter Weibull on [a, b): S(t) = exp(-lam * ((t-a)/(b-t))^beta)."""
    a, b = float(a), float(b)
    if not (0 <= a < b and math.isfinite(b)):
        raise ValidationError(f"kies needs 0 <= a < b < inf, got a={a}, b={b}")
    lam, beta = _positive("lambda", lam), _positive("beta", beta)
    span = b - a

    def hazard(t):
        return lam * beta * span * (t - a) ** (beta - 1.0) / (b - t) ** (beta + 1.0)

    def cum(t):
        return lam * ((t - a) / (b - t)) ** beta

    return HazardModel(
        "kies", {"a": a, "b": b, "lambda": lam, "beta": beta}, hazard, cum,
        support=(a, b), direction=INCREASING if beta >= 1 else NON_MONOTONE,
    )


def pareto_one(alpha: float) -> HazardModel:
    """Pareto I with scale and shape both ``alpha``: Q(u) = alpha (1-u)^(-1/alpha)."""
    alpha = _positive("alpha", alpha)
    return HazardModel(
        "pareto_one", {"alpha": alpha},
        lambda x: alpha / x, lambda x: alpha * np.log(x / alpha),
        support=(alpha, math.inf), direction=DECREASING,
    )


def marshall_olkin(base: HazardModel, alpha: float) -> HazardModel:
    """Tilted model with h(x) = h_G(x) / (1 - (1-alpha) S_G(x))."""
    alpha = _positive("alpha", alpha)
    abar = 1.0 - alpha

    def hazard(x):
        return base.hazard_fn(x) / (1.0 - abar * np.exp(-_arr(base.H(x))))

    def cum(x):
        hg = _arr(base.H(x))
        return -math.log(alpha) + hg + np.log1p(-abar * np.exp(-hg))

    if alpha == 1.0:
        direction = base.direction
    elif base.direction in (INCREASING, CONSTANT) and alpha > 1:
        direction = INCREASING
    elif base.direction in (DECREASING, CONSTANT) and alpha < 1:
        direction = DECREASING
    else:
        direction = UNKNOWN
    return HazardModel(
        "marshall_olkin", {"base": base, "alpha": alpha}, hazard, cum,
        support=base.support, direction=direction, base=base,
    )


def custom_hazard(hazard_fn, cum_hazard_fn=None, support=(0.0, math.inf), direction=UNKNOWN,
                  family="custom", params=None) -> HazardModel:
    return HazardModel(family, dict(params or {}), hazard_fn, cum_hazard_fn, tuple(support), direction)


_HAZARD_BUILDERS = {
    "exponential": (exponential, ("lambda",)),
    "weibull": (weibull, ("alpha", "beta")),
    "additive_weibull": (additive_weibull, ("alpha", "theta", "beta", "gamma")),
    "kies": (kies, ("a", "b", "lambda", "beta")),
    "pareto_one": (pareto_one, ("alpha",)),
}


def make_hazard(spec: dict) -> HazardModel:
    """Build a HazardModel from ``{"family": ..., <params>}``."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ValidationError("hazard spec must be an object with a 'family' field")
    family = spec["family"]
    if family == "marshall_olkin":
        if "base" not in spec:
            raise ValidationError("marshall_olkin needs a 'base' hazard spec")
        tilt = spec.get("alpha", spec.get("tilt"))
        if tilt is None:
            raise ValidationError("marshall_olkin needs the tilt parameter 'alpha'")
        return marshall_olkin(make_hazard(spec["base"]), tilt)
    if family not in _HAZARD_BUILDERS:
        raise ValidationError(f"unknown hazard family {family!r}")
    builder, names = _HAZARD_BUILDERS[family]
    missing = [n for n in names if n not in spec]
    if missing:
        raise ValidationError(f"{family} is missing parameter(s) {missing}")
    try:
        return builder(*(float(spec[n]) for n in names))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"{family}: {exc}") from exc


# ---------------------------------------------------------------------------
# Weight functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Non-negative weight ``w`` with cumulative ``W(x) = int_0^x w``.

    ``cum_fn`` is the closed-form cumulative when one exists; otherwise
    ``cumulative`` falls back to quadrature.
    """

    family: str
    params: dict
    weight_fn: Callable = field(repr=False)
    cum_fn: Optional[Callable] = field(default=None, repr=False)
    direction: str = UNKNOWN
    quad: QuadratureConfig = field(default=QUAD_DEFAULT, repr=False)

    def w(self, x):
        with np.errstate(all="ignore"):
            return _out(self.weight_fn(_arr(x)))

    def __call__(self, x):
        return self.w(x)

    @property
    def has_closed_cumulative(self) -> bool:
        return self.cum_fn is not None

    def cumulative(self, x):
        if self.cum_fn is not None:
            with np.errstate(all="ignore"):
                return _out(self.cum_fn(_arr(x)))
        flat = np.atleast_1d(_arr(x)).ravel()
        vals = np.array([integrate(self.weight_fn, 0.0, v, self.quad).value if v > 0 else 0.0
                         for v in flat])
        return _out(vals.reshape(np.shape(x)))

    W = cumulative

    def to_dict(self) -> dict:
        d = {"family": self.family}
        for k, v in self.params.items():
            if isinstance(v, HazardModel):
                d[k] = v.to_dict()
            elif isinstance(v, np.ndarray):
                d[k] = v.tolist()
            else:
                d[k] = v
        return d


def constant_weight() -> WeightFunction:
    return WeightFunction("constant", {}, lambda x: np.ones_like(x), lambda x: x, CONSTANT)


def power_weight(c: float) -> WeightFunction:
    """Size-biased weight w(x) = x^c; c > -1 keeps W finite near 0."""
    c = float(c)
    if not c > -1:
        raise ValidationError(f"weight not locally integrable at 0 (power c={c} <= -1)")
    direction = INCREASING if c > 0 else DECREASING if c < 0 else CONSTANT
    return WeightFunction("power", {"c": c}, lambda x: x ** c,
                          lambda x: x ** (c + 1.0) / (c + 1.0), direction)


def exponential_weight(n: float) -> WeightFunction:
    n = float(n)
    if n == 0.0:
        return WeightFunction("exponential", {"n": n}, lambda x: np.ones_like(x), lambda x: x, CONSTANT)
    direction = INCREASING if n > 0 else DECREASING
    return WeightFunction("exponential", {"n": n}, lambda x: np.exp(n * x),
                          lambda x: np.expm1(n * x) / n, direction)


def one_minus_exponential_weight(n: float) -> WeightFunction:
    n = float(n)
    if not n < 0:
        raise ValidationError(f"one_minus_exponential needs n < 0, got n={n}")
    return WeightFunction("one_minus_exponential", {"n": n}, lambda x: -np.expm1(n * x),
                          lambda x: x - np.expm1(n * x) / n, INCREASING)


def marshall_olkin_weight(base: HazardModel, alpha: float) -> WeightFunction:
    """Tilt weight w(x) = 1 / (1 - (1-alpha) S_G(x))."""
    alpha = _positive("alpha", alpha)
    abar = 1.0 - alpha
    direction = DECREASING if alpha < 1 else INCREASING if alpha > 1 else CONSTANT
    return WeightFunction("marshall_olkin_tilt", {"base": base, "alpha": alpha},
                          lambda x: 1.0 / (1.0 - abar * np.exp(-_arr(base.H(x)))), None, direction)


def kies_ratio_weight(a: float, b: float) -> WeightFunction:
    """w(t) = (t-a)/(b-t) on [a, b), zero below a, clamped just short of b."""
    a, b = float(a), float(b)
    if not 0 <= a < b:
        raise ValidationError(f"kies_ratio needs 0 <= a < b, got a={a}, b={b}")
    span = b - a
    edge = b - 1e-12 * span

    def weight(t):
        t = np.minimum(t, edge)
        return np.where(t <= a, 0.0, (t - a) / (b - t))

    def cum(t):
        t = np.minimum(np.maximum(t, a), edge)
        return -(t - a) + span * np.log(span / (b - t))

    return WeightFunction("kies_ratio", {"a": a, "b": b}, weight, cum, INCREASING)


def tabulated_weight(grid, values) -> WeightFunction:
    """Piecewise-linear weight through ``(grid, values)``, constant beyond the ends."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
        raise ValidationError("tabulated weight needs matching 1-D grid and values (>= 2 points)")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("tabulated weight grid must be strictly ascending")
    if grid[0] < 0 or np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ValidationError("tabulated weight needs grid >= 0 and finite values >= 0")
    steps = np.diff(values)
    if np.all(steps == 0):
        direction = CONSTANT
    elif np.all(steps >= 0):
        direction = INCREASING
    elif np.all(steps <= 0):
        direction = DECREASING
    else:
        direction = UNKNOWN
    knots_cum = np.concatenate([[grid[0] * values[0]],
                                grid[0] * values[0] + np.cumsum(0.5 * np.diff(grid) * (values[1:] + values[:-1]))])

    def weight(x):
        return np.interp(x, grid, values)

    def cum(x):
        x = np.asarray(x, dtype=float)
        below = x <= grid[0]
        above = x >= grid[-1]
        idx = np.clip(np.searchsorted(grid, x) - 1, 0, grid.size - 2)
        xl = grid[idx]
        wl = values[idx]
        wx = np.interp(x, grid, values)
        inner = knots_cum[idx] + 0.5 * (x - xl) * (wl + wx)
        return np.where(below, x * values[0],
                        np.where(above, knots_cum[-1] + (x - grid[-1]) * values[-1], inner))

    return WeightFunction("tabulated", {"grid": grid, "values": values}, weight, cum, direction)


def custom_weight(weight_fn, cum_fn=None, direction=UNKNOWN, family="custom", params=None) -> WeightFunction:
    return WeightFunction(family, dict(params or {}), weight_fn, cum_fn, direction)


def make_weight(spec: Optional[dict]) -> WeightFunction:
    """Build a WeightFunction from ``{"family": ..., <params>}``; ``None`` means constant."""
    if spec is None:
        return constant_weight()
    if not isinstance(spec, dict) or "family" not in spec:
        raise ValidationError("weight spec must be an object with a 'family' field")
    family = spec["family"]
    try:
        if family == "constant":
            return constant_weight()
        if family == "power":
            return power_weight(spec["c"])
        if family == "exponential":
            return exponential_weight(spec["n"])
        if family == "one_minus_exponential":
            return one_minus_exponential_weight(spec["n"])
        if family == "marshall_olkin_tilt":
            return marshall_olkin_weight(make_hazard(spec["base"]), spec.get("alpha", spec.get("tilt")))
        if family == "kies_ratio":
            return kies_ratio_weight(spec["a"], spec["b"])
        if family == "tabulated":
            return tabulated_weight(spec["grid"], spec["values"])
    except KeyError as exc:
        raise ValidationError(f"{family} weight is missing parameter {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise ValidationError(f"{family} weight: {exc}") from exc
    raise ValidationError(f"unknown weight family {family!r}")


# ---------------------------------------------------------------------------
# Monotonicity scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneVerdict:
    label: str
    change_points: tuple
    grid_used: np.ndarray = field(repr=False)

    @property
    def interval(self):
        return float(self.grid_used[0]), float(self.grid_used[-1])

    def to_dict(self) -> dict:
        return {"label": self.label, "change_points": [float(c) for c in self.change_points],
                "interval": list(self.interval), "grid_size": int(self.grid_used.size)}


def _evaluate(f, x):
    try:
        with np.errstate(all="ignore"):
            y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(v))) for v in x])


def _signs(y, t, dead_band):
    n = y.size
    d = np.empty(n)
    d[1:-1] = (y[2:] - y[:-2]) / (t[2:] - t[:-2])
    d[0] = (y[1] - y[0]) / (t[1] - t[0])
    d[-1] = (y[-1] - y[-2]) / (t[-1] - t[-2])
    s = np.sign(d)
    s[np.abs(d) <= dead_band * (1.0 + np.abs(y))] = 0
    return s


def scan_monotonicity(f: Callable, interval, grid_size: int = 200, dead_band: float = 1e-9,
                      values=None) -> MonotoneVerdict:
    """Classify ``f`` on ``interval`` from the sign pattern of central differences.

    Differences are taken with respect to the interval rescaled to [0, 1];
    slopes below ``dead_band * (1 + |f|)`` count as flat. Sign flips are
    refined by bisection to a bracket of width ``(hi - lo) / 1e6``.
    ``values`` may carry f on the grid when it is already known.
    """
    if grid_size < 16:
        raise ValidationError(f"grid_size must be >= 16, got {grid_size}")
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValidationError(f"scan interval must have lo < hi, got [{lo}, {hi}]")
    x = np.linspace(lo, hi, grid_size)
    y = _evaluate(f, x) if values is None else np.asarray(values, dtype=float)
    if y.shape != x.shape:
        raise ValidationError("values must match the scan grid")
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise DomainError(f"function is not finite at x={bad!r} during monotonicity scan")
    span = hi - lo
    t = (x - lo) / span
    s = _signs(y, t, dead_band)
    nz = np.flatnonzero(s)
    if nz.size == 0:
        return MonotoneVerdict(CONSTANT, (), x)
    flips = [(nz[k], nz[k + 1]) for k in range(nz.size - 1) if s[nz[k]] != s[nz[k + 1]]]
    if not flips:
        return MonotoneVerdict(INCREASING if s[nz[0]] > 0 else DECREASING, (), x)
    step = 1e-4 * span

    def slope_sign(xm):
        a, b = max(xm - step, lo), min(xm + step, hi)
        fa, fb = float(f(a)), float(f(b))
        d = (fb - fa) / ((b - a) / span)
        if abs(d) <= dead_band * (1.0 + abs(float(f(xm)))):
            return 0
        return 1 if d > 0 else -1

    points = []
    for i, j in flips:
        a, b = x[i], x[j]
        sa = s[i]
        while b - a > span * 1e-6:
            m = 0.5 * (a + b)
            sm = slope_sign(m)
            if sm == 0:
                a = b = m
                break
            if sm == sa:
                a = m
            else:
                b = m
        cp = 0.5 * (a + b)
        if lo < cp < hi:
            points.append(float(cp))
    return MonotoneVerdict(NON_MONOTONE, tuple(points), x)
