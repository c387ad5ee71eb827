"""Aging classes built on the weighted means, and the inequalities around them.

Every verdict here is evidence gathered on a finite grid, never a proof.
Reports carry the interval and grid that produced them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import AccuracyError, DegenerateError, DivergenceError, ValidationError
from .models import CONSTANT, DECREASING, INCREASING, UNKNOWN, scan_monotonicity
from .quadrature import integrate
from .weighted import (DIVERGENT, WeightedModel, mean_integrals_grid, mean_triple,
                       unweighted)

GE = ">="
LE = "<="
EQ = "=="

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
SKIPPED = "skipped"

MEASURES = ("h", "A^w", "G^w", "H^w")
_LABELS = {
    "h": ("IFR", "DFR"),
    "A^w": ("Iw-AFR", "Dw-AFR"),
    "G^w": ("Iw-GFR", "Dw-GFR"),
    "H^w": ("Iw-HFR", "Dw-HFR"),
}
INCREASING_CHAIN = ("IFR", "Iw-AFR", "Iw-GFR", "Iw-HFR")
DECREASING_CHAIN = ("DFR", "Dw-HFR", "Dw-GFR", "Dw-AFR")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    """Outcome of one inequality check over a grid.

    ``max_violation`` is the largest amount by which the expected
    inequality is broken (negative when it holds with room to spare).
    A check passes when ``max_violation <= tol * (1 + scale)``.
    """

    comparison: str
    expected: Optional[str]
    max_violation: float = math.nan
    scale: float = 0.0
    status: str = INCONCLUSIVE
    witness: Optional[float] = None
    reason: str = ""
    tol: float = 1e-8
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        return {
            "comparison": self.comparison,
            "expected": self.expected,
            "max_violation": self.max_violation,
            "scale": self.scale,
            "status": self.status,
            "witness": self.witness,
            "reason": self.reason,
            "details": self.details,
        }


def _compare(comparison, expected, xs, lhs, rhs, tol=1e-8, details=None) -> BoundReport:
    """Check ``lhs (expected) rhs`` pointwise; NaN pairs are ignored."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    xs = np.asarray(xs, dtype=float)
    ok = np.isfinite(lhs) & np.isfinite(rhs)
    if not np.any(ok):
        return BoundReport(comparison, expected, status=INCONCLUSIVE,
                           reason="no finite comparison points", details=details or {})
    lhs, rhs, xs = lhs[ok], rhs[ok], xs[ok]
    if expected == GE:
        viol = rhs - lhs
    elif expected == LE:
        viol = lhs - rhs
    else:
        viol = np.abs(lhs - rhs)
    i = int(np.argmax(viol))
    scale = float(np.max(np.maximum(np.abs(lhs), np.abs(rhs))))
    status = PASS if viol[i] <= tol * (1.0 + scale) else FAIL
    d = dict(details or {})
    if not np.all(ok):
        d["skipped_points"] = int(np.size(ok) - np.count_nonzero(ok))
    return BoundReport(comparison, expected, float(viol[i]), scale, status, float(xs[i]), "", tol, d)


def _inconclusive(comparison, reason, expected=None) -> BoundReport:
    return BoundReport(comparison, expected, status=INCONCLUSIVE, reason=reason)


def _skipped(comparison, reason, expected=None) -> BoundReport:
    return BoundReport(comparison, expected, status=SKIPPED, reason=reason)


@dataclass(frozen=True)
class AgingReport:
    """Per-measure monotonicity verdicts and the aging labels they imply.

    ``verdicts`` maps "h", "A^w", "G^w", "H^w" to MonotoneVerdict (measures
    that diverge anywhere on the grid are left out and listed in
    ``excluded``). ``extra`` holds verdicts for the weighted hazard
    ``h_w = w h`` and for its plain running average ``A_of_h_w``.
    """

    verdicts: dict
    labels: frozenset
    scan_interval: tuple
    grid_size: int
    excluded: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    transmission_violations: tuple = ()
    defective: bool = False

    @property
    def transmission_ok(self) -> bool:
        return not self.transmission_violations

    def label_for(self, measure: str) -> Optional[str]:
        v = self.verdicts.get(measure) or self.extra.get(measure)
        return None if v is None else v.label

    def to_dict(self) -> dict:
        return {
            "labels": sorted(self.labels),
            "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
            "extra": {k: v.to_dict() for k, v in self.extra.items()},
            "excluded": dict(self.excluded),
            "scan_interval": list(self.scan_interval),
            "grid_size": self.grid_size,
            "transmission_violations": list(self.transmission_violations),
            "inclusion_violations": list(inclusion_violations(self)),
            "defective": self.defective,
        }


def inclusion_violations(report: AgingReport) -> tuple:
    """Broken links in the two inclusion chains.

    The increasing chain reads IFR => Iw-AFR => Iw-GFR => Iw-HFR and the
    decreasing one DFR => Dw-HFR => Dw-GFR => Dw-AFR. A link whose target
    measure was excluded (divergent) cannot be assessed and is skipped.
    """
    measure_of = {lab: m for m, pair in _LABELS.items() for lab in pair}
    bad = []
    for chain in (INCREASING_CHAIN, DECREASING_CHAIN):
        # Links across an excluded measure still have to hold transitively.
        present = [lab for lab in chain if measure_of[lab] not in report.excluded]
        for src, dst in zip(present, present[1:]):
            if src in report.labels and dst not in report.labels:
                bad.append(f"{src} => {dst}")
    return tuple(bad)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def default_interval(m: WeightedModel, lower: float = 0.001, upper: float = 0.999) -> tuple:
    """Abscissae holding the central 99.8% of the base model's mass."""
    return float(m.hazard.quantile(lower)), float(m.hazard.quantile(upper))


def _labels_from(measure, verdict):
    inc, dec = _LABELS[measure]
    if verdict.label == INCREASING:
        return {inc}
    if verdict.label == DECREASING:
        return {dec}
    if verdict.label == CONSTANT:
        return {inc, dec}
    return set()


def _point_mean(m, which):
    def f(x):
        t = mean_triple(m, float(x))
        if which == "A^w":
            return t.afr
        if which == "G^w":
            return math.nan if t.gfr is DIVERGENT else t.gfr
        return math.nan if t.hfr_divergent else t.hfr
    return f


def classify(m: WeightedModel, interval=None, grid_size: int = 200, dead_band: float = 1e-9) -> AgingReport:
    """Scan h and the three weighted means for monotonicity and derive aging labels."""
    if interval is None:
        interval = default_interval(m)
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValidationError(f"scan interval must have lo < hi, got [{lo}, {hi}]")
    if lo <= m.lo or hi > m.hazard.hi:
        raise ValidationError(f"scan interval must lie inside the support ({m.lo}, {m.hazard.hi})")
    grid = np.linspace(lo, hi, grid_size)
    verdicts = {"h": scan_monotonicity(m.hazard.h, (lo, hi), grid_size, dead_band)}
    excluded = {}
    integrals = mean_integrals_grid(m, grid)
    W = np.array([I.weight_mass for I in integrals])
    K = np.array([I.hazard_mass for I in integrals])
    afr = K / W
    verdicts["A^w"] = scan_monotonicity(_point_mean(m, "A^w"), (lo, hi), grid_size, dead_band, values=afr)
    if any(I.log_mass is None for I in integrals):
        excluded["G^w"] = "log-hazard integral diverges"
    else:
        gfr = np.exp(np.array([I.log_mass for I in integrals]) / W)
        verdicts["G^w"] = scan_monotonicity(_point_mean(m, "G^w"), (lo, hi), grid_size, dead_band, values=gfr)
    inv = np.array([I.inverse_mass for I in integrals])
    if np.any(np.isinf(inv)):
        excluded["H^w"] = "inverse-hazard integral diverges (harmonic mean set to 0)"
    else:
        verdicts["H^w"] = scan_monotonicity(_point_mean(m, "H^w"), (lo, hi), grid_size, dead_band, values=W / inv)

    labels = set()
    for name, v in verdicts.items():
        labels |= _labels_from(name, v)

    h_label = verdicts["h"].label
    violations = []
    if h_label in (INCREASING, DECREASING, CONSTANT):
        for name in ("A^w", "G^w", "H^w"):
            if name in verdicts and verdicts[name].label != h_label:
                violations.append(f"h is {h_label} but {name} is {verdicts[name].label}")

    extra = {"h_w": scan_monotonicity(m.weighted_hazard, (lo, hi), grid_size, dead_band)}

    def plain_average(x):
        return m.cumulative_weighted_hazard(float(x)) / (float(x) - m.lo)

    extra["A_of_h_w"] = scan_monotonicity(plain_average, (lo, hi), grid_size, dead_band,
                                          values=K / (grid - m.lo))
    from .weighted import check_validity_postulates
    defective = check_validity_postulates(m, hi - m.lo).defective
    return AgingReport(verdicts, frozenset(labels), (lo, hi), grid_size, excluded, extra,
                       tuple(violations), defective)


# ---------------------------------------------------------------------------
# Wijsman's inequality
# ---------------------------------------------------------------------------

SAME = "same"
OPPOSITE = "opposite"
EQUAL = "equal"


def wijsman_check(f1: Callable, f2: Callable, g1: Callable, g2: Callable, x: float,
                  expected_direction: str, lower: float = 0.0, tol: float = 1e-10) -> BoundReport:
    """Sign of (int f1 g1)(int f2 g2) - (int f1 g2)(int f2 g1) over [lower, x].

    ``expected_direction`` is "same" when f1/f2 and g1/g2 are monotone in
    the same direction (difference >= 0), "opposite" (<= 0), or "equal"
    when one ratio is constant (difference == 0).
    """
    if expected_direction not in (SAME, OPPOSITE, EQUAL):
        raise ValidationError("expected_direction must be 'same', 'opposite' or 'equal'")

    def prod(a, b):
        return integrate(lambda u: a(u) * b(u), lower, x).value

    i11, i22, i12, i21 = prod(f1, g1), prod(f2, g2), prod(f1, g2), prod(f2, g1)
    if min(i11, i22, i12, i21) <= 0:
        raise DegenerateError("Wijsman check needs every cross integral to be positive")
    diff = i11 * i22 - i12 * i21
    expected = {SAME: GE, OPPOSITE: LE, EQUAL: EQ}[expected_direction]
    return _compare(f"wijsman[{expected_direction}]", expected, [x], [diff], [0.0], tol,
                    {"difference": diff, "integrals": [i11, i22, i12, i21]})


# ---------------------------------------------------------------------------
# Bounds between weighted and unweighted means
# ---------------------------------------------------------------------------

def _relation(wdir, hdir):
    """'same', 'opposite', 'equal' (a constant side) or None (not monotone)."""
    if wdir == CONSTANT or hdir == CONSTANT:
        return EQUAL
    if wdir in (INCREASING, DECREASING) and hdir in (INCREASING, DECREASING):
        return SAME if wdir == hdir else OPPOSITE
    return None


def _min_on(f, lo, hi, n=400):
    xs = np.linspace(lo, hi, n + 1)[1:]
    with np.errstate(all="ignore"):
        return float(np.min(np.asarray(f(xs), dtype=float)))


def _max_on(f, lo, hi, n=400):
    xs = np.linspace(lo, hi, n + 1)[1:]
    with np.errstate(all="ignore"):
        return float(np.max(np.asarray(f(xs), dtype=float)))


def _triples(m, grid):
    out = []
    for x in grid:
        t = mean_triple(m, float(x))
        out.append((t.afr, math.nan if t.gfr is DIVERGENT else t.gfr,
                    math.nan if t.hfr_divergent else t.hfr))
    return np.array(out, dtype=float).reshape(-1, 3)


def bound_check_means(m: WeightedModel, x_grid: Sequence[float], tol: float = 1e-8) -> list:
    """Weighted versus unweighted A, G, H according to the co-monotonicity of w and h.

    Same direction gives A^w >= A, G^w >= G, H^w >= H; opposite direction
    reverses all three; a constant weight or hazard gives equality. The G
    comparison runs only when h >= 1 on the whole range and is reported as
    skipped otherwise.
    """
    grid = np.asarray(x_grid, dtype=float)
    rel = _relation(m.weight.direction, m.hazard.direction)
    names = ("A^w vs A", "G^w vs G", "H^w vs H")
    if rel is None:
        reason = (f"monotone directions not both declared (w: {m.weight.direction}, "
                  f"h: {m.hazard.direction})")
        return [_inconclusive(n, reason) for n in names]
    expected = {SAME: GE, OPPOSITE: LE, EQUAL: EQ}[rel]
    weighted = _triples(m, grid)
    plain = _triples(unweighted(m.hazard, m.quad), grid)
    details = {"relation": rel}
    reports = [_compare(names[0], expected, grid, weighted[:, 0], plain[:, 0], tol, details)]
    h_min = _min_on(m.hazard.h, m.lo, float(grid.max()))
    if h_min < 1.0 and rel != EQUAL:
        reports.append(_skipped(names[1], f"h < 1 on the range (min {h_min:.6g})", expected))
    else:
        reports.append(_compare(names[1], expected, grid, weighted[:, 1], plain[:, 1], tol, details))
    reports.append(_compare(names[2], expected, grid, weighted[:, 2], plain[:, 2], tol, details))
    return reports


def remark_bounds(m: WeightedModel, x_grid: Sequence[float], tol: float = 1e-8) -> BoundReport:
    """min(H, H^w) <= every mean <= max(A, A^w) on the grid."""
    grid = np.asarray(x_grid, dtype=float)
    weighted = _triples(m, grid)
    plain = _triples(unweighted(m.hazard, m.quad), grid)
    upper = np.maximum(weighted[:, 0], plain[:, 0])
    lower = np.fmin(weighted[:, 2], plain[:, 2])
    allm = np.concatenate([weighted, plain], axis=1)
    top = np.nanmax(allm, axis=1)
    bottom = np.nanmin(np.where(np.isnan(allm), np.inf, allm), axis=1)
    r_up = _compare("means <= max(A, A^w)", LE, grid, top, upper, tol)
    r_lo = _compare("means >= min(H, H^w)", GE, grid, bottom, lower, tol)
    worst = r_up if r_up.max_violation >= r_lo.max_violation else r_lo
    status = PASS if r_up.passed and r_lo.passed else FAIL
    return BoundReport("remark bounds", "within", worst.max_violation, worst.scale, status,
                       worst.witness, "", tol, {"upper": r_up.to_dict(), "lower": r_lo.to_dict()})


# ---------------------------------------------------------------------------
# Weights applied in sequence, h_k = w^k h
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceQuantities:
    """Integrals behind the sequence-weight ratios at one abscissa."""

    x: float
    k: int
    W: float
    W_k_plus_1: float
    W_1_minus_k: float
    ratio_a: float
    ratio_g: float
    ratio_h: float
    log_w_bound: float
    a_k: float
    g_k: float
    h_k: float


def sequence_quantities(m: WeightedModel, k: int, x: float) -> SequenceQuantities:
    if k < 1 or int(k) != k:
        raise ValidationError("k must be a positive integer")
    k = int(k)
    w, h = m.weight.weight_fn, m.hazard.hazard_fn
    lo, q = m.lo, m.quad
    x = float(m.hazard.clamp(x))

    def I(f, default=math.nan):
        try:
            return integrate(f, lo, x, q).value
        except DivergenceError:
            return default

    W = m.weight_mass(x)
    Wk1 = I(lambda u: w(u) ** (k + 1))
    W1k = I(lambda u: w(u) ** (1 - k), math.inf)
    num_a = I(lambda u: w(u) ** (k + 1) * h(u))
    den_a = I(lambda u: w(u) * h(u))
    wlogw = I(lambda u: w(u) * np.log(w(u)))
    logw = I(lambda u: np.log(w(u)))
    inv = I(lambda u: w(u) / h(u), math.inf)
    inv_k = I(lambda u: w(u) ** (1 - k) / h(u), math.inf)
    wlogh = I(lambda u: w(u) * np.log(h(u)))
    ratio_h = inv / inv_k if math.isfinite(inv) and math.isfinite(inv_k) else math.nan
    return SequenceQuantities(
        x, k, W, Wk1, W1k,
        ratio_a=num_a / den_a,
        ratio_g=math.exp(k * wlogw / W),
        ratio_h=ratio_h,
        log_w_bound=math.exp(k * logw / (x - lo)),
        a_k=num_a / W,
        g_k=math.exp((k * wlogw + wlogh) / W),
        h_k=W / inv_k if math.isfinite(inv_k) else math.nan,
    )


def sequence_weight_bounds(m: WeightedModel, k: int, x_grid: Sequence[float], tol: float = 1e-8) -> list:
    """Bounds for the means of h_k = w^k h relative to those of h.

    Items, in the forms that follow from Wijsman's inequality:
      (i)   A ratio >= (<=) int w^(k+1) / int w when w, h co-monotone (counter-monotone)
      (ii)  G ratio >= exp((k/x) int ln w); needs only w monotone, checked when w >= 1
      (iii) H ratio >= (<=) int w / int w^(1-k) when w, h counter-monotone (co-monotone)
      (iv)  A^w_{h_k} >= A and H^w_{h_k} >= H for co-monotone w >= 1;
            <= for counter-monotone w <= 1; other branches are inconclusive
      (v)   G^w_{h_k} >= G when h >= 1, w >= 1 and w, h co-monotone
    Unmet preconditions give inconclusive reports.
    """
    grid = np.asarray(x_grid, dtype=float)
    rel = _relation(m.weight.direction, m.hazard.direction)
    qs = [sequence_quantities(m, k, x) for x in grid]
    col = {name: np.array([getattr(s, name) for s in qs]) for name in SequenceQuantities.__dataclass_fields__}
    xmax = float(grid.max())
    w_min = _min_on(m.weight.weight_fn, m.lo, xmax)
    w_max = _max_on(m.weight.weight_fn, m.lo, xmax)
    h_min = _min_on(m.hazard.hazard_fn, m.lo, xmax)
    reports = []

    if rel is None:
        reports.append(_inconclusive("(i) A ratio", "w and h not both monotone"))
    else:
        exp_i = {SAME: GE, OPPOSITE: LE, EQUAL: EQ}[rel]
        reports.append(_compare("(i) A ratio", exp_i, grid, col["ratio_a"], col["W_k_plus_1"] / col["W"], tol))

    if m.weight.direction not in (INCREASING, DECREASING, CONSTANT):
        reports.append(_inconclusive("(ii) G ratio", "w not monotone"))
    elif w_min < 1.0:
        reports.append(_inconclusive("(ii) G ratio", f"w < 1 on the range (min {w_min:.6g})", GE))
    else:
        reports.append(_compare("(ii) G ratio", GE, grid, col["ratio_g"], col["log_w_bound"], tol))

    if rel is None:
        reports.append(_inconclusive("(iii) H ratio", "w and h not both monotone"))
    else:
        exp_iii = {SAME: LE, OPPOSITE: GE, EQUAL: EQ}[rel]
        reports.append(_compare("(iii) H ratio", exp_iii, grid, col["ratio_h"], col["W"] / col["W_1_minus_k"], tol))

    plain = _triples(unweighted(m.hazard, m.quad), grid)
    if rel == SAME and w_min >= 1.0:
        exp_iv = GE
    elif rel == OPPOSITE and w_max <= 1.0:
        exp_iv = LE
    elif rel == EQUAL and m.weight.direction == CONSTANT and w_min == w_max == 1.0:
        exp_iv = EQ
    else:
        exp_iv = None
    if exp_iv is None:
        reason = f"no valid branch for relation={rel}, w in [{w_min:.6g}, {w_max:.6g}]"
        reports.append(_inconclusive("(iv) A^w_k vs A", reason))
        reports.append(_inconclusive("(iv) H^w_k vs H", reason))
    else:
        reports.append(_compare("(iv) A^w_k vs A", exp_iv, grid, col["a_k"], plain[:, 0], tol))
        reports.append(_compare("(iv) H^w_k vs H", exp_iv, grid, col["h_k"], plain[:, 2], tol))

    if rel in (SAME, EQUAL) and h_min >= 1.0 and w_min >= 1.0:
        reports.append(_compare("(v) G^w_k vs G", GE, grid, col["g_k"], plain[:, 1], tol))
    else:
        reports.append(_inconclusive("(v) G^w_k vs G", "needs h >= 1, w >= 1 and co-monotone w, h"))
    return reports


# ---------------------------------------------------------------------------
# Weighted star-shaped conditions
# ---------------------------------------------------------------------------

def _direction_of(m, which, x_grid):
    xmax = float(np.max(x_grid))
    lo = m.lo + 1e-3 * (xmax - m.lo)
    try:
        v = scan_monotonicity(_point_mean(m, which), (lo, xmax), 64)
    except (AccuracyError, ArithmeticError):
        return None
    return v.label


def star_shaped_check(m: WeightedModel, alphas: Sequence[float], x_grid: Sequence[float],
                      label: Optional[str] = None, tol: float = 1e-8) -> BoundReport:
    """F^w(a x) >= (<=) F^w(x) ** (W(a x) / W(x)) for increasing (decreasing) A^w.

    ``label`` may be "Iw-AFR" or "Dw-AFR"; when omitted the direction of
    A^w is scanned on (lo, max(x_grid)].
    """
    alphas = np.asarray(alphas, dtype=float)
    if np.any((alphas < 0) | (alphas > 1)):
        raise ValidationError("alphas must lie in [0, 1]")
    direction = {"Iw-AFR": INCREASING, "Dw-AFR": DECREASING, None: None}.get(label, UNKNOWN)
    if direction is UNKNOWN:
        raise ValidationError("label must be 'Iw-AFR' or 'Dw-AFR'")
    if direction is None:
        direction = _direction_of(m, "A^w", x_grid)
    expected = {INCREASING: GE, DECREASING: LE, CONSTANT: EQ}.get(direction)
    if expected is None:
        return _inconclusive("weighted star-shaped survival", f"A^w is {direction} on the range")
    xs, lhs, rhs, ratios = [], [], [], []
    for x in x_grid:
        Wx = m.weight_mass(float(x))
        Sx = m_survival(m, float(x))
        for a in alphas:
            ax = a * float(x)
            r = m.weight_mass(ax) / Wx if ax > m.lo else 0.0
            ratios.append(r)
            xs.append(float(x))
            lhs.append(m_survival(m, ax))
            rhs.append(Sx ** r)
    # The equivalent statement: F^w(x) ** (1 / W(x)) moves opposite to A^w.
    grid = np.linspace(m.lo + 1e-3 * (max(x_grid) - m.lo), max(x_grid), 64)
    root = [m_survival(m, float(x)) ** (1.0 / m.weight_mass(float(x))) for x in grid]
    root_label = scan_monotonicity(lambda x: m_survival(m, float(x)) ** (1.0 / m.weight_mass(float(x))),
                                   (grid[0], grid[-1]), 64, values=root).label
    opposite = {INCREASING: DECREASING, DECREASING: INCREASING, CONSTANT: CONSTANT}[direction]
    details = {"a_w_direction": direction, "root_survival_direction": root_label,
               "root_survival_consistent": root_label == opposite,
               "weight_ratio_range": [float(min(ratios)), float(max(ratios))]}
    return _compare("weighted star-shaped survival", expected, xs, lhs, rhs, tol, details)


def m_survival(m: WeightedModel, x: float) -> float:
    if x <= m.lo:
        return 1.0
    return math.exp(-m.cumulative_weighted_hazard(x))


def gfr_star_shaped_check(m: WeightedModel, alphas: Sequence[float], x_grid: Sequence[float],
                          label: Optional[str] = None, tol: float = 1e-8) -> BoundReport:
    """int_0^{a x} w ln h <= (>=) W(a x)/W(x) * int_0^x w ln h for increasing (decreasing) G^w."""
    alphas = np.asarray(alphas, dtype=float)
    if np.any((alphas < 0) | (alphas > 1)):
        raise ValidationError("alphas must lie in [0, 1]")
    direction = {"Iw-GFR": INCREASING, "Dw-GFR": DECREASING, None: None}.get(label, UNKNOWN)
    if direction is UNKNOWN:
        raise ValidationError("label must be 'Iw-GFR' or 'Dw-GFR'")
    if direction is None:
        direction = _direction_of(m, "G^w", x_grid)
    expected = {INCREASING: LE, DECREASING: GE, CONSTANT: EQ}.get(direction)
    if expected is None:
        return _inconclusive("weighted star-shaped log hazard", f"G^w is {direction} on the range")
    w, h = m.weight.weight_fn, m.hazard.hazard_fn

    def L(x):
        if x <= m.lo:
            return 0.0
        return integrate(lambda u: w(u) * np.log(h(u)), m.lo, float(m.hazard.clamp(x)), m.quad).value

    try:
        xs, lhs, rhs, ratios = [], [], [], []
        for x in x_grid:
            Lx, Wx = L(float(x)), m.weight_mass(float(x))
            for a in alphas:
                ax = a * float(x)
                r = m.weight_mass(ax) / Wx if ax > m.lo else 0.0
                ratios.append(r)
                xs.append(float(x))
                lhs.append(L(ax))
                rhs.append(r * Lx)
    except DivergenceError:
        return _inconclusive("weighted star-shaped log hazard", "log-hazard integral diverges")
    details = {"g_w_direction": direction,
               "weight_ratio_range": [float(min(ratios)), float(max(ratios))]}
    return _compare("weighted star-shaped log hazard", expected, xs, lhs, rhs, tol, details)
