"""Consistency tests for the characterizations built on the weighted means.

Two families of checks:

* equality of two weighted means on a grid, which holds for every weight
  exactly when the hazard is constant;
* proportionality of a weighted mean to the hazard, which pins the hazard
  down to a power of the cumulative weight ``W``.

"Characterizes" is operationalized as a thresholded consistency test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .models import (CONSTANT, DECREASING, INCREASING, HazardModel, WeightFunction, custom_hazard,
                     scan_monotonicity, weibull)
from .weighted import DIVERGENT, WeightedModel, mean_triple

CONSISTENT = "consistent-with"
INCONSISTENT = "inconsistent-with"
INCONCLUSIVE = "inconclusive"

PAIRS = {"AG": ("afr", "gfr"), "GH": ("gfr", "hfr"), "AH": ("afr", "hfr")}


@dataclass(frozen=True)
class CharacterizationVerdict:
    test_id: str
    statistic: float
    threshold: float
    verdict: str
    witness: float = math.nan
    details: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.verdict == CONSISTENT

    def to_dict(self) -> dict:
        return {"test_id": self.test_id, "statistic": self.statistic, "threshold": self.threshold,
                "verdict": self.verdict, "witness": self.witness, "details": self.details}


def _verdict(test_id, stats, xs, threshold, details):
    i = int(np.argmax(stats))
    stat = float(stats[i])
    return CharacterizationVerdict(test_id, stat, threshold,
                                   CONSISTENT if stat <= threshold else INCONSISTENT,
                                   float(xs[i]), details)


def _means(m, x_grid):
    rows = []
    for x in x_grid:
        t = mean_triple(m, float(x))
        rows.append({"afr": t.afr,
                     "gfr": None if t.gfr is DIVERGENT else t.gfr,
                     "hfr": None if t.hfr_divergent else t.hfr})
    return rows


def test_exponentiality_via_mean_equality(m: WeightedModel, which: str, x_grid: Sequence[float],
                                          threshold: float = 1e-6) -> CharacterizationVerdict:
    """Largest relative gap between two weighted means over ``x_grid``.

    A consistent verdict is cross-checked against a monotonicity scan of h,
    which must come out constant; the outcome is in ``details``.
    """
    if which not in PAIRS:
        raise ValidationError(f"which must be one of {sorted(PAIRS)}")
    first, second = PAIRS[which]
    xs = np.asarray(x_grid, dtype=float)
    rows = _means(m, xs)
    if any(r[first] is None or r[second] is None for r in rows):
        return CharacterizationVerdict(f"equality[{which}]", math.nan, threshold, INCONCLUSIVE,
                                       details={"reason": "a mean diverges on the grid"})
    a = np.array([r[first] for r in rows])
    b = np.array([r[second] for r in rows])
    gaps = np.abs(a - b) / np.maximum(np.abs(a), np.abs(b))
    lo, hi = float(xs.min()), float(xs.max())
    details = {}
    if hi > lo:
        label = scan_monotonicity(m.hazard.h, (lo, hi), max(16, xs.size)).label
        details = {"h_scan": label, "h_constant": label == CONSTANT}
    return _verdict(f"equality[{which}]", gaps, xs, threshold, details)


# Sanity for pytest collection: the name starts with "test_" but is library code.
test_exponentiality_via_mean_equality.__test__ = False


# ---------------------------------------------------------------------------
# Proportional means
# ---------------------------------------------------------------------------

def hazard_exponent(which: str, ratio: float) -> float:
    """Exponent p in h = const * W^p for a mean proportional to h with ``ratio``."""
    if not ratio > 0:
        raise ValidationError("ratio must be > 0")
    if which == "A":
        p = (1.0 - ratio) / ratio
    elif which == "G":
        p = math.log(math.e / ratio) - 1.0
    elif which == "H":
        p = 1.0 - ratio
    else:
        raise ValidationError("which must be 'A', 'G' or 'H'")
    if not p > -1.0:
        raise ValidationError(f"exponent {p:.6g} <= -1: hazard is not locally integrable")
    return p


def recover_hazard_from_proportionality(w: WeightFunction, which: str, ratio: float,
                                        k: float) -> HazardModel:
    """Hazard whose weighted mean ``which`` equals ``ratio * h``.

    A: h = k W^((1-a)/a);  G: h = k W^(ln(e/b) - 1);  H: h = (W / (k c))^(1-c).
    """
    if not k > 0:
        raise ValidationError("k must be > 0")
    p = hazard_exponent(which, ratio)
    cum = w.cumulative

    if which == "H":
        scale = 1.0 / (k * ratio)

        def hazard(x):
            return (scale * np.asarray(cum(x))) ** p
    else:
        def hazard(x):
            return k * np.asarray(cum(x)) ** p

    direction = CONSTANT if p == 0 else INCREASING if p > 0 else DECREASING
    return custom_hazard(hazard, direction=direction, family=f"proportional_{which}",
                         params={"which": which, "ratio": ratio, "k": k, "exponent": p,
                                 "weight": w.to_dict()})


def weibull_for_power_weight(n: float, a: float, k: float) -> HazardModel:
    """The Weibull hazard recovered from A^w = a h under the weight x^n.

    Shape (n - a n + 1)/a and scale k a / ((n - a n + 1) (n + 1)^((1-a)/a)).
    """
    if not n > -1:
        raise ValidationError("power weight needs n > -1")
    hazard_exponent("A", a)
    shape = (n - a * n + 1.0) / a
    scale = k * a / ((n - a * n + 1.0) * (n + 1.0) ** ((1.0 - a) / a))
    return weibull(scale, shape)


@dataclass(frozen=True)
class ProportionalityResult:
    ratio: float
    verdict: CharacterizationVerdict
    expected_h_direction: str
    scanned_h_direction: str

    @property
    def remark_consistent(self) -> bool:
        return self.expected_h_direction == self.scanned_h_direction

    def to_dict(self) -> dict:
        return {"ratio": self.ratio, "verdict": self.verdict.to_dict(),
                "expected_h_direction": self.expected_h_direction,
                "scanned_h_direction": self.scanned_h_direction,
                "remark_consistent": self.remark_consistent}


def test_proportionality(m: WeightedModel, which: str, x_grid: Sequence[float],
                         threshold: float = 1e-6) -> ProportionalityResult:
    """Estimate mean(x)/h(x) by its median and measure the spread around it.

    When the ratio is below (above) one the hazard should be increasing
    (decreasing); ``expected_h_direction`` records that and
    ``scanned_h_direction`` what a scan of h on the grid range found.
    """
    key = {"A": "afr", "G": "gfr", "H": "hfr"}.get(which)
    if key is None:
        raise ValidationError("which must be 'A', 'G' or 'H'")
    xs = np.asarray(x_grid, dtype=float)
    hv = np.asarray(m.hazard.h(xs), dtype=float)
    if np.any(hv <= 0):
        from .errors import DegenerateError
        raise DegenerateError("h vanishes on the grid")
    rows = _means(m, xs)
    if any(r[key] is None for r in rows):
        v = CharacterizationVerdict(f"proportional[{which}]", math.nan, threshold, INCONCLUSIVE,
                                    details={"reason": "mean diverges on the grid"})
        return ProportionalityResult(math.nan, v, "", "")
    r = np.array([row[key] for row in rows]) / hv
    ratio = float(np.median(r))
    dev = np.abs(r - ratio) / ratio
    verdict = _verdict(f"proportional[{which}]", dev, xs, threshold, {"ratio": ratio})
    if abs(ratio - 1.0) <= threshold:
        expected = CONSTANT
    else:
        expected = INCREASING if ratio < 1 else DECREASING
    scanned = scan_monotonicity(m.hazard.h, (float(xs.min()), float(xs.max())), max(16, xs.size)).label
    return ProportionalityResult(ratio, verdict, expected, scanned)


test_proportionality.__test__ = False
