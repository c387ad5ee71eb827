"""Mixtures as weighted series systems, and a search for a series system
whose components are Iw-AFR while the system's running average hazard
is not monotone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .aging import classify
from .errors import DegenerateError, ValidationError
from .models import (INCREASING, NON_MONOTONE, MonotoneVerdict, custom_weight, exponential_weight, one_minus_exponential_weight,
                     scan_monotonicity, weibull)
from .quadrature import integrate_to_grid
from .weighted import WeightedModel


# ---------------------------------------------------------------------------
# Mixtures and weighted series systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MixtureSpec:
    components: tuple
    proportions: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        props = tuple(float(p) for p in self.proportions)
        if not comps:
            raise ValidationError("a mixture needs at least one component")
        if len(comps) != len(props):
            raise ValidationError("components and proportions differ in length")
        if any(not p > 0 for p in props):
            raise ValidationError("mixing proportions must be > 0")
        if abs(math.fsum(props) - 1.0) > 1e-12:
            raise ValidationError(f"mixing proportions sum to {math.fsum(props)!r}, not 1")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "proportions", props)


def _unit_sum(p):
    """Nudge the largest entry until the correctly rounded sum is exactly 1."""
    p = [float(v) for v in p]
    j = max(range(len(p)), key=p.__getitem__)
    for _ in range(8):
        s = math.fsum(p)
        if s == 1.0:
            break
        p[j] += 1.0 - s
    return p


def effective_weights(spec: MixtureSpec, x: float) -> list:
    """p_i(x) = pi_i S_i(x) / sum_j pi_j S_j(x), with fsum(p) == 1."""
    # Work with log survivals so far tails do not underflow to 0/0.
    logs = np.array([math.log(pi) - float(c.H(x)) for c, pi in zip(spec.components, spec.proportions)])
    if not np.any(np.isfinite(logs)):
        raise DegenerateError(f"every component survival is 0 at x={x}")
    top = np.max(logs)
    s = np.exp(logs - top)
    return _unit_sum(s / math.fsum(s))


def mixture_hazard(spec: MixtureSpec, x: float) -> tuple:
    """(h(x), [p_i(x)]) with h = sum p_i h_i."""
    p = effective_weights(spec, x)
    h = math.fsum(pi * float(c.h(x)) for pi, c in zip(p, spec.components))
    return h, p


@dataclass(frozen=True, eq=False)
class WeightedSeriesSpec:
    """Series system whose i-th component contributes w_i(x) h_i(x) to the hazard."""

    components: tuple
    weights_sum_to_one: bool = False
    validation_grid: Optional[Sequence[float]] = None

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValidationError("a series system needs at least one component")
        for pair in comps:
            if len(pair) != 2:
                raise ValidationError("components must be (HazardModel, WeightFunction) pairs")
        object.__setattr__(self, "components", comps)
        if self.weights_sum_to_one:
            grid = self.validation_grid
            if grid is None:
                grid = np.linspace(0.0, 10.0, 101)
            total = sum(np.asarray(w.w(np.asarray(grid, dtype=float)), dtype=float) for _, w in comps)
            gap = float(np.max(np.abs(total - 1.0)))
            if gap > 1e-9:
                raise ValidationError(f"weights do not sum to one (max gap {gap:.3g})")


def series_hazard(spec: WeightedSeriesSpec, x: float) -> float:
    return math.fsum(float(w.w(x)) * float(h.h(x)) for h, w in spec.components)


def mixture_as_series(spec: MixtureSpec) -> WeightedSeriesSpec:
    """The weighted series system with w_i = p_i, the mixture's effective weights."""
    pairs = []
    for i, comp in enumerate(spec.components):
        def weight(x, i=i):
            x = np.asarray(x, dtype=float)
            vals = [effective_weights(spec, float(v))[i] for v in np.atleast_1d(x).ravel()]
            return np.asarray(vals).reshape(x.shape)

        pairs.append((comp, custom_weight(weight, family="mixture_share", params={"index": i})))
    return WeightedSeriesSpec(tuple(pairs))


# ---------------------------------------------------------------------------
# Counterexample search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchBox:
    betas: tuple = (5.0, 3.0, 2.0)
    bs: tuple = (1.1, 1.5)
    ns: tuple = (-1.0, -0.5, -2.0)
    alpha: float = 1.0
    a: float = 1.0
    interval: tuple = (0.1, 20.0)
    grid_size: int = 200
    refine: int = 4

    def __post_init__(self):
        if not (self.alpha > 0 and self.a > 0):
            raise ValidationError("scales alpha and a must be > 0")
        if any(not b > 1 for b in tuple(self.betas) + tuple(self.bs)):
            raise ValidationError("shapes beta and b must be > 1")
        if any(not n < 0 for n in self.ns):
            raise ValidationError("n must be < 0")
        if self.refine < 1:
            raise ValidationError("refine must be >= 1")


def series_components(alpha, beta, a, b, n):
    """The two weighted Weibull components with weights e^(n t) and 1 - e^(n t)."""
    c1 = WeightedModel(weibull(alpha, beta), exponential_weight(n))
    c2 = WeightedModel(weibull(a, b), one_minus_exponential_weight(n))
    return c1, c2


def system_running_average(c1: WeightedModel, c2: WeightedModel, grid) -> np.ndarray:
    """A(t) = (1/t) int_0^t (w1 h1 + w2 h2) on an ascending grid."""
    grid = np.asarray(grid, dtype=float)

    def h(u):
        return c1.weighted_hazard(u) + c2.weighted_hazard(u)

    return integrate_to_grid(h, grid) / grid


def _system_verdict(c1, c2, interval, grid_size):
    grid = np.linspace(interval[0], interval[1], grid_size)
    vals = system_running_average(c1, c2, grid)

    def point(t):
        return float(system_running_average(c1, c2, [t])[0])

    return scan_monotonicity(point, interval, grid_size, values=vals)


@dataclass(frozen=True)
class Witness:
    found: bool
    params: dict
    components: tuple = ()
    system: Optional[MonotoneVerdict] = None
    refined: Optional[MonotoneVerdict] = None
    cells_tried: int = 0
    interval: tuple = ()

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "params": self.params,
            "cells_tried": self.cells_tried,
            "interval": list(self.interval),
            "components": [
                {"labels": sorted(r.labels), "A^w": r.verdicts["A^w"].to_dict(),
                 "h": r.verdicts["h"].to_dict()} for r in self.components
            ],
            "system": None if self.system is None else self.system.to_dict(),
            "refined": None if self.refined is None else self.refined.to_dict(),
        }


def counterexample_nonclosure(box: SearchBox = SearchBox()) -> Witness:
    """First (beta, b, n) in ``box`` where both components are Iw-AFR with
    increasing hazards but the system's running average hazard is not monotone.

    A candidate is accepted only if the system verdict stays non-monotone
    with at least one change point on a grid ``box.refine`` times finer.
    """
    tried = 0
    for beta, b, n in itertools.product(box.betas, box.bs, box.ns):
        tried += 1
        c1, c2 = series_components(box.alpha, beta, box.a, b, n)
        system = _system_verdict(c1, c2, box.interval, box.grid_size)
        if system.label != NON_MONOTONE:
            continue
        reports = (classify(c1, box.interval, box.grid_size), classify(c2, box.interval, box.grid_size))
        if not all(r.verdicts["h"].label == INCREASING and "Iw-AFR" in r.labels for r in reports):
            continue
        refined = _system_verdict(c1, c2, box.interval, box.grid_size * box.refine)
        if refined.label != NON_MONOTONE or not refined.change_points:
            continue
        params = {"alpha": box.alpha, "beta": beta, "a": box.a, "b": b, "n": n}
        return Witness(True, params, reports, system, refined, tried, tuple(box.interval))
    return Witness(False, {}, cells_tried=tried, interval=tuple(box.interval))
