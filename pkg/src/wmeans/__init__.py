"""Weighted arithmetic, geometric and harmonic mean failure rates.

Numerical toolkit for hazard-rate means under a weight function, their
quantile counterparts, aging-class classification and the inequalities
that relate them.
"""

from .errors import (AccuracyError, ComputationError, DegenerateError, DivergenceError, DomainError,
                     ValidationError, WMeansError)
from .models import (HazardModel, MonotoneVerdict, WeightFunction, make_hazard, make_weight,
                     scan_monotonicity)
from .quadrature import QuadratureConfig, integrate, integrate_to_grid
from .special import SpecialFnConfig
from .weighted import (DIVERGENT, MeanTriple, WeightedModel, mean_triple, mean_triple_grid, wafr,
                       wgfr, whfr, weighted_density, weighted_hazard, weighted_survival)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "ComputationError", "DegenerateError", "DivergenceError", "DomainError",
    "ValidationError", "WMeansError", "HazardModel", "MonotoneVerdict", "WeightFunction",
    "make_hazard", "make_weight", "scan_monotonicity", "QuadratureConfig", "integrate",
    "integrate_to_grid", "SpecialFnConfig", "DIVERGENT", "MeanTriple", "WeightedModel",
    "mean_triple", "mean_triple_grid", "wafr", "wgfr", "whfr", "weighted_density",
    "weighted_hazard", "weighted_survival",
]
