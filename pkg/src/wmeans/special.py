"""Incomplete gamma pair, exponential integral E1 and Euler's constant.

Series expansion below the transition point, modified-Lentz continued
fraction above it (Numerical Recipes regime split). Everything here is a
pure function of its arguments.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .errors import ComputationError, ValidationError

EULER_GAMMA = 0.57721566490153286060651209008240243

_FPMIN = sys.float_info.min / sys.float_info.epsilon


@dataclass(frozen=True)
class SpecialFnConfig:
    rel_tol: float = 1e-12
    max_iter: int = 500

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValidationError("rel_tol must be > 0")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")


DEFAULT = SpecialFnConfig()


def euler_gamma() -> float:
    return EULER_GAMMA


def log_gamma(a: float) -> float:
    return math.lgamma(a)


def _check_args(a, x):
    if not a > 0:
        raise ValidationError(f"incomplete gamma needs a > 0, got a={a}")
    if not x >= 0:
        raise ValidationError(f"incomplete gamma needs x >= 0, got x={x}")


def _gamma_series(a, x, cfg):
    """Lower regularized P(a, x) by its power series; valid for x < a + 1."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(cfg.max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * cfg.rel_tol * 0.1:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ComputationError(f"incomplete gamma series did not converge for a={a}, x={x}", (a, x))


def _gamma_cf(a, x, cfg):
    """Upper regularized Q(a, x) by modified Lentz."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, cfg.max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < cfg.rel_tol * 0.1:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ComputationError(f"incomplete gamma continued fraction did not converge for a={a}, x={x}", (a, x))


def regularized_lower_gamma(a: float, x: float, cfg: SpecialFnConfig = DEFAULT) -> float:
    """P(a, x) = gamma(a, x) / Gamma(a)."""
    _check_args(a, x)
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x, cfg)
    return 1.0 - _gamma_cf(a, x, cfg)


def regularized_upper_gamma(a: float, x: float, cfg: SpecialFnConfig = DEFAULT) -> float:
    """Q(a, x) = Gamma(a, x) / Gamma(a)."""
    _check_args(a, x)
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x, cfg)
    return _gamma_cf(a, x, cfg)


def lower_incomplete_gamma(a: float, x: float, cfg: SpecialFnConfig = DEFAULT) -> float:
    r"""gamma(a, x) = \int_0^x t^{a-1} e^{-t} dt."""
    _check_args(a, x)
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x, cfg) * math.gamma(a)
    return (1.0 - _gamma_cf(a, x, cfg)) * math.gamma(a)


def upper_incomplete_gamma(a: float, x: float, cfg: SpecialFnConfig = DEFAULT) -> float:
    r"""Gamma(a, x) = \int_x^\infty t^{a-1} e^{-t} dt."""
    _check_args(a, x)
    if x == 0.0:
        return math.gamma(a)
    if x < a + 1.0:
        return (1.0 - _gamma_series(a, x, cfg)) * math.gamma(a)
    return _gamma_cf(a, x, cfg) * math.gamma(a)


def exponential_integral_e1(z: float, cfg: SpecialFnConfig = DEFAULT) -> float:
    r"""E1(z) = \int_z^\infty e^{-t}/t dt for real z > 0."""
    if not z > 0:
        raise ValidationError(f"E1 needs z > 0, got z={z}")
    if z <= 1.0:
        # -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!)
        total = 0.0
        fact = 1.0
        for k in range(1, cfg.max_iter + 1):
            fact *= -z / k
            term = -fact / k
            total += term
            if abs(term) < cfg.rel_tol * 0.01 * max(abs(total), 1e-300):
                return -EULER_GAMMA - math.log(z) + total
        raise ComputationError(f"E1 series did not converge for z={z}", (z,))
    b = z + 1.0
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, cfg.max_iter + 1):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < cfg.rel_tol * 0.1:
            return h * math.exp(-z)
    raise ComputationError(f"E1 continued fraction did not converge for z={z}", (z,))
