"""Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

Integrands are called with numpy arrays of abscissae and must return arrays
of the same shape. They must be side-effect free.

Endpoint singularities (power or log type) are handled by sweeping dyadic
panels toward the offending endpoint until the panel offset falls below
``singularity_offset`` times the interval length, extrapolating the
tail (geometric, or geometric times a linear factor for log
singularities), and then repeating with the offset halved. Disagreement
between the two passes is reported as divergence when the panel
contributions stop shrinking, and as an accuracy failure otherwise.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import AccuracyError, DivergenceError, DomainError, ValidationError

_EPS = np.finfo(float).eps

# Kronrod abscissae on [0, 1]; odd indices (1, 3, 5) are the Gauss points.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_depth: int = 50
    singularity_offset: float = 1e-12
    max_panels: int = 4000

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValidationError("abs_tol and rel_tol must be > 0")
        if self.max_depth < 1:
            raise ValidationError("max_depth must be >= 1")
        if not 0 < self.singularity_offset < 1e-6:
            raise ValidationError("singularity_offset must lie in (0, 1e-6)")


DEFAULT = QuadratureConfig()


class QuadResult(NamedTuple):
    value: float
    error: float


def _gk15(f, a, b):
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre + half * _NODES
    with np.errstate(all="ignore"):
        y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise DomainError(f"integrand is not finite at x={bad!r}")
    resk = half * float(_KW @ y)
    resg = half * float(_GW @ y)
    resabs = abs(half) * float(_KW @ np.abs(y))
    mean = resk / (b - a) if b != a else 0.0
    resasc = abs(half) * float(_KW @ np.abs(y - mean))
    err = abs(resk - resg)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50.0 * _EPS):
        err = max(50.0 * _EPS * resabs, err)
    return resk, float(err)


def _tolerance(cfg, value):
    return max(cfg.abs_tol, cfg.rel_tol * abs(value))


def _adaptive(f, a, b, cfg, abs_tol=None):
    """Globally adaptive bisection; returns QuadResult or raises AccuracyError."""
    val, err = _gk15(f, a, b)
    heap = [(-err, a, b, val, err, 0)]
    total, total_err = val, err
    frozen_err = 0.0
    panels = 1
    floor = cfg.abs_tol if abs_tol is None else abs_tol
    while heap:
        tol = max(floor, cfg.rel_tol * abs(total))
        if total_err <= tol:
            return QuadResult(total, total_err)
        if panels >= cfg.max_panels:
            break
        _, lo, hi, v, e, depth = heapq.heappop(heap)
        if depth >= cfg.max_depth:
            frozen_err += e
            continue
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        panels += 1
        heapq.heappush(heap, (-e1, lo, mid, v1, e1, depth + 1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2, depth + 1))
    tol = max(floor, cfg.rel_tol * abs(total))
    if total_err <= tol:
        return QuadResult(total, total_err)
    raise AccuracyError(
        f"quadrature on [{a!r}, {b!r}] stopped at error {total_err:.3g} > {tol:.3g}",
        estimate=total, error=total_err,
    )


def _finite_at(f, x):
    with np.errstate(all="ignore"):
        try:
            y = np.asarray(f(np.array([x], dtype=float)), dtype=float)
        except (ZeroDivisionError, ValueError, OverflowError):
            return False
    return bool(np.all(np.isfinite(y)))


def _sweep(f, a, b, cfg, offset, sign):
    """Dyadic panel contributions toward endpoint ``a`` (sign=+1) or ``b`` (sign=-1).

    Stops early when the remaining geometric tail is negligible; otherwise
    sweeps until the panel offset is below ``offset * (b - a)`` and then adds
    one more panel so the caller can compare offsets ``eps`` and ``eps/2``.
    Returns (contributions, summed error, stopped_early).
    """
    length = b - a
    floor = cfg.abs_tol * 1e-3
    contribs = []
    err = 0.0
    total = 0.0
    hi_off = length
    while True:
        lo_off = 0.5 * hi_off
        if sign > 0:
            c, e = _adaptive(f, a + lo_off, a + hi_off, cfg, abs_tol=floor)
        else:
            c, e = _adaptive(f, b - hi_off, b - lo_off, cfg, abs_tol=floor)
        contribs.append(c)
        total += c
        err += e
        if hi_off <= offset * length:
            return contribs, err, False
        hi_off = lo_off
        if len(contribs) >= 4:
            r = contribs[-1] / contribs[-2] if contribs[-2] != 0 else 0.0
            if 0 <= r < 0.9 and abs(contribs[-1]) / (1 - r) < 1e-3 * _tolerance(cfg, total):
                return contribs, err, True


def _extrapolated(contribs, model="linear"):
    """Partial sum plus the tail of the panel contributions.

    ``model="geometric"`` assumes d_j = A r^j with r the last ratio.
    ``model="linear"`` assumes d_j = r^j (A + B j): the r^j part covers power
    singularities, the j r^j part a logarithmic factor. With four terms r
    comes from the recurrence d_{j+2} - 2 r d_{j+1} + r^2 d_j = 0; with
    fewer, or when the sequence is purely geometric, r is the last ratio.
    ``model="two-rate"`` assumes d_j = A r1^j + B r2^j, for integrands that
    are a sum of two power singularities. ``model="wynn"`` runs the epsilon
    algorithm on the partial sums.
    """
    total = math.fsum(contribs)
    if len(contribs) < 2 or contribs[-1] == 0.0:
        return total
    if model == "wynn":
        return _wynn(contribs)
    d_last, d_prev = contribs[-1], contribs[-2]
    r = d_last / d_prev if d_prev != 0 else math.inf
    if model == "geometric":
        if not 0 <= r < 1:
            return math.copysign(math.inf, d_last)
        return total + d_last * r / (1.0 - r)
    if model == "two-rate":
        # d_j = A r1^j + B r2^j obeys d_{j+2} = s d_{j+1} - p d_j.
        if len(contribs) < 4:
            return math.nan
        d0, d1, d2, d3 = contribs[-4:]
        det = d1 * d1 - d0 * d2
        if det == 0.0:
            return math.nan
        s = (d2 * d1 - d3 * d0) / det
        p = (d2 * d2 - d1 * d3) / det
        disc = s * s - 4.0 * p
        roots = abs(s) / 2.0 + math.sqrt(disc) / 2.0 if disc >= 0 else math.sqrt(abs(p))
        if not roots < 1.0:
            return math.copysign(math.inf, d_last)
        return total + (s * d3 - p * (d3 + d2)) / (1.0 - s + p)
    if len(contribs) >= 4:
        d0, d1, d2, d3 = contribs[-4:]
        den = d1 * d1 - d0 * d2
        if abs(den) > 1e-6 * d1 * d1:
            r = (d1 * d2 - d0 * d3) / (2.0 * den)
    if not 0 <= r < 1:
        return math.copysign(math.inf, d_last)
    slope = d_last - r * d_prev
    return total + d_last * r / (1.0 - r) + slope * r / (1.0 - r) ** 2


def _wynn(contribs, terms=48):
    """Wynn epsilon extrapolation of the partial sums of ``contribs``.

    Exact for sums of a few geometric sequences, including confluent ones
    (j r^j), which is what mixed power and log singularities produce.
    Returns the even-column estimate whose neighbours agree best.
    """
    if len(contribs) < 3:
        return math.nan
    head = math.fsum(contribs[:-terms]) if len(contribs) > terms else 0.0
    sums = np.cumsum(contribs[-terms:])
    prev = np.zeros(sums.size + 1)
    cur = sums.astype(float)
    best, best_gap = float(cur[-1]), abs(float(cur[-1] - cur[-2]))
    col = 0
    with np.errstate(all="ignore"):
        while cur.size >= 3:
            nxt = prev[1:cur.size] + 1.0 / np.diff(cur)
            prev, cur = cur, nxt
            col += 1
            if col % 2 == 0 and cur.size >= 2 and np.all(np.isfinite(cur[-2:])):
                gap = abs(float(cur[-1] - cur[-2]))
                if gap < best_gap:
                    best, best_gap = float(cur[-1]), gap
            if not np.all(np.isfinite(cur)):
                break
    return head + best


def _not_shrinking(contribs, window=4):
    """Last ``window`` contributions share a sign and none is smaller than its predecessor."""
    tail = contribs[-window:]
    if len(tail) < 2 or tail[-1] == 0.0:
        return False
    if any(math.copysign(1.0, d) != math.copysign(1.0, tail[-1]) or d == 0.0 for d in tail):
        return False
    return all(abs(y) >= 0.999 * abs(x) for x, y in zip(tail, tail[1:]))


def _singular(f, a, b, cfg, sign):
    contribs, err, early = _sweep(f, a, b, cfg, cfg.singularity_offset, sign)
    if early:
        return QuadResult(math.fsum(contribs), err)
    # Contributions that do not shrink mean the improper integral diverges;
    # this must be settled first since the epsilon algorithm happily
    # assigns finite anti-limits to divergent series.
    if _not_shrinking(contribs):
        # Competing singular terms can keep the panels growing for a while
        # before the dominant one takes over; look much closer once.
        contribs, err, early = _sweep(f, a, b, cfg, cfg.singularity_offset * 1e-18, sign)
        if early:
            return QuadResult(math.fsum(contribs), err)
    if _not_shrinking(contribs):
        raise DivergenceError(
            f"integral over [{a!r}, {b!r}] diverges at the {'left' if sign > 0 else 'right'} endpoint",
            estimate=math.copysign(math.inf, contribs[-1]), error=math.inf,
        )
    best = _most_stable(contribs)
    if best is None or best[0] > _tolerance(cfg, best[2]):
        # Slowly decaying tails (exponents near -1, often with a log factor)
        # need more dyadic terms before the extrapolation settles.
        deep, deep_err, early = _sweep(f, a, b, cfg, cfg.singularity_offset * 1e-18, sign)
        if early:
            return QuadResult(math.fsum(deep), deep_err)
        if not _not_shrinking(deep):
            retry = _most_stable(deep)
            if retry is not None and (best is None or retry[0] < best[0]):
                best, err = retry, deep_err
    if best is not None:
        diff, v1, v2 = best
        if diff <= _tolerance(cfg, v2):
            return QuadResult(v2, max(err, diff))
    v1, v2 = (best[1], best[2]) if best is not None else (math.inf, math.inf)
    raise AccuracyError(
        f"endpoint-singular integral over [{a!r}, {b!r}] is sensitive to the offset "
        f"({v1!r} vs {v2!r})",
        estimate=v2, error=abs(v1 - v2) if math.isfinite(v1 - v2) else math.inf,
    )


def _most_stable(contribs):
    """(|v1 - v2|, v1, v2) for the tail model most stable between offsets
    eps and eps/2, or None when no model gives finite values.

    A sum of two power laws can make the linear model's recurrence
    ill-conditioned while the geometric one is fine, and a log factor
    does the opposite.
    """
    best = None
    for model in ("geometric", "linear", "two-rate", "wynn"):
        v1 = _extrapolated(contribs[:-1], model)
        v2 = _extrapolated(contribs, model)
        if math.isfinite(v1) and math.isfinite(v2):
            diff = abs(v1 - v2)
            if best is None or diff < best[0]:
                best = (diff, v1, v2)
    return best


def integrate(f: Callable, a: float, b: float, cfg: QuadratureConfig = DEFAULT) -> QuadResult:
    """Integrate ``f`` over [a, b]; returns ``(value, error_estimate)``.

    Raises DomainError for non-finite interior values, AccuracyError when the
    tolerance cannot be met (with the best estimate attached) and
    DivergenceError for endpoint singularities that are not integrable.
    """
    a = float(a)
    b = float(b)
    if not a <= b:
        raise ValidationError(f"integrate needs a <= b, got [{a}, {b}]")
    if a == b:
        return QuadResult(0.0, 0.0)
    left_ok = _finite_at(f, a)
    right_ok = _finite_at(f, b)
    if left_ok and right_ok:
        return _adaptive(f, a, b, cfg)
    if not left_ok and not right_ok:
        m = 0.5 * (a + b)
        r1 = _singular(f, a, m, cfg, +1)
        r2 = _singular(f, m, b, cfg, -1)
        return QuadResult(r1.value + r2.value, r1.error + r2.error)
    return _singular(f, a, b, cfg, +1 if not left_ok else -1)


def integrate_to_grid(f: Callable, grid: Sequence[float], cfg: QuadratureConfig = DEFAULT,
                      lower: float = 0.0) -> np.ndarray:
    """Cumulative integrals ``[int_lower^{g_i} f for g_i in grid]``, panel by panel."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1:
        raise ValidationError("grid must be one-dimensional")
    if grid.size and (grid[0] < lower or np.any(np.diff(grid) < 0)):
        raise ValidationError("grid must be ascending and start at or above the lower limit")
    out = np.empty(grid.size)
    acc = 0.0
    prev = lower
    for i, g in enumerate(grid):
        try:
            acc += integrate(f, prev, g, cfg).value
        except AccuracyError as exc:
            raise type(exc)(f"panel {i} [{prev!r}, {g!r}]: {exc}", estimate=exc.estimate,
                            error=exc.error) from exc
        except DomainError as exc:
            raise DomainError(f"panel {i} [{prev!r}, {g!r}]: {exc}") from exc
        out[i] = acc
        prev = g
    return out
