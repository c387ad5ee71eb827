"""Command-line front end.

    wmeans eval --model m.json --grid 0.1:5:50 [--format csv|json] [--out path]
    wmeans classify --model m.json [--grid a:b:n]
    wmeans verify --suite chain|bounds|postulates|exponential|special|mixture|all --model m.json
    wmeans quantile --model m.json [--grid 0.01:0.99:99] [--theta 2]
    wmeans system [--model mixture.json] [--seed 0]
    wmeans counterexample [--model box.json]

Exit status: 0 when every requested check passes, 1 when a check fails,
2 for invalid input (error JSON on stderr), 3 for numerical accuracy
failures (partial results are still written, failing cells flagged).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import special
from .aging import bound_check_means, classify
from .characterization import test_exponentiality_via_mean_equality
from .errors import AccuracyError, DegenerateError, ValidationError
from .models import (constant_weight, exponential, exponential_weight, make_hazard, make_weight,
                     power_weight, weibull)
from .quadrature import QuadratureConfig
from .quantile import MODES, PAPER, phm_quantile, phm_transform, qa, quantile_from_hazard, quantile_means
from .systems import (MixtureSpec, SearchBox, counterexample_nonclosure, mixture_as_series,
                      mixture_hazard, series_hazard)
from .weighted import DIVERGENT, WeightedModel, check_validity_postulates, mean_triple, weighted_survival

COMMANDS = ("eval", "classify", "verify", "quantile", "system", "counterexample")
SUITES = ("chain", "bounds", "postulates", "exponential", "special", "mixture", "all")

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_ACCURACY = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: Optional[str] = None
    grid: Optional[tuple] = None
    out: Optional[str] = None
    format: str = "json"
    suite: str = "all"
    theta: Optional[float] = None
    seed: int = 0
    tol_quad: Optional[float] = None
    tol_check: float = 1e-8
    mode: str = PAPER

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ValidationError("format must be csv or json")
        if self.suite not in SUITES:
            raise ValidationError(f"suite must be one of {SUITES}")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if self.grid is not None:
            pts = np.asarray(self.grid, dtype=float)
            if pts.size < 2 or np.any(np.diff(pts) <= 0):
                raise ValidationError("grid needs at least 2 strictly ascending points")
        if self.theta is not None and not self.theta > 0:
            raise ValidationError("theta must be > 0")
        if self.tol_quad is not None and not self.tol_quad > 0:
            raise ValidationError("tol-quad must be > 0")
        if not self.tol_check > 0:
            raise ValidationError("tol-check must be > 0")

    @property
    def quad(self) -> QuadratureConfig:
        return QuadratureConfig() if self.tol_quad is None else QuadratureConfig(rel_tol=self.tol_quad)


def parse_grid(text: str) -> tuple:
    """``start:stop:count`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 2 or not start < stop:
                raise ValidationError("grid needs count >= 2 and start < stop")
            return tuple(float(v) for v in np.linspace(start, stop, count))
        return tuple(float(v) for v in text.split(","))
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(f"cannot parse grid {text!r}; expected start:stop:count") from exc


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return format(float(v), "#.9g")


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def _load_json(path):
    if path is None:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def load_model(path, quad=None) -> WeightedModel:
    doc = _load_json(path)
    if doc is None:
        raise ValidationError("--model is required for this command")
    if not isinstance(doc, dict) or "hazard" not in doc:
        raise ValidationError("model document needs a 'hazard' object")
    hazard = make_hazard(doc["hazard"])
    weight = make_weight(doc.get("weight"))
    return WeightedModel(hazard, weight, quad or QuadratureConfig())


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _eval(cfg: RunConfig):
    m = load_model(cfg.model, cfg.quad)
    grid = cfg.grid or parse_grid("0.1:5:50")
    rows, status = [], EXIT_OK
    for x in grid:
        row = {"x": x, "h": float(m.h(x)), "h_w": float(m.weighted_hazard(x))}
        try:
            t = mean_triple(m, x)
            row["S_w"] = weighted_survival(m, x)
            row["A_w"] = t.afr
            row["G_w"] = "div" if t.gfr is DIVERGENT else t.gfr
            row["H_w"] = "div" if t.hfr_divergent else t.hfr
        except AccuracyError:
            status = EXIT_ACCURACY
            for k in ("S_w", "A_w", "G_w", "H_w"):
                row.setdefault(k, "acc")
        rows.append(row)
    columns = ["x", "h", "h_w", "S_w", "A_w", "G_w", "H_w"]
    if cfg.format == "csv":
        return _csv_text(columns, rows), status
    js = [{k: ({"divergent": True} if row[k] == "div" else
               {"accuracy_failure": True} if row[k] == "acc" else row[k]) for k in columns} for row in rows]
    return _json_text({"command": "eval", "model": _model_dict(m), "rows": js}), status


def _model_dict(m: WeightedModel) -> dict:
    return {"hazard": m.hazard.to_dict(), "weight": m.weight.to_dict()}


def _classify(cfg: RunConfig):
    m = load_model(cfg.model, cfg.quad)
    interval = None
    size = 200
    if cfg.grid is not None:
        interval = (cfg.grid[0], cfg.grid[-1])
        size = max(16, len(cfg.grid))
    report = classify(m, interval, size)
    doc = {"command": "classify", "model": _model_dict(m), "report": report.to_dict()}
    ok = report.transmission_ok and not doc["report"]["inclusion_violations"]
    return _json_text(doc), EXIT_OK if ok else EXIT_FAIL


def _suite_chain(m, grid, tol):
    results = []
    weights = [m.weight, constant_weight(), power_weight(1.0), exponential_weight(-1.0)]
    worst = 0.0
    for w in weights:
        wm = WeightedModel(m.hazard, w, m.quad)
        for x in grid:
            t = mean_triple(wm, x)
            if not t.all_finite:
                continue
            worst = max(worst, (t.gfr - t.afr) / t.afr, (t.hfr - t.gfr) / t.gfr)
    results.append({"name": "am-gm-hm chain", "max_violation": worst, "passed": worst <= tol})
    return results


def _suite_bounds(m, grid, tol):
    return [{"name": r.comparison, "status": r.status, "max_violation": r.max_violation,
             "reason": r.reason, "passed": r.status != "fail"} for r in bound_check_means(m, grid, tol)]


def _suite_postulates(m, grid, tol):
    rep = check_validity_postulates(m, float(grid[-1]))
    d = rep.to_dict()
    return [{"name": "validity postulates", "report": d,
             "passed": rep.nonnegative and rep.finite_on_horizon}]


def _suite_exponential(m, grid, tol):
    out = []
    for which in ("AG", "GH", "AH"):
        v = test_exponentiality_via_mean_equality(m, which, grid, max(tol, 1e-6))
        out.append({"name": f"equality {which}", "verdict": v.verdict, "statistic": v.statistic,
                    "passed": v.verdict != "inconclusive"})
    return out


def _suite_special(m, grid, tol):
    worst_c = worst_r = 0.0
    for a in (0.5, 1.0, 2.0, 3.5):
        for x in (0.1, 1.0, 5.0):
            g = special.lower_incomplete_gamma(a, x)
            G = special.upper_incomplete_gamma(a, x)
            worst_c = max(worst_c, abs(g + G - math.gamma(a)) / math.gamma(a))
            lhs = special.lower_incomplete_gamma(a + 1, x)
            rhs = a * g - x ** a * math.exp(-x)
            worst_r = max(worst_r, abs(lhs - rhs) / abs(lhs))
    return [{"name": "gamma complement", "max_violation": worst_c, "passed": worst_c <= 1e-10},
            {"name": "gamma recurrence", "max_violation": worst_r, "passed": worst_r <= 1e-9}]


def _random_mixture(rng):
    k = int(rng.integers(1, 5))
    props = rng.dirichlet(np.ones(k))
    props = props / math.fsum(props)
    comps = []
    for _ in range(k):
        if rng.random() < 0.5:
            comps.append(exponential(float(rng.uniform(0.2, 3.0))))
        else:
            comps.append(weibull(float(rng.uniform(0.2, 3.0)), float(rng.uniform(0.5, 3.0))))
    return MixtureSpec(comps, props)


def _mixture_report(spec, grid):
    series = mixture_as_series(spec)
    gap, sum_gap = 0.0, 0.0
    for x in grid:
        h, p = mixture_hazard(spec, x)
        gap = max(gap, abs(series_hazard(series, x) - h))
        sum_gap = max(sum_gap, abs(math.fsum(p) - 1.0))
    return {"components": [c.to_dict() for c in spec.components], "proportions": list(spec.proportions),
            "max_hazard_gap": gap, "max_weight_sum_gap": sum_gap,
            "passed": gap <= 1e-12 and sum_gap == 0.0}


def _suite_mixture(m, grid, tol, seed=0, count=20):
    rng = np.random.default_rng(seed)
    reports = [_mixture_report(_random_mixture(rng), grid) for _ in range(count)]
    return [{"name": "mixture-series identity", "cases": len(reports),
             "max_hazard_gap": max(r["max_hazard_gap"] for r in reports),
             "passed": all(r["passed"] for r in reports)}]


def _verify(cfg: RunConfig):
    grid = cfg.grid or parse_grid("0.5:5:10")
    suites = [s for s in SUITES if s != "all"] if cfg.suite == "all" else [cfg.suite]
    needs_model = {"chain", "bounds", "postulates", "exponential"}
    m = None
    if needs_model & set(suites):
        if cfg.model is None and cfg.suite == "all":
            suites = [s for s in suites if s not in needs_model]
        else:
            m = load_model(cfg.model, cfg.quad)
    runners = {"chain": _suite_chain, "bounds": _suite_bounds, "postulates": _suite_postulates,
               "exponential": _suite_exponential, "special": _suite_special}
    results = {}
    for s in suites:
        if s == "mixture":
            results[s] = _suite_mixture(m, grid, cfg.tol_check, cfg.seed)
        else:
            results[s] = runners[s](m, grid, cfg.tol_check)
    passed = all(item["passed"] for items in results.values() for item in items)
    doc = {"command": "verify", "suites": results, "passed": passed, "seed": cfg.seed}
    if m is not None:
        doc["model"] = _model_dict(m)
    return _json_text(doc), EXIT_OK if passed else EXIT_FAIL


def _quantile(cfg: RunConfig):
    m = load_model(cfg.model, cfg.quad)
    qm = quantile_from_hazard(m.hazard)
    grid = cfg.grid or parse_grid("0.01:0.99:99")
    if grid[0] <= 0 or grid[-1] >= 1:
        raise ValidationError("quantile grid must lie inside (0, 1)")
    rows, status = [], EXIT_OK
    phm = None
    if cfg.theta is not None:
        _, phm = phm_quantile(qm, cfg.theta, grid, mode=cfg.mode)
    qy = phm_transform(qm, cfg.theta) if phm is not None else None
    for u in grid:
        row = {"u": u, "Q": float(qm.Q(u)), "q": float(qm.q(u)), "h_q": float(qm.h_q(u))}
        try:
            t = quantile_means(qm, u, cfg.mode)
            row["QA"] = t.qa
            row["QG"] = "div" if t.qg is DIVERGENT else t.qg
            row["QH"] = "div" if t.qh_divergent else t.qh
        except AccuracyError:
            status = EXIT_ACCURACY
            for k in ("QA", "QG", "QH"):
                row.setdefault(k, "acc")
        if qy is not None:
            row["QA_Y"] = qa(qy, u, cfg.mode)
            row["theta_QA_X"] = cfg.theta * row["QA"] if not isinstance(row["QA"], str) else "acc"
        rows.append(row)
    columns = ["u", "Q", "q", "h_q", "QA", "QG", "QH"] + (["QA_Y", "theta_QA_X"] if qy is not None else [])
    if cfg.format == "csv":
        return _csv_text(columns, rows), status
    js = [{k: ({"divergent": True} if row[k] == "div" else
               {"accuracy_failure": True} if row[k] == "acc" else row[k]) for k in columns} for row in rows]
    doc = {"command": "quantile", "mode": cfg.mode, "model": _model_dict(m), "rows": js}
    if phm is not None:
        doc["phm"] = phm.to_dict()
    return _json_text(doc), status


def _system(cfg: RunConfig):
    grid = cfg.grid or parse_grid("0:5:51")
    doc = _load_json(cfg.model)
    if doc is not None:
        mix = doc.get("mixture") if isinstance(doc, dict) else None
        if not isinstance(mix, dict):
            raise ValidationError("system model document needs a 'mixture' object")
        comps = [make_hazard(c) for c in mix.get("components", [])]
        spec = MixtureSpec(comps, mix.get("proportions", []))
        reports = [_mixture_report(spec, grid)]
    else:
        rng = np.random.default_rng(cfg.seed)
        reports = [_mixture_report(_random_mixture(rng), grid) for _ in range(20)]
    passed = all(r["passed"] for r in reports)
    out = {"command": "system", "seed": cfg.seed, "grid": list(grid), "mixtures": reports, "passed": passed}
    return _json_text(out), EXIT_OK if passed else EXIT_FAIL


def _counterexample(cfg: RunConfig):
    doc = _load_json(cfg.model) or {}
    try:
        box = SearchBox(**{k: (tuple(v) if isinstance(v, list) else v) for k, v in doc.items()})
    except TypeError as exc:
        raise ValidationError(f"bad search box: {exc}") from exc
    witness = counterexample_nonclosure(box)
    out = {"command": "counterexample", "witness": witness.to_dict()}
    return _json_text(out), EXIT_OK if witness.found else EXIT_FAIL


_DISPATCH = {"eval": _eval, "classify": _classify, "verify": _verify, "quantile": _quantile,
             "system": _system, "counterexample": _counterexample}


def run(cfg: RunConfig) -> tuple:
    """Execute ``cfg``; returns (exit status, output text)."""
    text, status = _DISPATCH[cfg.command](cfg)
    return status, text


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wmeans", description="Weighted mean failure rates toolkit")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--model", help="path to a JSON model document")
    parser.add_argument("--grid", help="start:stop:count or comma-separated values")
    parser.add_argument("--out", help="write output here instead of stdout")
    parser.add_argument("--format", default="json", choices=("csv", "json"))
    parser.add_argument("--suite", default="all", choices=SUITES)
    parser.add_argument("--theta", type=float)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol-quad", type=float, dest="tol_quad")
    parser.add_argument("--tol-check", type=float, dest="tol_check", default=1e-8)
    parser.add_argument("--mode", default=PAPER, choices=MODES,
                        help="quantile denominator convention")
    return parser


def _error(kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig(
            command=args.command, model=args.model,
            grid=parse_grid(args.grid) if args.grid else None,
            out=args.out, format=args.format, suite=args.suite, theta=args.theta,
            seed=args.seed, tol_quad=args.tol_quad, tol_check=args.tol_check, mode=args.mode,
        )
        status, text = run(cfg)
    except _ArgError as exc:
        _error("usage", str(exc))
        return EXIT_INVALID
    except (ValidationError, DegenerateError) as exc:
        _error("validation", str(exc))
        return EXIT_INVALID
    except AccuracyError as exc:
        _error("accuracy", str(exc))
        return EXIT_ACCURACY
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
