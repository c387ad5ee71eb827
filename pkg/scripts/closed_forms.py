"""Weibull hazard under w(x) = e^(-x): closed forms against quadrature.

Prints one row per (beta, x) with the largest relative gap over the
survival, arithmetic, geometric and harmonic columns.
"""

import argparse

import numpy as np

from wmeans.models import exponential_weight, weibull
from wmeans.weighted import WeightedModel, mean_triple, weibull_exponential_weight_forms, weighted_survival


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--betas", default="0.5,2,3")
    parser.add_argument("--points", type=int, default=20)
    args = parser.parse_args()
    print(f"{'beta':>5} {'x':>7} {'S_w':>12} {'A_w':>12} {'G_w':>12} {'H_w':>12} {'max rel gap':>12}")
    for beta in (float(b) for b in args.betas.split(",")):
        m = WeightedModel(weibull(1.0, beta), exponential_weight(-1.0))
        for x in np.linspace(0.1, 5.0, args.points):
            x = float(x)
            cf = weibull_exponential_weight_forms(1.0, beta, -1.0, x)
            t = mean_triple(m, x, "quadrature")
            gaps = [abs(weighted_survival(m, x, "quadrature") / cf["survival"] - 1),
                    abs(t.afr / cf["afr"] - 1), abs(t.gfr / cf["gfr"] - 1)]
            if cf["hfr"] is not None:
                gaps.append(abs(t.hfr / cf["hfr"] - 1))
            h = "div" if cf["hfr"] is None else f"{cf['hfr']:.6g}"
            print(f"{beta:5.2f} {x:7.3f} {cf['survival']:12.6g} {cf['afr']:12.6g} {cf['gfr']:12.6g} "
                  f"{h:>12} {max(gaps):12.2e}")


if __name__ == "__main__":
    main()
