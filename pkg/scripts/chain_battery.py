"""Arithmetic, geometric and harmonic weighted means over a battery of
hazards and weights, written as CSV to stdout."""

import csv
import sys

import numpy as np

from wmeans.models import (additive_weibull, constant_weight, exponential_weight, kies,
                           one_minus_exponential_weight, pareto_one, power_weight, weibull)
from wmeans.weighted import WeightedModel, mean_triple_grid

HAZARDS = {"weibull(1,1.5)": weibull(1.0, 1.5), "additive_weibull(1,0.5,1,2)": additive_weibull(1.0, 0.5, 1.0, 2.0),
           "kies(0,1,1,0.5)": kies(0.0, 1.0, 1.0, 0.5), "pareto_one(2)": pareto_one(2.0)}
WEIGHTS = {"constant": constant_weight(), "power(1)": power_weight(1.0),
           "exponential(-1)": exponential_weight(-1.0), "one_minus_exponential(-1)": one_minus_exponential_weight(-1.0)}


def main():
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["hazard", "weight", "x", "A_w", "G_w", "H_w"])
    for hn, hz in HAZARDS.items():
        xs = np.linspace(float(hz.quantile(0.02)), float(hz.quantile(0.98)), 20)
        for wn, w in WEIGHTS.items():
            for t in mean_triple_grid(WeightedModel(hz, w), xs):
                h = "div" if t.hfr_divergent else f"{t.hfr:.9g}"
                writer.writerow([hn, wn, f"{t.x:.9g}", f"{t.afr:.9g}", f"{t.gfr:.9g}", h])


if __name__ == "__main__":
    main()
