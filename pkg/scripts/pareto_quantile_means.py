"""Pareto I quantile means: closed forms, quadrature, and the two
denominator conventions side by side."""

import argparse

import numpy as np

from wmeans.quantile import PAPER, WEIGHTED, pareto_closed_forms, pareto_quantile, quantile_means


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, default=2.0)
    args = parser.parse_args()
    qm = pareto_quantile(args.alpha)
    print(f"{'u':>5} {'QA cf':>11} {'QA quad':>11} {'QG cf':>11} {'QG quad':>11} {'QH cf':>11} "
          f"{'QH quad':>11} {'QA Q-Q0':>11}")
    for u in np.round(np.linspace(0.1, 0.9, 9), 10):
        cf = pareto_closed_forms(args.alpha, float(u))
        t = quantile_means(qm, float(u), PAPER)
        w = quantile_means(qm, float(u), WEIGHTED)
        print(f"{u:5.2f} {cf['qa']:11.7f} {t.qa:11.7f} {cf['qg']:11.7f} {t.qg:11.7f} "
              f"{cf['qh']:11.7f} {t.qh:11.7f} {w.qa:11.7f}")


if __name__ == "__main__":
    main()
