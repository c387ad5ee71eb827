"""Search for two Iw-AFR components whose weighted series system has a
non-monotone running average hazard, and print the system curve."""

import argparse
import json

import numpy as np

from wmeans.systems import SearchBox, counterexample_nonclosure, series_components, system_running_average


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid-size", type=int, default=200)
    parser.add_argument("--curve-points", type=int, default=40)
    args = parser.parse_args()
    witness = counterexample_nonclosure(SearchBox(grid_size=args.grid_size))
    print(json.dumps(witness.to_dict(), indent=2, sort_keys=True))
    if not witness.found:
        return 1
    p = witness.params
    c1, c2 = series_components(p["alpha"], p["beta"], p["a"], p["b"], p["n"])
    grid = np.linspace(*witness.interval, args.curve_points)
    for t, a in zip(grid, system_running_average(c1, c2, grid)):
        print(f"{t:8.3f} {a:12.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
