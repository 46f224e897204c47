"""Approximation error of stripe still-state strains against the 1/(n-1) bound.

Writes CSV rows ``n, trial, method, error, bound`` for random flat-bottom
targets; the same seed reproduces the file exactly.
"""
import argparse
import csv
import sys

import numpy as np

from bistable_lattice.lattice import build_lattice
from bistable_lattice.strain import flat_bottom_point, strain_approximation_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[5, 10, 20, 40])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--s", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    xs = np.random.default_rng(args.seed).uniform(size=(args.trials, 3))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "trial", "method", "error", "bound"])
    for n in args.sizes:
        lat = build_lattice(n)
        for method in ("argmax", "greedy"):
            for k, x in enumerate(xs):
                rep = strain_approximation_check(lat, flat_bottom_point(x, args.s), args.s, solve=False, method=method)
                w.writerow([n, k, method, repr(rep.error), repr(rep.bound)])


if __name__ == "__main__":
    main()
