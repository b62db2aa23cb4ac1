"""Exact grid minimum of q over two-packet superpositions versus the closed-form curve.

For each (y, p0 sigma) the minimum over all states alpha_+ phi_+ + alpha_- phi_-
is the smallest generalized eigenvalue of the q form against the Gram matrix.
Writes a CSV to stdout.
"""

import argparse
import csv
import math
import sys

from qarrival.analytic import q_min_of_y
from qarrival.scenarios import grid_minimum


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ys", default="0.6,0.9,1.15,1.5")
    ap.add_argument("--p0-sigma", default="0.01,0.1,0.5")
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["y", "p0_sigma", "L_over_sigma", "grid_min", "qmin_printed", "qmin_overlap"])
    for ps in (float(v) for v in args.p0_sigma.split(",")):
        for y in (float(v) for v in args.ys.split(",")):
            m = grid_minimum(y, ps)
            w.writerow([y, ps, m["L_over_sigma"], m["min"], float(q_min_of_y(y)),
                        float(q_min_of_y(math.sqrt(2) * y))])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
