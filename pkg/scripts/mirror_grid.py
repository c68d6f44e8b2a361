"""Closed-form mirror-symmetric guessing probability against the fixed-point solver on a (p, theta) grid."""

import argparse
import csv
import sys

import numpy as np

from qsdkit.ensembles import mirror_ensemble
from qsdkit.minerror import mirror_symmetric_guess, mirror_threshold, solve_fixed_point


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out")
    args = ap.parse_args(argv)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["p", "theta", "p_star", "branch", "closed_form", "solver", "deviation"])
    for p in np.round(np.arange(0.05, 0.5001, 0.05), 10):
        for theta in np.round(np.arange(0.1, 1.5001, 0.1), 10):
            ps = mirror_threshold(theta)
            closed = mirror_symmetric_guess(p, theta)
            num = solve_fixed_point(mirror_ensemble(p, theta)).p_guess
            w.writerow([p, theta, ps, 1 if p >= ps else 2, closed, num, abs(closed - num)])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
