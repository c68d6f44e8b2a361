"""Error versus inconclusive rate for two pure states with a given overlap (equal priors)."""

import argparse
import csv
import sys

import numpy as np

from qsdkit.ensembles import pure_pair
from qsdkit.strategies import error_vs_inconclusive_curve


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--overlap", type=float, default=1 / np.sqrt(2))
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args(argv)
    rates = np.linspace(0, 1, args.points, endpoint=False)
    curve = error_vs_inconclusive_curve(pure_pair(args.overlap), rates, seed=args.seed)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["rate", "error"])
    w.writerows(curve.points())
    if args.out:
        fh.close()
    print(f"# {curve.label}", file=sys.stderr)


if __name__ == "__main__":
    main()
