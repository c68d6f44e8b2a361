"""Exact n-copy Helstrom error for |0> versus |+> with the fitted decay exponent and the Chernoff exponent."""

import argparse
import csv
import sys

import numpy as np

from qsdkit.asymptotics import chernoff_two, finite_n_error
from qsdkit.operators import projector


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--out")
    args = ap.parse_args(argv)
    a, b = projector([1, 0]), projector([1, 1])
    est = finite_n_error(a, b, n_max=args.n_max)
    xi = chernoff_two(a, b).xi
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "p_error", "rate"])
    for (n, p), r in zip(est.pairs(), est.rates):
        w.writerow([n, p, r])
    if args.out:
        fh.close()
    print(f"# fitted exponent {est.fitted_exponent:.6f}, chernoff {xi:.6f} (log 2 = {np.log(2):.6f})", file=sys.stderr)


if __name__ == "__main__":
    main()
