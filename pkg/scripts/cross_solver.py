"""Compare the Helstrom, qubit-geometric and fixed-point solvers on random ensembles.

Writes one CSV row per ensemble: python3 scripts/cross_solver.py --count 200 --out cross.csv
"""

import argparse
import csv
import sys
import time

import numpy as np

from qsdkit.minerror import helstrom_two_state, solve_fixed_point
from qsdkit.qubit import solve_qubit
from qsdkit.random import random_ensemble


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "n_states", "helstrom", "qubit", "fixed_point", "max_gap", "fp_iterations", "certified", "seconds"])
    for i in range(args.count):
        n = int(rng.integers(2, 6))
        ens = random_ensemble(n, 2, rng)
        t0 = time.perf_counter()
        q, f = solve_qubit(ens), solve_fixed_point(ens)
        h = helstrom_two_state(ens).p_guess if n == 2 else float("nan")
        vals = [v for v in (h, q.p_guess, f.p_guess) if np.isfinite(v)]
        w.writerow([i, n, h, q.p_guess, f.p_guess, max(vals) - min(vals), f.iterations, q.passed and f.passed, time.perf_counter() - t0])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
