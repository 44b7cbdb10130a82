"""Finite-difference consistency of exact barrier derivatives vs step and Richardson depth.

Prints CSV: order, base_step, levels, consistency.
"""

import argparse
import csv
import sys

import numpy as np

from jordan_hessian import algebra as alg
from jordan_hessian import potential as pot
from jordan_hessian.config import StencilConfig
from jordan_hessian.numdiff import fd_consistency


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=float, nargs="+", default=[1e-1, 3e-2, 1e-2, 3e-3, 1e-3])
    ap.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args(argv)

    M = alg.metrised(alg.sym(2))
    B = pot.canonical_barrier(pot.barrier_spec([(M, 1.0)]))
    x = alg.sym_to_vec(np.array([[1.4, 0.3], [0.3, 0.9]]))

    w = csv.writer(sys.stdout)
    w.writerow(["order", "base_step", "levels", "consistency"])
    for order in (1, 2, 3):
        exact = B.derivative(x, order)
        for h in args.steps:
            for lv in args.levels:
                cfg = StencilConfig(base_step=h, richardson_levels=lv)
                try:
                    c = fd_consistency(B.value, exact, x, order, cfg, B.in_domain)
                    w.writerow([order, h, lv, f"{c:.3e}"])
                except ValueError as exc:
                    w.writerow([order, h, lv, f"error: {exc}"])


if __name__ == "__main__":
    main()
