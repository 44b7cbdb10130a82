"""Parallel-transport accuracy on the sym(2) barrier vs RK4 substeps per segment.

Prints CSV: steps, isomorphism residual, metric residual.
"""

import argparse
import csv
import sys

import numpy as np

from jordan_hessian import algebra as alg
from jordan_hessian import geometry as geo
from jordan_hessian import potential as pot


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, nargs="+", default=[5, 10, 25, 50, 100, 200])
    args = ap.parse_args(argv)

    M = alg.metrised(alg.sym(2))
    B = pot.canonical_barrier(pot.barrier_spec([(M, 1.0)]))
    path = [alg.sym_to_vec(np.array(m)) for m in (
        [[1.0, 0.0], [0.0, 1.0]],
        [[2.0, 0.5], [0.5, 1.5]],
        [[0.7, -0.2], [-0.2, 2.2]],
        [[1.2, 0.3], [0.3, 0.6]],
    )]
    Ma, Mb = geo.reconstruct_algebra(B, path[0]), geo.reconstruct_algebra(B, path[-1])

    w = csv.writer(sys.stdout)
    w.writerow(["steps", "isomorphism_residual", "metric_residual"])
    for n in args.steps:
        J = geo.parallel_transport(B, path, steps=n)
        w.writerow([n, f"{geo.isomorphism_residual(J, Ma, Mb):.3e}",
                    f"{geo.metric_preservation(B, J, path[0], path[-1]):.3e}"])


if __name__ == "__main__":
    main()
