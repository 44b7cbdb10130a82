"""Third-order residual of series potentials as the spectral radius approaches 1.

Prints CSV: family, radius, max residual, mean residual.
"""

import argparse
import csv
import sys

import numpy as np

from jordan_hessian import algebra as alg
from jordan_hessian import geometry as geo
from jordan_hessian import potential as pot
from jordan_hessian.errors import JordanHessianError

FAMILIES = {
    "componentwise(3)": lambda: alg.metrised(alg.componentwise(3)),
    "spin(4)": lambda: alg.metrised(alg.spin(4)),
    "sym(3)": lambda: alg.metrised(alg.sym(3)),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--radii", type=float, nargs="+", default=[0.1, 0.3, 0.5, 0.7, 0.9, 0.95])
    args = ap.parse_args(argv)

    w = csv.writer(sys.stdout)
    w.writerow(["family", "radius", "max_residual", "mean_residual", "failed_points"])
    for name, make in FAMILIES.items():
        M = make()
        P = pot.series_field(M)
        rng = np.random.default_rng(args.seed)
        for r in args.radii:
            res, failed = [], 0
            for _ in range(args.points):
                x = rng.standard_normal(M.dim)
                x *= r / alg.spectral_radius(M.algebra, x)
                try:
                    res.append(geo.residual_third_parallel(P, x))
                except JordanHessianError:
                    failed += 1  # stencil crossed the convergence boundary
            w.writerow([name, r, f"{max(res):.3e}" if res else "", f"{np.mean(res):.3e}" if res else "", failed])


if __name__ == "__main__":
    main()
