"""Koczkodaj index of random perturbations of consistent matrices, and the n = 4 left-orbit search.

Multiplies the upper entries of a random consistent matrix by exp(sigma * N(0,1))
and reports the mean index per noise level.
"""

import argparse
import math

import numpy as np

from formalkp.groups import PosReal
from formalkp.pc import (LEFT_ORBIT_COUNTEREXAMPLE, PCMatrix, consistent_from_weights, koczkodaj_kii,
                         left_orbit_consistentize)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    G = PosReal(exact=False)
    for sigma in (0.0, 0.01, 0.05, 0.1, 0.3):
        vals = []
        for _ in range(args.trials):
            C = consistent_from_weights(G, [math.exp(x) for x in rng.normal(size=args.n)])
            up = {(i, j): C.entries[i][j] * math.exp(sigma * rng.normal())
                  for i in range(args.n) for j in range(i + 1, args.n)}
            vals.append(koczkodaj_kii(PCMatrix.from_upper(G, args.n, up)))
        print(f"sigma {sigma:5.2f}: mean Kii {np.mean(vals):.4f}  max {np.max(vals):.4f}")
    r = left_orbit_consistentize(PCMatrix.from_upper(PosReal(), 4, LEFT_ORBIT_COUNTEREXAMPLE), rng=rng)
    print("n = 4 left-orbit search:", "success" if r.success else "no consistent matrix in the orbit", r.certificate)


if __name__ == "__main__":
    main()
