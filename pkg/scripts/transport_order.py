"""Norm drift of RK4 parallel transport versus the number of steps.

Prints the observed convergence order log2(drift(m) / drift(2m)).
Usage: python scripts/transport_order.py [--dim 3] [--seed 0]
"""
import argparse

import numpy as np

from bws.geodesics import geodesic
from bws.second_order import parallel_transport


def random_spd(rng, n):
    A = rng.standard_normal((n, n))
    return A @ A.T + 0.5 * np.eye(n)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    spec = geodesic(random_spd(rng, args.dim), random_spd(rng, args.dim))
    V = rng.standard_normal((args.dim, args.dim))
    V = V + V.T

    prev = None
    print(f"{'steps':>6}  {'drift':>12}  {'order':>6}")
    for m in (5, 10, 20, 40, 80, 160):
        drift = parallel_transport(spec, V, n_steps=m).norm_drift
        order = "" if prev is None else f"{np.log2(prev / drift):6.2f}"
        print(f"{m:6d}  {drift:12.4e}  {order}")
        prev = drift


if __name__ == "__main__":
    main()
