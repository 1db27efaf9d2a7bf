"""Ratio of W^2(S, S + t H) to its quadratic model as t -> 0.

Usage: python scripts/expansion_ratio.py [--dim 3] [--seed 0]
"""
import argparse

import numpy as np

from bws.metric import expansion_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    A = rng.standard_normal((args.dim, args.dim))
    S = A @ A.T + args.dim * np.eye(args.dim)
    H = rng.standard_normal((args.dim, args.dim))
    H = 0.5 * (H + H.T)
    H *= 0.9 * np.linalg.eigvalsh(S)[0] / np.linalg.norm(H, 2)

    print(f"{'t':>8}  {'W^2':>14}  {'model':>14}  {'ratio - 1':>12}")
    for t in 10.0 ** -np.arange(1, 6):
        lhs, rhs = expansion_check(S, H, t)
        print(f"{t:8.0e}  {lhs:14.6e}  {rhs:14.6e}  {lhs / rhs - 1:12.3e}")


if __name__ == "__main__":
    main()
