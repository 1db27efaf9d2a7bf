"""Natural-gradient descent on E||X||^2 over 2-d Gaussians, pathwise vs score.

Usage: python scripts/sphere_optimization.py [--iters 100] [--step 0.05]
"""
import argparse

import numpy as np

from bws.geodesics import exp_map
from bws.gradient import McConfig, mc_grad_pathwise, mc_grad_score
from bws.metric import GaussParam


def sphere(X):
    return np.sum(X * X, axis=-1)


ESTIMATORS = {
    "pathwise": lambda g, cfg: mc_grad_pathwise(sphere, lambda X: 2 * X, g, cfg, vectorized=True),
    "score": lambda g, cfg: mc_grad_score(sphere, g, cfg, vectorized=True),
}


def run(estimator, iters, step, samples, seed):
    g = GaussParam(np.array([1.0, -1.0]), np.diag([1.0, 4.0]))
    for k in range(iters):
        est = ESTIMATORS[estimator](g, McConfig(samples, seed + k))
        S_next = exp_map(g.cov, -step * est.cov_grad, abs_floor=0.0)
        g = GaussParam(g.mean - step * est.mean_grad, S_next, abs_floor=0.0)
    return g


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iters", type=int, default=100)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for name in ESTIMATORS:
        try:
            g = run(name, args.iters, args.step, args.samples, args.seed)
        except Exception as exc:  # the score estimator is noisy and can leave the domain
            print(f"{name:>9}: stopped ({type(exc).__name__}: {exc})")
            continue
        print(f"{name:>9}: Tr S = {np.trace(g.cov):.3e}  |mu| = {np.linalg.norm(g.mean):.3e}")


if __name__ == "__main__":
    main()
