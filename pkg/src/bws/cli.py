"""``bws`` command-line front end.

Exit codes: 0 ok, 2 parse error, 3 invalid matrix (not SPD, dimension
mismatch, singular), 4 parameter outside the geodesic/exponential domain,
5 iterate left the SPD cone, 6 non-finite values.
"""
import argparse
import json
import sys
import time

import numpy as np

from .errors import (
    CallbackFailure,
    DimMismatch,
    LiftMismatch,
    NonFinite,
    NonFiniteSample,
    NotSpd,
    OutOfDomain,
    Singular,
)
from .geodesics import exp_map, geodesic
from .gradient import (
    McConfig,
    entropy_flow,
    entropy_gradient,
    gradient_flow,
    mc_grad_pathwise,
    mc_grad_score,
)
from .io import ParseError, fmt, load_gauss, load_sym, matrix_doc, run_report, sigma_header, write_csv
from .metric import GaussParam, coupling_bounds, wasserstein_distance, wasserstein_inner
from .second_order import parallel_transport
from .symmat import SPD_ABS_FLOOR, _lyap_eig, spd_eig

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN_TYPE, EXIT_OUT_OF_DOMAIN, EXIT_CONE, EXIT_NONFINITE = 0, 2, 3, 4, 5, 6


class ConeExit(Exception):
    """Raised inside a command after its partial output has been written."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParseError(message)


def _common(p):
    p.add_argument("--json", action="store_true", help="emit a JSON run report on stdout")
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--seed", type=int, default=0, help="random seed (stochastic commands)")
    p.add_argument("--tol", type=float, default=SPD_ABS_FLOOR,
                   help="SPD acceptance floor for input matrices (absolute and relative)")


def build_parser():
    ap = _Parser(prog="bws", description="Wasserstein geometry of Gaussian densities")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("distance", help="Wasserstein distance and coupling bounds")
    p.add_argument("file_a")
    p.add_argument("file_b")
    _common(p)

    p = sub.add_parser("geodesic", help="sample the geodesic between two covariances")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--t-grid", type=int, default=11, dest="t_grid")
    p.add_argument("--t-min", type=float, default=0.0, dest="t_min")
    p.add_argument("--t-max", type=float, default=1.0, dest="t_max")
    _common(p)

    p = sub.add_parser("transport", help="parallel transport along the connecting geodesic")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("file_v")
    p.add_argument("--steps", type=int, default=1000)
    _common(p)

    p = sub.add_parser("optimize", help="natural-gradient descent on E f(X), X ~ N(mu, S)")
    p.add_argument("--objective", choices=["sphere", "quadratic-file", "rosenbrock"], default="sphere")
    p.add_argument("--quadratic", default=None, help="matrix file Q (optional 'center') for quadratic-file")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--estimator", choices=["pathwise", "score"], default="pathwise")
    p.add_argument("--start", default=None, help="Gaussian file for the initial point")
    p.add_argument("--mean0", type=float, default=1.0, help="initial mean (all coordinates)")
    p.add_argument("--cov0", type=float, default=1.0, help="initial covariance cov0 * I")
    _common(p)

    p = sub.add_parser("flow", help="gradient flow with closed-form comparison")
    p.add_argument("file_start")
    p.add_argument("--flow", choices=["entropy"], default="entropy")
    p.add_argument("--t", type=float, default=1.0, dest="t_end")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--method", choices=["rk4", "euler"], default="rk4")
    _common(p)
    return ap


def _tolerances(args, **extra):
    tol = {"spd_abs_floor": args.tol, "spd_rel_floor": args.tol}
    tol.update(extra)
    return tol


def _load(args, path):
    tol = _tolerances(args)
    return load_gauss(path, tol["spd_abs_floor"], tol["spd_rel_floor"])


def cmd_distance(args):
    g1, g2 = _load(args, args.file_a), _load(args, args.file_b)
    if g1.dim != g2.dim:
        raise DimMismatch(f"dimensions differ: {g1.dim} vs {g2.dim}")
    w = wasserstein_distance(g1, g2)
    cb = coupling_bounds(g1, g2)
    results = {
        "distance": w,
        "distance_sq": w * w,
        "min_cost": cb.min_cost,
        "max_cost": cb.max_cost,
        "optimal_map": matrix_doc(cb.optimal_map),
    }
    if not args.json:
        print(f"W = {fmt(w)}")
        print(f"W^2 = {fmt(w * w)}")
        print(f"min_cost = {fmt(cb.min_cost)}")
        print(f"max_cost = {fmt(cb.max_cost)}")
        print("T = " + json.dumps(cb.optimal_map.tolist()))
    return [args.file_a, args.file_b], results, _tolerances(args), None


def cmd_geodesic(args):
    if args.t_grid < 2:
        raise ParseError("--t-grid must be >= 2")
    g1, g2 = _load(args, args.file_a), _load(args, args.file_b)
    if g1.dim != g2.dim:
        raise DimMismatch(f"dimensions differ: {g1.dim} vs {g2.dim}")
    spec = geodesic(g1.cov, g2.cov)
    for t in (args.t_min, args.t_max):
        if t not in spec.domain:
            raise OutOfDomain(f"t = {t} outside the geodesic domain {spec.domain}", interval=spec.domain)
    n = spec.dim
    rows, speeds = [], []
    for t in np.linspace(args.t_min, args.t_max, args.t_grid):
        S, dS = spec.point(t), spec.velocity(t)
        speed = wasserstein_inner(S, dS, dS)
        speeds.append(speed)
        rows.append([t, *S.reshape(-1), speed])
    header = ["t", *sigma_header(n), "speed"]
    if args.out is not None or not args.json:
        write_csv(args.out, header, rows)
    results = {
        "domain": spec.domain.as_list(),
        "distance": wasserstein_distance(g1.cov, g2.cov),
        "map_T": matrix_doc(spec.map_T),
        "speed_min": min(speeds),
        "speed_max": max(speeds),
        "csv": args.out,
    }
    return [args.file_a, args.file_b], results, _tolerances(args), None


def cmd_transport(args):
    if args.steps < 1:
        raise ParseError("--steps must be >= 1")
    g1, g2 = _load(args, args.file_a), _load(args, args.file_b)
    V = load_sym(args.file_v)
    if not (g1.dim == g2.dim == V.shape[0]):
        raise DimMismatch(f"dimensions differ: {g1.dim}, {g2.dim}, {V.shape[0]}")
    res = parallel_transport(geodesic(g1.cov, g2.cov), V, n_steps=args.steps)
    results = {"transported": matrix_doc(res.transported), "norm_drift": res.norm_drift, "steps": res.steps}
    if not args.json:
        print("U(1) = " + json.dumps(res.transported.tolist()))
        print(f"norm_drift = {fmt(res.norm_drift)}")
    return [args.file_a, args.file_b, args.file_v], results, _tolerances(args), None


def _objective(args):
    """Vectorized ``(f, grad_f)`` acting on ``(N, n)`` sample arrays."""
    if args.objective == "sphere":
        return (lambda X: np.sum(X * X, axis=1)), (lambda X: 2.0 * X), []
    if args.objective == "rosenbrock":
        def f(X):
            return np.sum(100.0 * (X[:, 1:] - X[:, :-1] ** 2) ** 2 + (1.0 - X[:, :-1]) ** 2, axis=1)

        def grad(X):
            G = np.zeros_like(X)
            d = X[:, 1:] - X[:, :-1] ** 2
            G[:, :-1] += -400.0 * X[:, :-1] * d - 2.0 * (1.0 - X[:, :-1])
            G[:, 1:] += 200.0 * d
            return G

        return f, grad, []
    if args.quadratic is None:
        raise ParseError("--objective quadratic-file needs --quadratic PATH")
    from .io import read_json

    Q = load_sym(args.quadratic)
    doc = read_json(args.quadratic)
    c = np.array(doc.get("center", np.zeros(Q.shape[0])), dtype=float).reshape(-1)
    if Q.shape[0] != args.dim or c.shape[0] != args.dim:
        raise DimMismatch(f"quadratic is {Q.shape[0]}-dimensional, --dim is {args.dim}")
    return (lambda X: np.einsum("ki,ij,kj->k", X - c, Q, X - c)), (lambda X: 2.0 * (X - c) @ Q), [args.quadratic]


def cmd_optimize(args):
    if args.samples < 1 or args.iters < 0 or args.step <= 0 or args.dim < 1:
        raise ParseError("need --samples >= 1, --iters >= 0, --step > 0, --dim >= 1")
    if not 0 <= args.seed < 2**64:
        raise ParseError("--seed must be a 64-bit unsigned integer")
    f, grad_f, inputs = _objective(args)
    if args.start is not None:
        g = _load(args, args.start)
        inputs = inputs + [args.start]
        if g.dim != args.dim:
            raise DimMismatch(f"start is {g.dim}-dimensional, --dim is {args.dim}")
    else:
        g = GaussParam(np.full(args.dim, args.mean0), args.cov0 * np.eye(args.dim))
    seeds = np.random.SeedSequence(args.seed).generate_state(args.iters + 1, dtype=np.uint64)

    n = args.dim
    header = ["iter", "phi", *[f"mu_{i + 1}" for i in range(n)], *sigma_header(n), "grad_norm"]
    rows = []
    status, message = "ok", ""
    for it in range(args.iters + 1):
        cfg = McConfig(args.samples, int(seeds[it]))
        if args.estimator == "pathwise":
            est = mc_grad_pathwise(f, grad_f, g, cfg, vectorized=True)
        else:
            est = mc_grad_score(f, g, cfg, vectorized=True)
        L = _lyap_eig(spd_eig(g.cov, abs_floor=0.0), est.cov_grad)
        gnorm = float(np.sqrt(est.mean_grad @ est.mean_grad + 0.5 * np.sum(L * est.cov_grad)))
        rows.append([str(it), est.objective, *g.mean, *g.cov.reshape(-1), gnorm])
        if it == args.iters:
            break
        try:
            # cone membership of iterates is judged scale-free (relative floor only)
            S_next = exp_map(g.cov, -args.step * est.cov_grad, abs_floor=0.0, rel_floor=args.tol)
            g = GaussParam(g.mean - args.step * est.mean_grad, S_next, abs_floor=0.0, rel_floor=args.tol)
        except (OutOfDomain, NotSpd) as exc:
            status, message = "cone_exit", f"iterate left the SPD cone at iteration {it + 1}: {exc}"
            break
    if args.out is not None or not args.json:
        write_csv(args.out, header, rows)
    results = {
        "iterations": len(rows) - 1,
        "final_mean": g.mean,
        "final_cov": matrix_doc(g.cov),
        "final_phi": rows[-1][1],
        "initial_phi": rows[0][1],
        "estimator": args.estimator,
        "objective": args.objective,
        "csv": args.out,
    }
    if status == "cone_exit":
        results["message"] = message
        raise ConeExit(message, (inputs, results, _tolerances(args), args.seed))
    return inputs, results, _tolerances(args), args.seed


def cmd_flow(args):
    if args.step <= 0 or args.t_end < 0:
        raise ParseError("need --step > 0 and --t >= 0")
    g0 = _load(args, args.file_start)
    n_steps = int(round(args.t_end / args.step))
    traj = gradient_flow(g0, entropy_gradient, args.step, n_steps, method=args.method, direction="descent")
    n = g0.dim
    header = ["t", *sigma_header(n), *sigma_header(n, "closed"), "deviation"]
    rows, max_dev = [], 0.0
    for t, S in zip(traj.times, traj.states):
        C = entropy_flow(g0.cov, t)
        dev = float(np.max(np.abs(S - C)))
        max_dev = max(max_dev, dev)
        rows.append([t, *S.reshape(-1), *C.reshape(-1), dev])
    if args.out is not None or not args.json:
        write_csv(args.out, header, rows)
    results = {
        "flow": args.flow,
        "method": args.method,
        "steps_taken": len(traj.times) - 1,
        "t_reached": float(traj.times[-1]),
        "final_cov": matrix_doc(traj.states[-1]),
        "max_deviation": max_dev,
        "existence_bound": float(np.linalg.eigvalsh(g0.cov)[0] / 2.0),
        "csv": args.out,
    }
    if traj.cone_exit:
        results["exit_time"] = traj.exit_time
        results["message"] = traj.message
        raise ConeExit(traj.message, ([args.file_start], results, _tolerances(args), None))
    return [args.file_start], results, _tolerances(args), None


COMMANDS = {
    "distance": cmd_distance,
    "geodesic": cmd_geodesic,
    "transport": cmd_transport,
    "optimize": cmd_optimize,
    "flow": cmd_flow,
}


def _emit(args, argv, payload, wall, status, code):
    inputs, results, tolerances, seed = payload
    rep = run_report(args.command, argv, inputs, results, tolerances, wall, seed, status, code)
    print(json.dumps(rep, indent=2, sort_keys=True))


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    t0 = time.perf_counter()
    args = None
    try:
        args = build_parser().parse_args(argv)
        payload = COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"bws: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConeExit as exc:
        print(f"bws: cone exit: {exc}", file=sys.stderr)
        if args.json:
            _emit(args, argv, exc.report, time.perf_counter() - t0, "cone_exit", EXIT_CONE)
        return EXIT_CONE
    except OutOfDomain as exc:
        print(f"bws: out of domain: {exc}", file=sys.stderr)
        return EXIT_OUT_OF_DOMAIN
    except (NotSpd, DimMismatch, Singular, LiftMismatch) as exc:
        print(f"bws: invalid input: {exc}", file=sys.stderr)
        return EXIT_DOMAIN_TYPE
    except (NonFiniteSample, NonFinite) as exc:
        print(f"bws: non-finite values: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except CallbackFailure as exc:
        print(f"bws: objective failed: {exc}", file=sys.stderr)
        return 1
    if args.json:
        _emit(args, argv, payload, time.perf_counter() - t0, "ok", EXIT_OK)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
