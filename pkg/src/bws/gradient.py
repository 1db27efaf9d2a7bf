"""Natural gradient under the Wasserstein metric, gradient flows, and Monte
Carlo estimators of the natural gradient of ``phi(mu, S) = E f(X)``.

Convention: every Euclidean gradient with respect to the covariance is taken
with respect to ``<A, B>_2 = Tr(AB)/2``. Under this convention the gradient of
``1/2 log det S`` is ``S^-1`` and the gradient of ``Tr S`` is ``2 I``. Use
:func:`from_trace_gradient` to convert a gradient taken with respect to the
plain trace pairing ``Tr(AB)``.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CallbackFailure, DimMismatch, NonFiniteSample, NotSpd, OutOfDomain
from .geodesics import Interval
from .metric import GaussParam
from .symmat import EigenDecomp, _lyap_eig, as_spd, as_sym, spd_eig, sym


@dataclass(frozen=True)
class EuclideanGrad:
    """Euclidean gradient of a scalar field on ``(mean, cov)``."""

    wrt_cov: np.ndarray
    wrt_mean: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "wrt_cov", as_sym(self.wrt_cov))
        if self.wrt_mean is not None:
            object.__setattr__(self, "wrt_mean", np.asarray(self.wrt_mean, dtype=float).reshape(-1))


@dataclass(frozen=True)
class McConfig:
    sample_count: int
    seed: int = 0

    def __post_init__(self):
        if int(self.sample_count) < 1:
            raise ValueError("sample_count must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    """Plug-in natural-gradient estimate with elementwise standard errors."""

    mean_grad: np.ndarray
    cov_grad: np.ndarray
    mean_stderr: np.ndarray
    cov_stderr: np.ndarray
    objective: float
    objective_stderr: float
    sample_count: int
    seed: int

    def __iter__(self):
        return iter((self.mean_grad, self.cov_grad))


@dataclass
class FlowTrajectory:
    times: np.ndarray
    states: list
    means: list
    step_method: str
    cone_exit: bool = False
    exit_time: Optional[float] = None
    message: str = ""

    @property
    def final(self):
        return GaussParam(self.means[-1], self.states[-1])


def from_trace_gradient(g_full):
    """Convert a gradient w.r.t. ``Tr(AB)`` into the ``<.,.>_2`` convention."""
    return 2.0 * as_sym(g_full)


def natural_gradient(S, g):
    """Riemannian gradient ``g S + S g`` from the Euclidean gradient ``g``."""
    S = as_spd(S, name="S")
    g = as_sym(g)
    if g.shape != S.shape:
        raise DimMismatch(f"S is {S.shape}, gradient is {g.shape}")
    return sym(g @ S + S @ g)


def natural_gradient_full(g, grad):
    """Natural gradient on ``(mean, cov)``: the mean part is left unchanged."""
    mean_part = np.zeros(g.dim) if grad.wrt_mean is None else grad.wrt_mean
    if mean_part.shape[0] != g.dim:
        raise DimMismatch(f"mean gradient has length {mean_part.shape[0]}, expected {g.dim}")
    return mean_part, natural_gradient(g.cov, grad.wrt_cov)


def entropy(g):
    """Differential entropy of ``N(mean, cov)``."""
    S = g.cov if isinstance(g, GaussParam) else as_spd(g)
    n = S.shape[0]
    _, logdet = np.linalg.slogdet(S)
    return 0.5 * n * (np.log(2 * np.pi) + 1.0) + 0.5 * logdet


def entropy_gradient(g):
    """Euclidean gradient of the entropy: zero in the mean, ``S^-1`` in the cov."""
    return EuclideanGrad(np.linalg.inv(g.cov), np.zeros(g.dim))


def entropy_flow(start, t):
    """Closed-form flow ``S(t) = S(0) - 2 t I`` of ``dS/dt = -grad E``."""
    start = as_spd(start, name="start")
    lam_min = spd_eig(start).eigenvalues[0]
    interval = Interval(-np.inf, lam_min / 2.0)
    if not 2.0 * t < lam_min:
        raise OutOfDomain(
            f"entropy flow exists only for t < {lam_min / 2.0} (got {t})",
            eigenvalue=float(lam_min - 2.0 * t),
            interval=interval,
        )
    out = start - 2.0 * t * np.eye(start.shape[0])
    return as_spd(out, name="S(t)")


def _velocity(grad_fn, mu, S, sign):
    g = GaussParam(mu, S)
    try:
        grad = grad_fn(g)
    except Exception as exc:  # noqa: BLE001
        raise CallbackFailure(f"gradient callback failed: {exc}") from exc
    dmu, dS = natural_gradient_full(g, grad)
    if not (np.all(np.isfinite(dmu)) and np.all(np.isfinite(dS))):
        raise CallbackFailure("gradient callback returned non-finite values")
    return sign * dmu, sign * dS


def gradient_flow(start, grad_fn, step, n_steps, method="rk4", direction="descent"):
    """Integrate ``d(mu, S)/dt = -/+ grad phi`` with a fixed step.

    Parameters
    ----------
    start : GaussParam
    grad_fn : callable
        ``GaussParam -> EuclideanGrad``.
    step : float
    n_steps : int
    method : {"rk4", "euler"}
    direction : {"descent", "ascent"}
        ``"descent"`` follows ``-grad phi``.

    Returns
    -------
    FlowTrajectory
        When an iterate (or an RK4 stage) leaves the SPD cone the integration
        stops, ``cone_exit`` is set and ``exit_time`` records the time of the
        failed step; ``states`` holds the valid prefix.
    """
    if step <= 0 or n_steps < 0:
        raise ValueError("step must be positive and n_steps non-negative")
    if method not in ("rk4", "euler"):
        raise ValueError(f"unknown method {method!r}")
    if direction not in ("descent", "ascent"):
        raise ValueError(f"unknown direction {direction!r}")
    sign = -1.0 if direction == "descent" else 1.0
    mu, S = start.mean.copy(), start.cov.copy()
    times, states, means = [0.0], [S], [mu]
    traj = FlowTrajectory(np.array(times), states, means, method)

    for k in range(n_steps):
        t_next = (k + 1) * step
        try:
            if method == "euler":
                dmu, dS = _velocity(grad_fn, mu, S, sign)
                mu_n, S_n = mu + step * dmu, S + step * dS
            else:
                h = step
                k1 = _velocity(grad_fn, mu, S, sign)
                k2 = _velocity(grad_fn, mu + 0.5 * h * k1[0], S + 0.5 * h * k1[1], sign)
                k3 = _velocity(grad_fn, mu + 0.5 * h * k2[0], S + 0.5 * h * k2[1], sign)
                k4 = _velocity(grad_fn, mu + h * k3[0], S + h * k3[1], sign)
                mu_n = mu + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
                S_n = S + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            S_n = as_spd(S_n, name="flow state")
        except NotSpd as exc:
            traj.cone_exit = True
            traj.exit_time = t_next
            traj.message = f"flow left the SPD cone at step {k + 1} (t = {t_next}): {exc}"
            break
        mu, S = mu_n, S_n
        times.append(t_next)
        states.append(S)
        means.append(mu)
    traj.times = np.array(times)
    return traj


def _call_batch(fn, X, vectorized, out_shape, what):
    try:
        # overflow is reported below as NonFiniteSample, not as a warning
        with np.errstate(over="ignore", invalid="ignore"):
            if vectorized:
                out = np.asarray(fn(X), dtype=float)
            else:
                out = np.array([np.asarray(fn(x), dtype=float) for x in X])
    except Exception as exc:  # noqa: BLE001
        raise CallbackFailure(f"{what} callback failed: {exc}") from exc
    out = out.reshape((X.shape[0],) + out_shape)
    if not np.all(np.isfinite(out)):
        bad = int(np.argmax(~np.all(np.isfinite(out.reshape(X.shape[0], -1)), axis=1)))
        raise NonFiniteSample(f"{what} returned a non-finite value at sample {bad}")
    return out


def _draw(g, cfg):
    """Standard normal draws ``Z`` (rows) and ``X = S^{1/2} Z + mu``."""
    rng = np.random.default_rng(int(cfg.seed))
    Z = rng.standard_normal((int(cfg.sample_count), g.dim))
    # g.cov was validated when g was built; only the relative floor applies here
    ed = spd_eig(g.cov, abs_floor=0.0)
    R = ed.apply(np.sqrt)
    return Z, Z @ R + g.mean, ed


def _stderr(samples):
    N = samples.shape[0]
    if N < 2:
        return np.full(samples.shape[1:], np.nan)
    return samples.std(axis=0, ddof=1) / np.sqrt(N)


def mc_grad_pathwise(f, grad_f, g, cfg, vectorized=False):
    """Reparameterization estimate of the natural gradient of ``E f(X)``.

    Uses ``X = S^{1/2} Z + mu`` and
    ``grad_2 = S L_R[Xi] + L_R[Xi] S`` with ``R = S^{1/2}`` and
    ``Xi = E[Z grad_f(X)^T + grad_f(X) Z^T]``.

    With ``vectorized=True`` the callbacks receive the whole ``(N, n)`` sample
    array; otherwise they are called once per sample.
    """
    Z, X, ed = _draw(g, cfg)
    S = g.cov
    fx = _call_batch(f, X, vectorized, (), "f")
    G = _call_batch(grad_f, X, vectorized, (g.dim,), "grad_f")
    root = EigenDecomp(np.sqrt(ed.eigenvalues), ed.eigenvectors)

    xi_k = Z[:, :, None] * G[:, None, :]
    xi_k = xi_k + np.swapaxes(xi_k, 1, 2)
    xi = sym(xi_k.mean(axis=0))
    L = _lyap_eig(root, xi)
    cov_grad = sym(S @ L + L @ S)

    L_k = _lyap_eig(root, xi_k)
    per_sample = S @ L_k + L_k @ S
    return McEstimate(
        mean_grad=G.mean(axis=0),
        cov_grad=cov_grad,
        mean_stderr=_stderr(G),
        cov_stderr=_stderr(per_sample),
        objective=float(fx.mean()),
        objective_stderr=float(_stderr(fx[:, None])[0]),
        sample_count=int(cfg.sample_count),
        seed=int(cfg.seed),
    )


def mc_grad_score(f, g, cfg, vectorized=False):
    """Score-function estimate of the natural gradient of ``E f(X)``.

    ``grad_1 = S^-1 E[f(X)(X - mu)]`` and ``grad_2 = M S^-1 + S^-1 M`` with
    ``M = E[f(X)((X - mu)(X - mu)^T - S)]``. No derivative of ``f`` is needed.
    """
    Z, X, ed = _draw(g, cfg)
    S = g.cov
    Si = ed.apply(lambda w: 1.0 / w)
    fx = _call_batch(f, X, vectorized, (), "f")
    D = X - g.mean

    mean_k = (fx[:, None] * D) @ Si
    M_k = fx[:, None, None] * (D[:, :, None] * D[:, None, :] - S)
    M = sym(M_k.mean(axis=0))
    cov_grad = sym(M @ Si + Si @ M)
    per_sample = M_k @ Si + Si @ M_k
    return McEstimate(
        mean_grad=mean_k.mean(axis=0),
        cov_grad=cov_grad,
        mean_stderr=_stderr(mean_k),
        cov_stderr=_stderr(per_sample),
        objective=float(fx.mean()),
        objective_stderr=float(_stderr(fx[:, None])[0]),
        sample_count=int(cfg.sample_count),
        seed=int(cfg.seed),
    )
