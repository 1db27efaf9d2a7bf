"""Levi-Civita connection of the Wasserstein metric on SPD matrices:
Christoffel tensor, covariant derivative, parallel transport and the
Riemannian Hessian."""
from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NonFinite, NotSpd
from .geodesics import GeodesicSpec
from .symmat import _lyap_eig, as_spd, as_sym, check_same_dim, spd_eig, sym

DEFAULT_TRANSPORT_STEPS = 1000


@dataclass(frozen=True)
class VectorFieldEval:
    """A vector field ``Y`` at a point, with its derivative ``d_X Y`` along
    the direction ``X`` of interest."""

    value: np.ndarray
    directional_derivative: np.ndarray

    def __post_init__(self):
        value = as_sym(self.value)
        dd = as_sym(self.directional_derivative)
        check_same_dim(value, dd)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "directional_derivative", dd)


@dataclass(frozen=True)
class TransportResult:
    transported: np.ndarray
    norm_drift: float
    steps: int


@dataclass(frozen=True)
class Curve:
    """Sampled path ``t -> S(t)``. Velocities are reconstructed by finite
    differences, so transport along a ``Curve`` is less accurate than along
    a :class:`GeodesicSpec`."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if times.ndim != 1 or len(times) < 2 or states.shape[0] != len(times):
            raise DimMismatch("curve needs >= 2 samples with one state per time")
        if np.any(np.diff(times) <= 0):
            raise ValueError("curve times must be increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", np.array([as_spd(S, name="curve state") for S in states]))
        object.__setattr__(self, "_vel", np.gradient(self.states, times, axis=0, edge_order=2))

    def _interp(self, arr, t):
        ts = self.times
        i = int(np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2))
        w = (t - ts[i]) / (ts[i + 1] - ts[i])
        return (1.0 - w) * arr[i] + w * arr[i + 1]

    def point(self, t):
        return sym(self._interp(self.states, t))

    def velocity(self, t):
        return sym(self._interp(self._vel, t))


def _L(S, *Vs):
    ed = spd_eig(S, name="S")
    return [_lyap_eig(ed, as_sym(V)) for V in Vs]


def christoffel(S, X, Y):
    """Christoffel tensor ``Gamma(S; X, Y)``, symmetric and bilinear in ``(X, Y)``."""
    S = as_sym(S)
    X, Y = as_sym(X), as_sym(Y)
    check_same_dim(S, X, Y)
    LX, LY = _L(S, X, Y)
    return sym(S @ LY @ LX + LY @ LX @ S - LX @ Y - LY @ X)


def covariant_derivative(S, X, Y_eval):
    """Levi-Civita derivative ``D_X Y`` at ``S``.

    ``D_X Y = d_X Y - sym(L[X] Y + L[Y] X) + sym(S L[X] L[Y] + S L[Y] L[X])``.
    """
    S = as_sym(S)
    X = as_sym(X)
    Y = Y_eval.value
    check_same_dim(S, X, Y)
    LX, LY = _L(S, X, Y)
    return sym(
        Y_eval.directional_derivative
        - sym(LX @ Y + LY @ X)
        + sym(S @ LX @ LY + S @ LY @ LX)
    )


def covariant_pairing(S, X, Y_eval, Z):
    """``W_S(D_X Y, Z)`` evaluated from the implicit (Koszul-type) formula,
    independently of :func:`covariant_derivative`."""
    S = as_sym(S)
    X, Z = as_sym(X), as_sym(Z)
    Y = Y_eval.value
    LX, LY, LZ, LdY = _L(S, X, Y, Z, Y_eval.directional_derivative)
    return float(
        0.5 * np.trace(LdY @ Z)
        + 0.5 * np.trace(LX @ Z @ LY)
        - 0.5 * np.trace(LX @ Y @ LZ)
        - 0.5 * np.trace(LY @ X @ LZ)
    )


def _inner(S, U, W):
    (LU,) = _L(S, U)
    return 0.5 * float(np.sum(LU * W))


def parallel_transport(path, V, n_steps=DEFAULT_TRANSPORT_STEPS, t0=0.0, t1=1.0):
    """Transport ``V`` along ``path`` by solving ``U' + Gamma(S; S', U) = 0``
    with fixed-step classical RK4.

    Parameters
    ----------
    path : GeodesicSpec or Curve
    V : ndarray
        Initial tangent vector at ``path(t0)``.
    n_steps : int
    t0, t1 : float
        Integration interval; for a ``Curve`` the default is its full range.

    Returns
    -------
    TransportResult
        ``norm_drift`` is the largest relative deviation of
        ``W_{S(t)}(U, U)`` from its initial value over the grid.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if isinstance(path, Curve) and (t0, t1) == (0.0, 1.0):
        t0, t1 = float(path.times[0]), float(path.times[-1])
    U = as_sym(V)
    check_same_dim(path.point(t0), U)
    h = (t1 - t0) / n_steps

    def rhs(t, U):
        S = path.point(t)
        return -christoffel(S, path.velocity(t), U)

    w0 = _inner(path.point(t0), U, U)
    drift = 0.0
    for k in range(n_steps):
        t = t0 + k * h
        try:
            k1 = rhs(t, U)
            k2 = rhs(t + 0.5 * h, U + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, U + 0.5 * h * k2)
            k4 = rhs(t + h, U + h * k3)
        except NotSpd as exc:
            raise NotSpd(f"path leaves the SPD cone near t = {t}: {exc}") from exc
        U = sym(U + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))
        if not np.all(np.isfinite(U)):
            raise NonFinite(f"transport produced non-finite values at t = {t + h}")
        w = _inner(path.point(t + h), U, U)
        dev = abs(w - w0) / w0 if w0 > 0 else abs(w)
        drift = max(drift, dev)
    return TransportResult(U, float(drift), int(n_steps))


def riemannian_hessian_quadratic(S, V, grad_phi, hess_phi_V):
    """``Hess phi(S)(V, V)`` from the Euclidean gradient and Hessian action.

    Both ``grad_phi`` and ``hess_phi_V`` are in the ``<A, B>_2 = Tr(AB)/2``
    convention. The result is
    ``W_S(H S + S H, V) + Tr(grad_phi L_S[V] S L_S[V])`` with ``H = hess_phi_V``.
    """
    S = as_sym(S)
    V, G, H = as_sym(V), as_sym(grad_phi), as_sym(hess_phi_V)
    check_same_dim(S, V, G, H)
    (LV,) = _L(S, V)
    first = _inner(S, H @ S + S @ H, V)
    return float(first + np.trace(G @ LV @ S @ LV))


def euclidean_gradient_fd(phi, S, h=None):
    """``<.,.>_2``-gradient of ``phi`` at ``S`` by central differences.

    With ``E^{pq} = e_p e_q^T + e_q e_p^T`` one has ``d phi[E^{pq}] = g_pq``.
    Meant for tests and quick checks only.
    """
    S = as_spd(S)
    n = S.shape[0]
    if h is None:
        h = 1e-5 * max(np.linalg.norm(S), 1.0)
    g = np.zeros((n, n))
    for p in range(n):
        for q in range(p, n):
            E = np.zeros((n, n))
            E[p, q] += 1.0
            E[q, p] += 1.0
            g[p, q] = g[q, p] = (phi(S + h * E) - phi(S - h * E)) / (2 * h)
    return g


def riemannian_hessian_fd(phi, S, V, h=None):
    """Convenience wrapper: :func:`riemannian_hessian_quadratic` with the
    Euclidean derivatives of ``phi`` taken by central differences."""
    S = as_spd(S)
    V = as_sym(V)
    if h is None:
        h = 1e-4 * max(np.linalg.norm(S), 1.0)
    grad = euclidean_gradient_fd(phi, S)
    hess_v = (euclidean_gradient_fd(phi, S + h * V) - euclidean_gradient_fd(phi, S - h * V)) / (2 * h)
    return riemannian_hessian_quadratic(S, V, grad, hess_v)
