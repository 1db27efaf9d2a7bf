"""Geodesics, the Riemannian exponential and logarithm, and the submersion
``A -> A A^T`` from invertible matrices onto SPD matrices."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import LiftMismatch, NotSpd, OutOfDomain, Singular
from .symmat import (
    SPD_ABS_FLOOR,
    SPD_REL_FLOOR,
    _lyap_eig,
    as_spd,
    as_sym,
    check_same_dim,
    eigendecomp,
    riccati_solve,
    spd_eig,
    spd_threshold,
    sqrt_product,
    sym,
)

# relative symmetry/commutation tolerance for structural checks
STRUCT_TOL = 1e-10


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)``; either end may be infinite."""

    lo: float
    hi: float

    def __contains__(self, t):
        return self.lo < t < self.hi

    def __str__(self):
        return f"({self.lo}, {self.hi})"

    def as_list(self):
        """JSON-friendly form; infinities become the strings ``"-inf"``/``"inf"``."""
        enc = lambda x: x if math.isfinite(x) else ("inf" if x > 0 else "-inf")
        return [enc(self.lo), enc(self.hi)]


def interval_from_slopes(slopes, zero_tol=1e-12):
    """Maximal open interval around 0 where ``1 + t*d > 0`` for every ``d``."""
    lo, hi = -math.inf, math.inf
    for d in np.asarray(slopes, dtype=float):
        if abs(d) <= zero_tol:
            continue
        bound = -1.0 / float(d)
        if d > 0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    return Interval(lo, hi)


@dataclass(frozen=True)
class TangentAt:
    base: np.ndarray
    vec: np.ndarray

    def __post_init__(self):
        base = as_spd(self.base, name="base")
        vec = as_sym(self.vec)
        check_same_dim(base, vec)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "vec", vec)


@dataclass(frozen=True)
class GeodesicSpec:
    """Geodesic ``t -> P(t) S0 P(t)`` with ``P(t) = (1-t) I + t T``."""

    start: np.ndarray
    end: np.ndarray
    map_T: np.ndarray
    domain: Interval

    @property
    def dim(self):
        return self.start.shape[0]

    def _check(self, t):
        if t not in self.domain:
            raise OutOfDomain(f"t = {t} outside the geodesic domain {self.domain}", interval=self.domain)

    def _P(self, t):
        n = self.dim
        return (1.0 - t) * np.eye(n) + t * self.map_T

    def point(self, t):
        self._check(t)
        P = self._P(t)
        return sym(P @ self.start @ P)

    def velocity(self, t):
        self._check(t)
        K = self.map_T - np.eye(self.dim)
        P = self._P(t)
        return sym(K @ self.start @ P + P @ self.start @ K)

    def acceleration(self, t):
        self._check(t)
        K = self.map_T - np.eye(self.dim)
        return sym(2.0 * K @ self.start @ K)


def geodesic(S0, S1):
    """Geodesic from ``S0`` to ``S1`` with its maximal open parameter interval."""
    S0 = as_spd(S0, name="S0")
    S1 = as_spd(S1, name="S1")
    check_same_dim(S0, S1)
    T = riccati_solve(S0, S1)
    lam = eigendecomp(T).eigenvalues
    return GeodesicSpec(S0, S1, T, interval_from_slopes(lam - 1.0))


def geodesic_point(spec, t):
    return spec.point(t)


def domain_interval(C, V):
    """``{t : I + t L_C[V] is SPD}``, from the eigenvalues of ``L_C[V]``."""
    ed = spd_eig(C, name="C")
    L = _lyap_eig(ed, as_sym(V))
    return interval_from_slopes(eigendecomp(L).eigenvalues)


def _exp_factor(C, V, abs_floor=SPD_ABS_FLOOR, rel_floor=SPD_REL_FLOOR):
    ed = spd_eig(C, abs_floor, rel_floor, name="C")
    V = as_sym(V)
    check_same_dim(ed.eigenvectors, V)
    L = _lyap_eig(ed, V)
    M = np.eye(V.shape[0]) + L
    w = eigendecomp(M).eigenvalues
    if w[0] <= spd_threshold(w):
        interval = interval_from_slopes(eigendecomp(L).eigenvalues)
        raise OutOfDomain(
            f"I + L_C[V] has eigenvalue {w[0]:.3e}; V is outside the exponential domain "
            f"(admissible scalings t of V: {interval})",
            eigenvalue=float(w[0]),
            interval=interval,
        )
    return L, M


def exp_map(C, V, abs_floor=SPD_ABS_FLOOR, rel_floor=SPD_REL_FLOOR):
    """Riemannian exponential ``(I + L_C[V]) C (I + L_C[V])``.

    Raises ``OutOfDomain`` when ``I + L_C[V]`` is not SPD. The floors only
    govern validation of ``C``.
    """
    C = as_sym(C)
    _, M = _exp_factor(C, V, abs_floor, rel_floor)
    return sym(M @ C @ M)


def log_map(C, B):
    """Riemannian logarithm ``(BC)^{1/2} + (CB)^{1/2} - 2C``."""
    C = as_spd(C, name="C")
    B = as_spd(B, name="B")
    check_same_dim(C, B)
    return sym(sqrt_product(B, C) + sqrt_product(C, B) - 2.0 * C)


def exp_differential(C, V, X):
    """Derivative of ``V -> Exp_C(V)`` in direction ``X``."""
    C = as_spd(C, name="C")
    LV, _ = _exp_factor(C, V)
    X = as_sym(X)
    LX = _lyap_eig(spd_eig(C), X)
    return sym(X + LX @ C @ LV + LV @ C @ LX)


def _check_invertible(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise Singular(f"{name} must be square, got {A.shape}")
    s = np.linalg.svd(A, compute_uv=False)
    if not np.all(np.isfinite(s)) or s[-1] <= 1e-12 * max(s[0], 1.0):
        raise Singular(f"{name} is numerically singular (smallest singular value {s[-1]:.3e})")
    return A


def horizontal_projection(A, X):
    """Orthogonal projection of ``X`` onto the horizontal space ``Sym(n) A``."""
    A = _check_invertible(A)
    X = np.asarray(X, dtype=float)
    check_same_dim(A, X)
    S = A @ A.T
    return _lyap_eig(spd_eig(S), X @ A.T + A @ X.T) @ A


def horizontal_lift(S, V, A, tol=STRUCT_TOL):
    """Horizontal vector ``L_S[V] A`` at ``A`` projecting onto ``V``."""
    S = as_spd(S, name="S")
    A = np.asarray(A, dtype=float)
    check_same_dim(S, A)
    if np.linalg.norm(A @ A.T - S) > tol * max(np.linalg.norm(S), 1.0):
        raise LiftMismatch("A A^T does not match S")
    return _lyap_eig(spd_eig(S), as_sym(V)) @ A


def is_horizontal_line(A0, A1, tol=STRUCT_TOL):
    """Whether ``t -> (1-t) A0 + t A1`` is horizontal, i.e. ``A1 A0^-1`` is SPD.

    Returns
    -------
    flag : bool
    T : ndarray or None
        ``A1 A0^-1`` when the flag is set.
    """
    A0 = _check_invertible(A0, "A0")
    A1 = _check_invertible(A1, "A1")
    check_same_dim(A0, A1)
    M = np.linalg.solve(A0.T, A1.T).T
    if np.linalg.norm(M - M.T) > tol * np.linalg.norm(M):
        return False, None
    try:
        T = as_spd(M)
    except NotSpd:
        return False, None
    return True, T


def geodesic_surface_commute_check(S0, others, tol=STRUCT_TOL):
    """Whether the transport maps from ``S0`` to each of ``others`` pairwise commute."""
    S0 = as_spd(S0, name="S0")
    maps = [riccati_solve(S0, as_spd(S, name="other")) for S in others]
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            Ti, Tj = maps[i], maps[j]
            scale = np.linalg.norm(Ti) * np.linalg.norm(Tj)
            if np.linalg.norm(Ti @ Tj - Tj @ Ti) > tol * scale:
                return False
    return True
