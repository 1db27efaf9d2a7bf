"""Wasserstein distance between Gaussians, the Riemannian inner product on
SPD matrices, coupling bounds and the Fisher metric for comparison."""
from dataclasses import InitVar, dataclass

import numpy as np

from .errors import DimMismatch
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
    spd_inv,
    spd_sqrt,
    sqrt_product,
)

# rounding residuals below this magnitude are clamped to zero
CLAMP = 1e-12


@dataclass(frozen=True)
class GaussParam:
    """Non-degenerate Gaussian ``N(mean, cov)``.

    ``abs_floor``/``rel_floor`` set the SPD acceptance threshold for ``cov``.
    """

    mean: np.ndarray
    cov: np.ndarray
    abs_floor: InitVar[float] = SPD_ABS_FLOOR
    rel_floor: InitVar[float] = SPD_REL_FLOOR

    def __post_init__(self, abs_floor, rel_floor):
        cov = as_spd(self.cov, abs_floor, rel_floor, name="cov")
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        if mean.shape[0] != cov.shape[0]:
            raise DimMismatch(f"mean has length {mean.shape[0]}, cov is {cov.shape}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def centered(cls, cov):
        cov = np.asarray(cov, dtype=float)
        return cls(np.zeros(cov.shape[0]), cov)

    @property
    def dim(self):
        return self.cov.shape[0]


@dataclass(frozen=True)
class CouplingBounds:
    min_cost: float
    max_cost: float
    optimal_map: np.ndarray


def _as_gauss(g):
    return g if isinstance(g, GaussParam) else GaussParam.centered(g)


def _trace_root_symmetric(S1, S2):
    """``Tr (S1^{1/2} S2 S1^{1/2})^{1/2}``."""
    r = spd_sqrt(S1)
    w = eigendecomp(r @ S2 @ r).eigenvalues
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def _trace_root_product(S1, S2):
    """``Tr (S1 S2)^{1/2}``."""
    return float(np.trace(sqrt_product(S1, S2)))


def _cost(g1, g2, sign, form="symmetric"):
    check_same_dim(g1.cov, g2.cov)
    root = _trace_root_symmetric if form == "symmetric" else _trace_root_product
    shift = float(np.sum((g1.mean - g2.mean) ** 2))
    return shift + float(np.trace(g1.cov) + np.trace(g2.cov)) + sign * 2.0 * root(g1.cov, g2.cov)


def wasserstein_distance_sq(g1, g2, form="symmetric", verify=False):
    """Squared L2-Wasserstein distance between two Gaussians.

    Parameters
    ----------
    g1, g2 : GaussParam or ndarray
        Gaussians; a bare matrix is taken as a centered Gaussian.
    form : {"symmetric", "product"}
        ``"symmetric"`` uses ``(S1^{1/2} S2 S1^{1/2})^{1/2}``, ``"product"``
        uses the (non-symmetric) ``(S1 S2)^{1/2}``.
    verify : bool
        Also evaluate the other form and raise ``ArithmeticError`` if the two
        disagree by more than 1e-10 (relative to the trace scale).
    """
    g1, g2 = _as_gauss(g1), _as_gauss(g2)
    d2 = _cost(g1, g2, -1.0, form)
    if verify:
        other = _cost(g1, g2, -1.0, "product" if form == "symmetric" else "symmetric")
        scale = max(1.0, float(np.trace(g1.cov) + np.trace(g2.cov)))
        if abs(other - d2) > 1e-10 * scale:
            raise ArithmeticError(f"distance forms disagree: {d2!r} vs {other!r}")
    if -CLAMP <= d2 < 0.0:
        d2 = 0.0
    return d2


def wasserstein_distance(g1, g2, form="symmetric", verify=False):
    """L2-Wasserstein distance; see :func:`wasserstein_distance_sq`."""
    return float(np.sqrt(max(wasserstein_distance_sq(g1, g2, form, verify), 0.0)))


def wasserstein_inner(S, U, V):
    """Riemannian inner product ``W_S(U, V) = Tr(L_S[U] S L_S[V])``."""
    S = as_sym(S)
    ed = spd_eig(S, name="S")
    U, V = as_sym(U), as_sym(V)
    check_same_dim(S, U, V)
    LU = _lyap_eig(ed, U)
    LV = _lyap_eig(ed, V)
    return float(np.trace(LU @ S @ LV))


def wasserstein_inner_half(S, U, V):
    """Same inner product in its tensorial form ``Tr(L_S[U] V) / 2``."""
    ed = spd_eig(S, name="S")
    U, V = as_sym(U), as_sym(V)
    check_same_dim(ed.eigenvectors, U, V)
    return 0.5 * float(np.sum(_lyap_eig(ed, U) * V))


def coupling_bounds(g1, g2):
    """Smallest and largest ``E|X1 - X2|^2`` over Gaussian couplings, and the
    optimal transport map ``T`` (``T S1 T = S2``)."""
    g1, g2 = _as_gauss(g1), _as_gauss(g2)
    lo = _cost(g1, g2, -1.0)
    if -CLAMP <= lo < 0.0:
        lo = 0.0
    hi = _cost(g1, g2, +1.0)
    return CouplingBounds(lo, hi, riccati_solve(g1.cov, g2.cov))


def fisher_inner(C, U, V):
    """Fisher metric in the concentration parameterization, ``Tr(U C^-1 V C^-1)/2``."""
    Ci = spd_inv(C)
    U, V = as_sym(U), as_sym(V)
    check_same_dim(Ci, U, V)
    return 0.5 * float(np.trace(U @ Ci @ V @ Ci))


def expansion_check(S, H, theta):
    """``(W^2(S, S + theta H), theta^2 Tr(L_S[H] S L_S[H]))``.

    The ratio of the two tends to one as ``theta -> 0``.
    """
    S = as_spd(S, name="S")
    H = as_sym(H)
    check_same_dim(S, H)
    lhs = wasserstein_distance_sq(S, as_spd(S + theta * H, name="S + theta H"))
    rhs = theta**2 * wasserstein_inner(S, H, H)
    return lhs, rhs
