"""Symmetric-matrix calculus: square roots, Lyapunov and Riccati equations.

Matrices are plain ``numpy`` arrays. Symmetric inputs are symmetrized on entry
with ``(M + M.T) / 2`` and every output documented as symmetric is
symmetrized again before it is returned. Matrix functions are always
evaluated through the symmetric eigendecomposition.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NotSpd

SPD_ABS_FLOOR = 1e-12
SPD_REL_FLOOR = 1e-12
MAX_DIM = 200


@dataclass(frozen=True)
class EigenDecomp:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def apply(self, fn):
        """Return ``Q diag(fn(w)) Q^T``."""
        Q = self.eigenvectors
        return sym((Q * fn(self.eigenvalues)) @ Q.T)

    def reconstruct(self):
        return self.apply(lambda w: w)


def sym(M):
    """Symmetric part ``(M + M^T)/2``; works on stacks of matrices."""
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + np.swapaxes(M, -1, -2))


def as_sym(M):
    """Validate a square matrix and return its symmetric part."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimMismatch(f"expected a non-empty square matrix, got shape {M.shape}")
    return sym(M)


def spd_threshold(eigenvalues, abs_floor=SPD_ABS_FLOOR, rel_floor=SPD_REL_FLOOR):
    lam_max = float(np.max(np.abs(eigenvalues)))
    return max(abs_floor, rel_floor * lam_max)


def eigendecomp(S):
    """Symmetric eigendecomposition (LAPACK ``syevd`` via ``numpy.linalg.eigh``)."""
    w, Q = np.linalg.eigh(as_sym(S))
    return EigenDecomp(w, Q)


def spd_eig(S, abs_floor=SPD_ABS_FLOOR, rel_floor=SPD_REL_FLOOR, name="matrix"):
    """Eigendecomposition of ``S`` after checking it lies in the open SPD cone.

    Raises
    ------
    NotSpd
        If the smallest eigenvalue is not above
        ``max(abs_floor, rel_floor * lambda_max)``.
    """
    ed = eigendecomp(S)
    w = ed.eigenvalues
    if not np.all(np.isfinite(w)):
        raise NotSpd(f"{name} has non-finite entries")
    thr = spd_threshold(w, abs_floor, rel_floor)
    if w[0] <= thr:
        raise NotSpd(
            f"{name} is not positive-definite: min eigenvalue {w[0]:.3e} <= {thr:.3e}",
            min_eigenvalue=float(w[0]),
        )
    return ed


def as_spd(S, abs_floor=SPD_ABS_FLOOR, rel_floor=SPD_REL_FLOOR, name="matrix"):
    S = as_sym(S)
    spd_eig(S, abs_floor, rel_floor, name)
    return S


def is_spd(S, abs_floor=SPD_ABS_FLOOR, rel_floor=SPD_REL_FLOOR):
    try:
        spd_eig(S, abs_floor, rel_floor)
    except (NotSpd, DimMismatch):
        return False
    return True


def check_same_dim(*mats):
    dims = {np.shape(M)[-1] for M in mats}
    if len(dims) != 1:
        raise DimMismatch(f"dimension mismatch: {[np.shape(M) for M in mats]}")


def spd_sqrt(S):
    """Principal square root of an SPD matrix."""
    return spd_eig(S).apply(np.sqrt)


def spd_invsqrt(S):
    return spd_eig(S).apply(lambda w: 1.0 / np.sqrt(w))


def spd_inv(S):
    return spd_eig(S).apply(lambda w: 1.0 / w)


def sqrt_product(A, B):
    """Square root of the product ``A B`` with ``A`` SPD and ``B`` PSD.

    Computed as ``A^{1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}``. The result is
    in general *not* symmetric.
    """
    ed = spd_eig(A, name="A")
    B = as_sym(B)
    check_same_dim(ed.eigenvectors, B)
    Ah = ed.apply(np.sqrt)
    Aih = ed.apply(lambda w: 1.0 / np.sqrt(w))
    inner = eigendecomp(Ah @ B @ Ah).apply(lambda w: np.sqrt(np.clip(w, 0.0, None)))
    return Ah @ inner @ Aih


def _lyap_eig(ed, V):
    """Solve ``X S + S X = V`` given the eigendecomposition of ``S``.

    ``V`` may be a stack ``(..., n, n)``.
    """
    Q, w = ed.eigenvectors, ed.eigenvalues
    Vp = Q.T @ V @ Q
    Xp = Vp / (w[:, None] + w[None, :])
    return sym(Q @ Xp @ Q.T)


def lyapunov_solve(S, V):
    """The Lyapunov operator ``L_S[V]``: the symmetric ``X`` with ``XS + SX = V``."""
    ed = spd_eig(S, name="S")
    V = sym(V)
    if V.shape[-2:] != ed.eigenvectors.shape:
        raise DimMismatch(f"S is {ed.eigenvectors.shape}, V is {V.shape}")
    return _lyap_eig(ed, V)


def riccati_solve(A, B):
    """Unique SPD ``T`` with ``T A T = B`` for ``A``, ``B`` SPD."""
    ed = spd_eig(A, name="A")
    B = as_spd(B, name="B")
    check_same_dim(ed.eigenvectors, B)
    Ah = ed.apply(np.sqrt)
    Aih = ed.apply(lambda w: 1.0 / np.sqrt(w))
    return sym(Aih @ spd_sqrt(Ah @ B @ Ah) @ Aih)


def dsqrt(S, V):
    """Derivative of ``S -> S^{1/2}`` in direction ``V``: ``L_{S^{1/2}}[V]``."""
    ed = spd_eig(S, name="S")
    root = EigenDecomp(np.sqrt(ed.eigenvalues), ed.eigenvectors)
    return _lyap_eig(root, sym(V))


def dlyapunov(A, V, U):
    """Derivative of ``A -> L_A[V]`` in direction ``U``."""
    ed = spd_eig(A, name="A")
    X = _lyap_eig(ed, sym(V))
    U = sym(U)
    return -_lyap_eig(ed, X @ U + U @ X)


def d2sqrt(S, U, V):
    """Second derivative of ``S -> S^{1/2}`` along ``(U, V)``.

    Equals ``-L_R[L_R[V] L_R[U] + L_R[U] L_R[V]]`` with ``R = S^{1/2}``; the
    leading minus sign is confirmed by finite differences.
    """
    ed = spd_eig(S, name="S")
    root = EigenDecomp(np.sqrt(ed.eigenvalues), ed.eigenvectors)
    LU = _lyap_eig(root, sym(U))
    LV = _lyap_eig(root, sym(V))
    return -_lyap_eig(root, LV @ LU + LU @ LV)
