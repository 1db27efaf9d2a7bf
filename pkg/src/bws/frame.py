"""The ``E^{pq}`` generating set of ``Sym(n)`` and the principal moving frame
``F^a(S) = E^a S + S E^a``.

The ``E^{pq}`` are kept unnormalized (``E^{pq} = e_p e_q^T + e_q e_p^T``); the
frame metric matrix carries the resulting scale. Indices are 1-based pairs
``(p, q)`` with ``p <= q`` in lexicographic order, which is also the order of
every coordinate vector produced here.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import DimMismatch, IndexOutOfRange, SingularMetric
from .symmat import as_spd, as_sym, sym


@dataclass(frozen=True, order=True)
class FrameIndex:
    p: int
    q: int

    def __post_init__(self):
        if self.p > self.q:
            p, q = self.q, self.p
            object.__setattr__(self, "p", p)
            object.__setattr__(self, "q", q)

    def check(self, n):
        if not (1 <= self.p <= self.q <= n):
            raise IndexOutOfRange(f"frame index {(self.p, self.q)} invalid for n = {n}")
        return self


@dataclass(frozen=True)
class FrameCoords:
    coords: np.ndarray
    dim: int

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float).reshape(-1)
        if coords.shape[0] != frame_size(self.dim):
            raise DimMismatch(f"expected {frame_size(self.dim)} coordinates, got {coords.shape[0]}")
        object.__setattr__(self, "coords", coords)


def frame_size(n):
    return n * (n + 1) // 2


@lru_cache(maxsize=None)
def frame_indices(n):
    return tuple(FrameIndex(p, q) for p in range(1, n + 1) for q in range(p, n + 1))


def _idx(idx):
    return idx if isinstance(idx, FrameIndex) else FrameIndex(*idx)


def basis_matrix(idx, n):
    """``E^{pq} = e_p e_q^T + e_q e_p^T`` (so ``E^{pp}`` has a 2 on the diagonal)."""
    idx = _idx(idx).check(n)
    E = np.zeros((n, n))
    E[idx.p - 1, idx.q - 1] += 1.0
    E[idx.q - 1, idx.p - 1] += 1.0
    return E


def _basis_stack(n):
    return np.array([basis_matrix(a, n) for a in frame_indices(n)])


def frame_field(S, idx):
    """Moving-frame member ``F^a(S) = E^a S + S E^a``."""
    S = as_spd(S, name="S")
    E = basis_matrix(idx, S.shape[0])
    return sym(E @ S + S @ E)


def metric_matrix(S):
    """Gram matrix ``g_ab(S) = Tr(E^a S E^b)`` of the moving frame."""
    S = as_spd(S, name="S")
    E = _basis_stack(S.shape[0])
    ES = E @ S
    G = np.einsum("aij,bji->ab", ES, E)
    return 0.5 * (G + G.T)


def coords_in_frame(S, X):
    """Coordinates ``x`` with ``X = sum_a x_a F^a(S)``.

    ``x_a = sum_c g^{ac} <X, E^c>_2`` where ``g^{ac}`` is the inverse of
    :func:`metric_matrix`.
    """
    S = as_spd(S, name="S")
    X = as_sym(X)
    n = S.shape[0]
    if X.shape != S.shape:
        raise DimMismatch(f"S is {S.shape}, X is {X.shape}")
    E = _basis_stack(n)
    rhs = 0.5 * np.einsum("aij,ji->a", E, X)
    try:
        factor = scipy.linalg.cho_factor(metric_matrix(S))
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(f"frame metric is not positive-definite: {exc}") from exc
    return FrameCoords(scipy.linalg.cho_solve(factor, rhs), n)


def from_frame_coords(S, coords):
    """Inverse of :func:`coords_in_frame`."""
    S = as_spd(S, name="S")
    x = coords.coords if isinstance(coords, FrameCoords) else np.asarray(coords, dtype=float)
    n = S.shape[0]
    if x.shape[0] != frame_size(n):
        raise DimMismatch(f"expected {frame_size(n)} coordinates, got {x.shape[0]}")
    F = np.einsum("a,aij->ij", x, _basis_stack(n))
    return sym(F @ S + S @ F)


def frame_covariant(S, alpha, beta):
    """Levi-Civita derivative ``D_{F^a} F^b = E^b E^a S + S E^a E^b``."""
    S = as_spd(S, name="S")
    n = S.shape[0]
    Ea, Eb = basis_matrix(alpha, n), basis_matrix(beta, n)
    return sym(Eb @ Ea @ S + S @ Ea @ Eb)


def frame_christoffel(S, alpha, beta):
    """Christoffel tensor on two frame fields: ``-(E^a S E^b + E^b S E^a)``."""
    S = as_spd(S, name="S")
    n = S.shape[0]
    Ea, Eb = basis_matrix(alpha, n), basis_matrix(beta, n)
    return sym(-(Ea @ S @ Eb + Eb @ S @ Ea))
