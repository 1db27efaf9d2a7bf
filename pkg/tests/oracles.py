"""Reference computations that do not go through the package: scipy's
Schur-based matrix square root and Bartels-Stewart Lyapunov solver, plus
finite-difference stencils."""
import numpy as np
import scipy.linalg


def sqrtm(M):
    R = scipy.linalg.sqrtm(M)
    return np.real(R)


def lyap(S, V):
    """``X`` with ``X S + S X = V``."""
    X = scipy.linalg.solve_continuous_lyapunov(S, V)
    return 0.5 * (X + X.T)


def w2(m1, S1, m2, S2):
    R = sqrtm(S1)
    cross = sqrtm(R @ S2 @ R)
    d = np.asarray(m1, float) - np.asarray(m2, float)
    return float(d @ d + np.trace(S1 + S2 - 2.0 * cross))


def riccati(A, B):
    R = sqrtm(A)
    Ri = np.linalg.inv(R)
    return Ri @ sqrtm(R @ B @ R) @ Ri


def central_diff(fn, h):
    return (fn(h) - fn(-h)) / (2.0 * h)


def second_diff(fn, h):
    return (fn(h) - 2.0 * fn(0.0) + fn(-h)) / (h * h)


def mixed_second_diff(fn, h):
    """``d^2/ds dt fn(s, t)`` at 0."""
    return (fn(h, h) - fn(h, -h) - fn(-h, h) + fn(-h, -h)) / (4.0 * h * h)


def rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))
