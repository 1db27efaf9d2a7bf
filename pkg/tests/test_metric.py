import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bws.errors import DimMismatch, NotSpd
from bws.metric import (
    GaussParam,
    coupling_bounds,
    expansion_check,
    fisher_inner,
    wasserstein_distance,
    wasserstein_distance_sq,
    wasserstein_inner,
    wasserstein_inner_half,
)
from bws.symmat import lyapunov_solve

from . import oracles
from .conftest import random_spd, random_sym, spd_and_syms

I2 = np.eye(2)


@st.composite
def gauss_triples(draw, max_dim=5):
    n = draw(st.integers(1, max_dim))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return [GaussParam(rng.standard_normal(n), random_spd(rng, n)) for _ in range(3)]


class TestGaussParam:
    def test_validates_cov(self):
        with pytest.raises(NotSpd):
            GaussParam(np.zeros(2), np.diag([1.0, -1.0]))

    def test_mean_length(self):
        with pytest.raises(DimMismatch):
            GaussParam(np.zeros(3), I2)

    def test_floors_are_adjustable(self):
        GaussParam(np.zeros(2), 1e-14 * I2, abs_floor=0.0)
        with pytest.raises(NotSpd):
            GaussParam(np.zeros(2), 1e-14 * I2)


class TestDistance:
    def test_identical(self):
        g = GaussParam(np.zeros(2), I2)
        assert wasserstein_distance(g, g) == 0.0

    def test_scaled_identity(self):
        assert wasserstein_distance(I2, 4 * I2) == pytest.approx(np.sqrt(2), rel=1e-15)

    def test_mean_shift(self):
        g1 = GaussParam([1.0, 0.0], I2)
        g2 = GaussParam([0.0, 1.0], I2)
        assert wasserstein_distance(g1, g2) == pytest.approx(np.sqrt(2), rel=1e-15)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            wasserstein_distance(I2, np.eye(3))

    def test_commuting_closed_form(self, rng):
        lam, nu = rng.uniform(0.1, 10, 5), rng.uniform(0.1, 10, 5)
        expected = float(np.sum((np.sqrt(lam) - np.sqrt(nu)) ** 2))
        Q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
        S1, S2 = (Q * lam) @ Q.T, (Q * nu) @ Q.T
        assert wasserstein_distance_sq(np.diag(lam), np.diag(nu)) == pytest.approx(expected, abs=1e-12)
        assert wasserstein_distance_sq(S1, S2) == pytest.approx(expected, abs=1e-10)

    @given(gauss_triples())
    def test_forms_agree_and_match_oracle(self, gs):
        g1, g2, _ = gs
        a = wasserstein_distance_sq(g1, g2, form="symmetric")
        b = wasserstein_distance_sq(g1, g2, form="product")
        scale = max(1.0, np.trace(g1.cov) + np.trace(g2.cov))
        assert abs(a - b) <= 1e-10 * scale
        assert wasserstein_distance_sq(g1, g2, verify=True) == a
        assert abs(a - oracles.w2(g1.mean, g1.cov, g2.mean, g2.cov)) <= 1e-9 * scale

    @given(gauss_triples())
    def test_metric_axioms(self, gs):
        g1, g2, g3 = gs
        d12, d21 = wasserstein_distance(g1, g2), wasserstein_distance(g2, g1)
        d13, d23 = wasserstein_distance(g1, g3), wasserstein_distance(g2, g3)
        assert d12 >= 0
        assert d12 == pytest.approx(d21, rel=1e-10, abs=1e-10)
        assert d13 + d23 - d12 >= -1e-10
        assert wasserstein_distance(g1, g1) <= 1e-6

    @given(gauss_triples(), st.floats(0.1, 10.0))
    def test_homogeneity(self, gs, lam):
        g1, g2, _ = gs
        s1 = GaussParam(lam * g1.mean, lam**2 * g1.cov)
        s2 = GaussParam(lam * g2.mean, lam**2 * g2.cov)
        assert wasserstein_distance(s1, s2) == pytest.approx(lam * wasserstein_distance(g1, g2), rel=1e-8, abs=1e-8)


class TestInner:
    def test_at_identity(self, rng):
        U, V = random_sym(rng, 3), random_sym(rng, 3)
        assert wasserstein_inner(np.eye(3), U, V) == pytest.approx(0.25 * np.trace(U @ V), rel=1e-14)

    def test_base_point_direction(self, rng):
        S = random_spd(rng, 4)
        assert wasserstein_inner(S, S, S) == pytest.approx(np.trace(S) / 4, rel=1e-12)

    @given(spd_and_syms(k=3, max_dim=6))
    def test_forms_symmetry_bilinearity(self, args):
        S, U, V, X = args
        w = wasserstein_inner(S, U, V)
        scale = np.linalg.norm(lyapunov_solve(S, U)) * np.linalg.norm(V)
        assert abs(w - wasserstein_inner_half(S, U, V)) <= 1e-12 * max(scale, 1e-300) + 1e-300
        assert w == pytest.approx(wasserstein_inner(S, V, U), rel=1e-10, abs=1e-12 * scale)
        lin = wasserstein_inner(S, 2 * U - 3 * X, V)
        assert lin == pytest.approx(2 * w - 3 * wasserstein_inner(S, X, V), rel=1e-9, abs=1e-9 * scale)

    @given(spd_and_syms(k=1, max_dim=6))
    def test_positive(self, args):
        S, U = args
        assert wasserstein_inner(S, U, U) > 0


class TestCouplingBounds:
    def test_identical(self):
        cb = coupling_bounds(I2, I2)
        assert (cb.min_cost, cb.max_cost) == (0.0, 8.0)
        np.testing.assert_allclose(cb.optimal_map, I2, atol=1e-15)

    def test_crossed_diagonals(self):
        cb = coupling_bounds(np.diag([1.0, 4.0]), np.diag([4.0, 1.0]))
        assert cb.min_cost == pytest.approx(2.0, abs=1e-14)
        assert cb.max_cost == pytest.approx(18.0, abs=1e-14)
        np.testing.assert_allclose(cb.optimal_map, np.diag([2.0, 0.5]), atol=1e-15)

    def test_scalar(self):
        cb = coupling_bounds(np.array([[1.0]]), np.array([[4.0]]))
        assert (cb.min_cost, cb.max_cost) == pytest.approx((1.0, 9.0), abs=1e-14)
        assert cb.optimal_map[0, 0] == pytest.approx(2.0, rel=1e-15)

    @given(gauss_triples())
    def test_invariants(self, gs):
        g1, g2, _ = gs
        cb = coupling_bounds(g1, g2)
        T = cb.optimal_map
        assert cb.min_cost <= cb.max_cost
        assert cb.min_cost == pytest.approx(wasserstein_distance_sq(g1, g2), abs=1e-10)
        assert oracles.rel(T @ g1.cov @ T, g2.cov) <= 1e-9


class TestFisher:
    def test_identity(self, rng):
        U, V = random_sym(rng, 3), random_sym(rng, 3)
        assert fisher_inner(np.eye(3), U, V) == pytest.approx(0.5 * np.trace(U @ V), rel=1e-14)

    def test_scalar(self):
        assert fisher_inner(np.array([[2.0]]), np.eye(1), np.eye(1)) == pytest.approx(1 / 8)

    @given(spd_and_syms(k=1, max_dim=6))
    def test_positive(self, args):
        C, U = args
        assert fisher_inner(C, U, U) > 0


class TestExpansion:
    def test_zero_theta(self, rng):
        assert expansion_check(random_spd(rng, 3), random_sym(rng, 3), 0.0) == (0.0, 0.0)

    @pytest.mark.parametrize("theta", [1e-1, 1e-2, 1e-3])
    def test_isotropic(self, theta):
        n = 3
        lhs, rhs = expansion_check(np.eye(n), np.eye(n), theta)
        assert lhs == pytest.approx(n * (np.sqrt(1 + theta) - 1) ** 2, rel=1e-8)
        assert rhs == pytest.approx(n * theta**2 / 4, rel=1e-14)

    def test_slope(self, rng):
        S, H = random_spd(rng, 3), random_sym(rng, 3)
        errs = []
        for theta in (1e-2, 1e-3):
            lhs, rhs = expansion_check(S, H, theta)
            errs.append(abs(lhs / rhs - 1))
        # first-order remainder: error shrinks roughly tenfold per decade
        assert errs[1] <= 0.2 * errs[0] + 1e-6

    def test_leaves_cone(self):
        with pytest.raises(NotSpd):
            expansion_check(I2, -I2, 1.0)
