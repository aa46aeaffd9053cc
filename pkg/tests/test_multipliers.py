import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fourier_growth import multipliers as mult
from fourier_growth.errors import ConfigError, DomainError
from fourier_growth.special_functions import spherical_bessel_j

BASES = [(k, n) for k in ("sphere", "ball", "cube", "gauss", "wave") for n in (2, 3)]


def mk(kind, n):
    return mult.make_multiplier(kind, n)


def edge_quadrature_cube2(xi):
    # four unit edges of the square [-1/2, 1/2]^2
    def edge(p0, d):
        return integrate.quad(lambda u: math.cos(xi @ (p0 + u * d)), 0, 1, epsabs=1e-13, epsrel=1e-13,
                              limit=200)[0]
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    total = (edge(np.array([-0.5, -0.5]), e1) + edge(np.array([-0.5, 0.5]), e1)
             + edge(np.array([-0.5, -0.5]), e2) + edge(np.array([0.5, -0.5]), e2))
    return total / 4


class TestCatalog:
    def test_gauss_value(self):
        mu = mk("gauss", 3)
        assert mu.symbol_at_radius(1.0) == pytest.approx(0.3678794412, abs=1e-10)

    def test_sphere3_zero_at_pi(self):
        assert abs(mk("sphere", 3).symbol_at_radius(math.pi)) < 1e-12

    @pytest.mark.parametrize("kind,n", BASES)
    def test_origin_is_one(self, kind, n):
        mu = mk(kind, n)
        assert mu.symbol(np.zeros(n)) == pytest.approx(1.0, abs=1e-15)
        assert mu.deficit(np.zeros(n)) == pytest.approx(0.0, abs=1e-15)

    def test_ball_is_next_order(self):
        lam = np.linspace(0.1, 20, 30)
        assert np.allclose(mk("ball", 3).symbol_at_radius(lam), spherical_bessel_j(1.5, lam), atol=1e-14)

    def test_cube_matches_edge_quadrature(self):
        rng = np.random.default_rng(7)
        mu = mk("cube", 2)
        for xi in rng.normal(scale=8.0, size=(100, 2)):
            assert mu.symbol(xi) == pytest.approx(edge_quadrature_cube2(xi), abs=1e-10)

    def test_polytope_cube_agrees_with_closed_form(self):
        rng = np.random.default_rng(3)
        xi = rng.normal(scale=10.0, size=(50, 3))
        poly = mult.make_multiplier("polytope", 3, mult.cube_surface(3))
        assert np.allclose(poly.symbol(xi), mult.cube_symbol(xi), atol=1e-12)

    def test_polytope_box_direct(self):
        poly = mult.make_multiplier("polytope", 2, mult.box_surface([1.0, 2.0]))
        xi = np.array([1.3, -0.4])
        # perimeter 6: two edges of length 1 at y = +-1, two of length 2 at x = +-1/2
        ex = 2 * 1 * math.cos(xi[1]) * np.sinc(xi[0] / 2 / math.pi)
        ey = 2 * 2 * math.cos(xi[0] / 2) * np.sinc(xi[1] / math.pi)
        assert poly.symbol(xi) == pytest.approx((ex + ey) / 6, abs=1e-13)

    def test_deficit_consistent_with_symbol(self):
        rng = np.random.default_rng(11)
        for kind, n in BASES:
            mu = mk(kind, n)
            xi = rng.normal(scale=3.0, size=(40, n))
            assert np.allclose(mu.deficit(xi), 1 - mu.symbol(xi), atol=1e-13)

    def test_cube_deficit_small_xi_is_stable(self):
        mu = mk("cube", 3)
        xi = np.array([1e-6, 2e-6, -1e-6])
        # 1 - cube ~ |xi|^2 / 12 * (area-weighted second moment); positive and of order |xi|^2
        d = mu.deficit(xi)
        assert 0 < d < 1e-11
        assert mu.deficit(2 * xi) / d == pytest.approx(4.0, rel=1e-6)

    def test_rejects_unknown_kind(self):
        with pytest.raises(DomainError):
            mult.make_multiplier("triangle", 2)

    def test_polytope_needs_surface(self):
        with pytest.raises(ConfigError):
            mult.make_multiplier("polytope", 2)

    def test_sphere_needs_dim2(self):
        with pytest.raises(DomainError):
            mult.make_multiplier("sphere", 1)


class TestCompositions:
    def test_power(self):
        mu = mk("gauss", 2)
        xi = np.array([0.8, 0.1])
        assert mult.compose_power(mu, 1).symbol(xi) == pytest.approx(mu.symbol(xi), abs=1e-15)
        assert mult.compose_power(mu, 3).symbol(xi) == pytest.approx(mu.symbol(xi) ** 3, abs=1e-15)
        assert mult.compose_power(mu, 4).symbol(np.zeros(2)) == 1.0

    def test_binomial_value(self):
        mu = mk("sphere", 3)
        lam = 1.9  # where the sphere symbol is near 1/2
        s = mu.symbol_at_radius(lam)
        b = mult.compose_binomial(mu, 2)
        assert b.symbol_at_radius(lam) == pytest.approx(1 - (1 - s) ** 2, abs=1e-14)
        assert b.sigma == 2.0
        assert b.symbol(np.zeros(3)) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("kind,n", BASES)
    @pytest.mark.parametrize("l", [1, 2, 3, 4])
    def test_binomial_identity(self, kind, n, l):
        mu = mk(kind, n)
        xi = np.random.default_rng(l).normal(scale=2.0, size=(30, n))
        b = mult.compose_binomial(mu, l)
        assert np.max(np.abs((1 - b.symbol(xi)) - (1 - mu.symbol(xi)) ** l)) <= 1e-12

    def test_dai_ditzian_l1(self):
        mu = mk("sphere", 3)
        lam = np.linspace(0, 10, 21)
        assert np.allclose(mult.compose_dai_ditzian(mu, 1).symbol_at_radius(lam),
                           mu.symbol_at_radius(lam), atol=1e-14)

    def test_dai_ditzian_origin(self):
        assert mult.compose_dai_ditzian(mk("sphere", 2), 2).symbol(np.zeros(2)) == pytest.approx(1.0, abs=1e-14)

    def test_dai_ditzian_closed_form(self):
        dd = mult.compose_dai_ditzian(mk("sphere", 3), 2)
        expect = 2 * (1 / 6) * (4 * spherical_bessel_j(0.5, 2.0) - spherical_bessel_j(0.5, 4.0))
        assert dd.symbol_at_radius(2.0) == pytest.approx(expect, abs=1e-12)
        assert dd.sigma == 2.0

    @pytest.mark.parametrize("kind", ["gauss", "cube", "wave"])
    def test_dai_ditzian_deficit_order(self, kind):
        dd = mult.compose_dai_ditzian(mk(kind, 2), 2)
        d1 = dd.deficit_at_radius(1e-2)
        d2 = dd.deficit_at_radius(2e-2)
        assert math.log(d2 / d1) / math.log(2) == pytest.approx(4.0, abs=1e-2)

    def test_bad_l(self):
        with pytest.raises(DomainError):
            mult.compose_binomial(mk("gauss", 2), 0)


class TestScan:
    def test_gauss_constants(self):
        scan = mult.ksigma_scan(mk("gauss", 2))
        assert scan.c_lower == pytest.approx(1 - math.exp(-1), rel=1e-2)
        assert scan.c_upper == pytest.approx(1.0, rel=1e-2)

    def test_sphere3_constants(self):
        scan = mult.ksigma_scan(mk("sphere", 3))
        assert scan.c_lower == pytest.approx(0.1585, rel=1e-2)
        assert scan.c_upper == pytest.approx(1.2172, rel=1e-2)
        assert np.linalg.norm(scan.arg_upper) == pytest.approx(4.493, abs=1e-2)

    def test_binomial_gauss(self):
        scan = mult.ksigma_scan(mult.compose_binomial(mk("gauss", 2), 2))
        assert scan.sigma == 2.0
        assert scan.c_lower == pytest.approx((1 - math.exp(-1)) ** 2, rel=1e-2)
        assert scan.c_upper == pytest.approx(1.0, rel=1e-2)

    def test_wrong_sigma(self):
        # too large an order blows up the upper constant, too small a one sinks the lower
        over = mult.ksigma_scan(mk("gauss", 2), sigma=2.0)
        assert over.c_upper > 1e5
        under = mult.ksigma_scan(mk("gauss", 2), sigma=0.5, lambda_min=1e-6)
        assert not under.passed

    def test_grid_rows(self):
        scan = mult.ksigma_scan(mk("cube", 2), n_points=50, n_directions=4, keep_grid=True)
        rows = list(scan.csv_rows())
        assert len(rows) == 4 * 51
        assert rows[0][0] == "cube2"

    def test_bad_grid(self):
        with pytest.raises(DomainError):
            mult.ksigma_scan(mk("gauss", 2), lambda_min=2.0, lambda_max=1.0)

    def test_direction_sets_unit(self):
        for n in (2, 3, 4):
            d = mult.direction_set(n, 64)
            assert d.shape == (64, n)
            assert np.allclose(np.linalg.norm(d, axis=1), 1.0)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(1e-3, 1e3))
    def test_scan_brackets_ratio(self, lam):
        mu = mk("sphere", 2)
        scan = mult.ksigma_scan(mu, n_points=2000)
        r = float(mult.scan_ratio(mu, 1.0, lam))
        assert scan.c_lower * (1 - 1e-9) <= r <= scan.c_upper * (1 + 1e-9)
