import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from fourier_growth import radial
from fourier_growth.errors import DivergenceError, DomainError
from fourier_growth.special_functions import spherical_bessel_j, unit_sphere_measures


def titchmarsh_n3_oracle(gamma, lam):
    # F(lam) = 4 pi / lam * int_0^inf r^(1-gamma) / (1 + r^(3-gamma)) sin(lam r) dr (QAWO + QAWF)
    g = lambda r: r ** (1 - gamma) / (1 + r ** (3 - gamma)) if r > 0 else 0.0
    near = integrate.quad(g, 0, 1, weight="sin", wvar=lam, epsabs=1e-13, limit=400)[0]
    far = integrate.quad(g, 1, np.inf, weight="sin", wvar=lam, epsabs=1e-13, limlst=200)[0]
    return 4 * math.pi / lam * (near + far)


class TestProfiles:
    def test_titchmarsh_at_one(self):
        for n, g in ((2, 0.7), (3, 1.2), (1, 0.3)):
            assert radial.make_titchmarsh_profile(n, g)(1.0) == pytest.approx(0.5)

    def test_titchmarsh_head(self):
        f = radial.make_titchmarsh_profile(2, 0.7)
        assert float(f(1e-8)) * 1e-8 ** 0.7 == pytest.approx(1.0, abs=1e-6)

    def test_titchmarsh_gamma_range(self):
        with pytest.raises(DomainError):
            radial.make_titchmarsh_profile(2, 2.0)

    def test_titchmarsh_l2(self):
        f = radial.make_titchmarsh_profile(2, 0.7)
        ref = math.sqrt(2 * math.pi * integrate.quad(lambda r: float(f(r)) ** 2 * r, 0, np.inf,
                                                     epsabs=1e-13, limit=400)[0])
        assert radial.lp_norm_radial(f, 2) == pytest.approx(ref, rel=1e-8)

    def test_transform_csv(self):
        st = radial.ShellTransform(2, [1.0, 2.0], [0.5, 0.25])
        assert st.to_csv() == "lambda,value\n1.0,0.5\n2.0,0.25\n"

    def test_transform_rejects_unsorted(self):
        with pytest.raises(DomainError):
            radial.ShellTransform(2, [2.0, 1.0], [0.5, 0.25])


class TestNorms:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
    def test_ball(self, n, p):
        _, vol = unit_sphere_measures(n)
        assert radial.lp_norm_radial(radial.make_ball_indicator(n), p) == pytest.approx(vol ** (1 / p), rel=1e-12)

    @pytest.mark.parametrize("a", [0.3, 2.0, 7.5])
    def test_scaling(self, a):
        f = radial.make_gaussian_profile(3)
        assert radial.lp_norm_radial(f.scaled(a), 1.7) == pytest.approx(a ** (3 / 1.7) * radial.lp_norm_radial(f, 1.7), rel=1e-8)

    def test_gaussian_r3(self):
        expect = math.sqrt(4 * math.pi * math.sqrt(math.pi / 2))
        assert radial.lp_norm_radial(radial.make_gaussian_profile(3), 2) == pytest.approx(expect, rel=1e-8)

    def test_divergence(self):
        with pytest.raises(DivergenceError):
            radial.lp_norm_radial(radial.make_titchmarsh_profile(2, 1.2), 2)
        with pytest.raises(DivergenceError):
            radial.lp_norm_radial(radial.make_titchmarsh_profile(2, 0.5), 1)


class TestSphericalMean:
    def test_constant(self):
        f = radial.RadialProfile(3, lambda r: np.ones_like(r))
        assert np.allclose(radial.spherical_mean_radial(f, 0.7, np.array([0.0, 0.3, 0.7, 2.0])), 1.0, atol=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_square(self, n):
        f = radial.RadialProfile(n, lambda r: r * r)
        r = np.array([0.0, 0.2, 1.0, 3.0])
        assert np.allclose(radial.spherical_mean_radial(f, 1.3, r), r * r + 1.69, rtol=1e-13)

    def test_n3_closed_form(self):
        # in R^3 the mean of g(|x|) is (1/(2 r t)) int_{|r-t|}^{r+t} g(s) s ds
        f = radial.make_gaussian_profile(3)
        r, t = 0.8, 1.1
        ref = integrate.quad(lambda s: math.exp(-s * s / 4) * s, abs(r - t), r + t, epsabs=1e-15)[0] / (2 * r * t)
        assert float(radial.spherical_mean_radial(f, t, r)) == pytest.approx(ref, rel=1e-13)

    def test_singular_warning(self):
        f = radial.make_titchmarsh_profile(2, 0.7)
        with pytest.warns(radial.AccuracyWarning):
            radial.spherical_mean_radial(f, 1.0, 1.0)

    def test_modulus_constant_is_zero(self):
        f = radial.RadialProfile(2, lambda r: np.ones_like(r))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert radial.modulus_sphere_mean(f, 2, 0.5, r_max=50) == pytest.approx(0.0, abs=1e-12)

    def test_modulus_gaussian_small_t(self):
        # ||M^t f - f||_2 ~ t^2 for smooth f
        f = radial.make_gaussian_profile(2)
        m1 = radial.modulus_sphere_mean(f, 2, 1e-2)
        m2 = radial.modulus_sphere_mean(f, 2, 2e-2)
        assert math.log(m2 / m1) / math.log(2) == pytest.approx(2.0, abs=1e-3)


class TestFourier:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_gaussian_example(self, n):
        f = radial.make_gaussian_profile(n, 1.0 / (2 ** n * math.pi ** (n / 2)))
        lam = np.array([0.0, 0.5, 1.0, 2.0, 3.0])
        assert np.allclose(radial.radial_fourier(f, lam).values, np.exp(-lam ** 2), atol=1e-8)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_ball_example(self, n):
        _, vol = unit_sphere_measures(n)
        f = radial.make_ball_indicator(n, height=1.0 / vol)
        lam = np.array([0.0, 0.7, 3.0, 10.0, 40.0])
        ref = spherical_bessel_j(0.5 * (n - 2) + 1, lam)
        assert np.allclose(radial.radial_fourier(f, lam).values, ref, atol=1e-8)

    def test_zero_frequency_is_integral(self):
        f = radial.make_gaussian_profile(3)
        total = 4 * math.pi * 2 * math.sqrt(math.pi)  # int e^{-r^2/4} r^2 dr = 2 sqrt(pi)
        assert radial.radial_fourier(f, [0.0]).values[0] == pytest.approx(total, rel=1e-10)

    @pytest.mark.parametrize("lam", [0.5, 3.0, 20.0])
    def test_titchmarsh_n3(self, lam):
        ref = titchmarsh_n3_oracle(1.2, lam)
        direct = radial.radial_fourier(radial.make_titchmarsh_profile(3, 1.2), [lam]).values[0]
        contour = radial.titchmarsh_fourier(3, 1.2, [lam]).values[0]
        assert contour == pytest.approx(ref, rel=1e-8)
        assert direct == pytest.approx(ref, rel=1e-6)

    def test_titchmarsh_decay_slope(self):
        lam = np.geomspace(1e3, 1e10, 15)
        F = radial.titchmarsh_fourier(2, 0.7, lam).values
        slope = np.polyfit(np.log(lam), np.log(F), 1)[0]
        assert slope == pytest.approx(0.7 - 2, abs=1e-3)


class TestIntegrability:
    def test_power_law(self):
        for n in (1, 2, 3):
            lam = np.geomspace(1, 1e4, 41)
            F = radial.ShellTransform(n, lam, lam ** (-float(n)))
            assert radial.integrability_partial(F, 1, 1e4) == pytest.approx(math.log(1e4), rel=1e-6)
            assert radial.integrability_partial(F, 2, 1e3) == pytest.approx((1 - 1e-3 ** n) / n, rel=1e-6)
            assert radial.integrability_partial(F, 2, 1.0) == 0.0

    def test_grid_must_cover(self):
        F = radial.ShellTransform(2, [2.0, 3.0], [1.0, 1.0])
        with pytest.raises(DomainError):
            radial.integrability_partial(F, 1, 2.5)
