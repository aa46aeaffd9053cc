import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourier_growth import multipliers as mult
from fourier_growth import torus
from fourier_growth.errors import DimensionMismatchError, DomainError

PS = (1.0, 1.5, 2.0, 3.0, math.inf)


class TestSpectrum:
    def test_single_mode_real(self):
        f = torus.single_mode(2, (3, 0), 1.0)
        nz = np.argwhere(f.coefficients != 0)
        assert len(nz) == 2
        assert f.coefficient((3, 0)) == 0.5 and f.coefficient((-3, 0)) == 0.5
        x = np.arange(f.side * 4) * 2 * math.pi / (f.side * 4)
        assert np.allclose(f.synthesize(4)[:, 0], np.cos(3 * x), atol=1e-14)

    def test_constant(self):
        f = torus.single_mode(1, (0,), 2.5)
        assert np.allclose(f.synthesize(), 2.5)

    def test_power_spectrum_1d(self):
        f = torus.power_spectrum(1, 2, 1)
        assert np.allclose(f.coefficients.real, [0.5, 1, 0, 1, 0.5])

    def test_power_spectrum_zeta(self):
        f = torus.power_spectrum(1, 1000, 1)
        assert f.parseval_norm() ** 2 == pytest.approx(math.pi ** 2 / 3, rel=2e-3)

    def test_power_spectrum_rejects(self):
        with pytest.raises(DomainError):
            torus.power_spectrum(2, 4, 0)

    def test_random_deterministic(self):
        a = torus.random_spectrum(5, 2, 6, 1.0)
        b = torus.random_spectrum(5, 2, 6, 1.0)
        assert np.array_equal(a.coefficients, b.coefficients)
        assert not np.array_equal(a.coefficients, torus.random_spectrum(6, 2, 6, 1.0).coefficients)

    def test_random_populated_and_hermitian(self):
        f = torus.random_spectrum(0, 2, 4)
        c = f.coefficients
        assert np.count_nonzero(c) == 81
        assert np.allclose(c, np.conj(c[::-1, ::-1]))
        assert c[4, 4].imag == 0

    def test_random_decay(self):
        f = torus.random_spectrum(1, 2, 8, decay=10)
        shells = f.max_norms()
        mag = np.abs(f.coefficients)
        assert mag[shells == 8].mean() / mag[shells == 1].mean() < 1e-4

    def test_json_roundtrip(self):
        f = torus.random_spectrum(2, 2, 3, 1.0)
        g = torus.Spectrum.from_json(f.to_json())
        assert np.array_equal(f.coefficients, g.coefficients) and g.real

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            torus.single_mode(2, (1, 2, 3))

    def test_arithmetic_requires_same_box(self):
        with pytest.raises(DimensionMismatchError):
            torus.single_mode(1, (1,)) + torus.single_mode(1, (2,))


class TestNorms:
    @pytest.mark.parametrize("p", PS)
    def test_constant(self, p):
        assert torus.lp_norm_torus(torus.single_mode(2, (0, 0), -3.0), p) == pytest.approx(3.0, abs=1e-13)

    @pytest.mark.parametrize("p", PS)
    def test_complex_mode(self, p):
        f = torus.single_mode(2, (2, -1), 1.0, real=False)
        assert torus.lp_norm_torus(f, p) == pytest.approx(1.0, abs=1e-13)

    def test_parseval(self):
        f = torus.random_spectrum(3, 2, 16, 0.5)
        assert torus.lp_norm_torus(f, 2) == pytest.approx(f.parseval_norm(), rel=1e-10)

    def test_cos_l1(self):
        # mean |cos x| = 2/pi; the rectangle rule is not exact at p = 1
        f = torus.single_mode(1, (1,), 1.0)
        assert torus.lp_norm_torus(f, 1, oversample=64) == pytest.approx(2 / math.pi, rel=1e-4)

    def test_oversample_stability_smooth(self):
        f = torus.random_spectrum(4, 2, 8, decay=3)
        for p in (1.5, 3.0):
            a, b = torus.lp_norm_torus(f, p, 4), torus.lp_norm_torus(f, p, 8)
            assert abs(a - b) / b < 1e-4

    def test_rejects_small_p(self):
        with pytest.raises(DomainError):
            torus.lp_norm_torus(torus.single_mode(1, (1,)), 0.5)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.floats(1.0, 4.0))
    def test_monotone_in_p(self, seed, p):
        f = torus.random_spectrum(seed, 1, 6)
        assert torus.lp_norm_torus(f, p) <= torus.lp_norm_torus(f, p + 0.5) * (1 + 1e-12)


class TestOperators:
    def test_t_zero_identity(self):
        f = torus.random_spectrum(0, 2, 5)
        g = torus.apply_torus_multiplier(f, mult.make_multiplier("sphere", 2), 0.0)
        assert np.allclose(g.coefficients, f.coefficients, atol=1e-15)

    def test_difference_is_minus_deficit(self):
        mu = mult.make_multiplier("cube", 2)
        f = torus.random_spectrum(1, 2, 4)
        d = torus.difference_spectrum(f, mu, 0.3)
        ref = torus.apply_torus_multiplier(f, mu, 0.3) - f
        assert np.allclose(d.coefficients, ref.coefficients, atol=1e-14)

    def test_lattice_symbol_radial_shells(self):
        mu = mult.make_multiplier("sphere", 3)
        vals = torus.multiplier_on_lattice(mu, 0.7, 3, 3)
        k = torus._lattice(3, 3)
        ref = mu.symbol(0.7 * k.reshape(-1, 3).astype(float)).reshape(vals.shape)
        assert np.allclose(vals, ref, atol=1e-14)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            torus.apply_torus_multiplier(torus.random_spectrum(0, 3, 2), mult.make_multiplier("sphere", 2), 1.0)


class TestModulus:
    def test_single_mode_closed_form(self):
        f = torus.single_mode(1, (5,), 1.0, real=False)
        assert torus.omega_modulus(f, 2, 1.0) == pytest.approx(4.0, abs=1e-12)
        expect = 4 * math.sin(5 * 0.2 / 2) ** 2
        assert torus.omega_modulus(f, 2, 0.2) == pytest.approx(expect, abs=1e-12)

    def test_small_t(self):
        f = torus.random_spectrum(0, 1, 8, 1.0)
        bound = 4 * math.sin(8 * 1e-3 / 2) ** 2 * torus.lp_norm_torus(f, 2) * 8
        assert torus.omega_modulus(f, 2, 1e-3) < bound

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 1000), st.floats(0.05, 5.0))
    def test_triangle_bound(self, seed, t):
        f = torus.random_spectrum(seed, 1, 6)
        assert torus.omega_modulus(f, 1.5, t, h_steps=16) <= 4 * torus.lp_norm_torus(f, 1.5) + 1e-10

    def test_dim_two_refused(self):
        with pytest.raises(DomainError):
            torus.omega_modulus(torus.random_spectrum(0, 2, 2), 2, 0.5)


class TestSpectralSums:
    def test_constant_zero(self):
        f = torus.single_mode(2, (0, 0), 4.0)
        assert torus.spectral_min_lhs(f, 0.5, 1.0, 1.5) == 0.0

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
    def test_single_mode_collapse(self, p):
        f = torus.single_mode(2, (3, 4), 2.0, real=False)
        for t in (0.01, 0.1, 1.0):
            expect = min(1.0, (5 * t) ** 2) * 2.0
            assert torus.spectral_min_lhs(f, t, 1.0, p) == pytest.approx(expect, rel=1e-13)

    def test_saturated_weight(self):
        f = torus.random_spectrum(2, 2, 4)
        coeffs = f.coefficients.copy()
        coeffs[4, 4] = 0
        g = f.with_coefficients(coeffs)
        q = 3.0
        expect = np.sum(np.abs(coeffs) ** q) ** (1 / q)
        assert torus.spectral_min_lhs(g, 1.0, 2.0, 1.5) == pytest.approx(expect, rel=1e-13)

    def test_pick_reduces_at_two(self):
        f = torus.random_spectrum(3, 2, 6)
        assert torus.pick_lhs(f, 0.2, 1.0, 2, 2) == pytest.approx(torus.spectral_min_lhs(f, 0.2, 1.0, 2), rel=1e-13)

    def test_pick_single_mode(self):
        f = torus.single_mode(2, (1, 2), 1.0, real=False)
        w = torus.pick_weight_exponent(2, 1.5, 2) / 2
        expect = min(1.0, 0.3 * math.sqrt(5)) ** 2 * math.sqrt(5) ** w
        assert torus.pick_lhs(f, 0.3, 1.0, 1.5, 2) == pytest.approx(expect, rel=1e-13)

    def test_hardy_littlewood_exponent(self):
        for p in (1.2, 1.5, 2.0):
            assert torus.pick_weight_exponent(2, p, p) == pytest.approx(2 * (p - 2))
            assert torus.pick_weight_exponent(2, p, p) <= 0

    def test_pick_directions(self):
        assert torus.pick_direction(1.5, 2) == 1
        assert torus.pick_direction(3, 2) == 2
        with pytest.raises(DomainError):
            torus.pick_direction(1.5, 4)

    def test_tail(self):
        f = torus.single_mode(2, (3, 0), 1.0, real=False)
        assert torus.tail_sum(f, 0.1, 1.5) == 0.0
        assert torus.tail_sum(f, 1.0, 1.5) == pytest.approx(1.0)
        assert torus.tail_sum(f, 1.0, 1) == pytest.approx(1.0)

    def test_shell_sums(self):
        f = torus.power_spectrum(2, 12, 2.0)
        direct = torus.shell_partial_sums(f, 1.2)
        law = torus.law_shell_partial_sums(2, 12, lambda r: r ** (-2.4))
        assert np.allclose(direct, law, rtol=1e-13)

    def test_shell_sums_single_mode(self):
        f = torus.single_mode(2, (2, 1), 1.0)
        for beta in (0.1, 1.0, 5.0):
            s = torus.shell_partial_sums(f, beta)
            assert s[-1] == s[1] == pytest.approx(2 * 0.5 ** beta)
