"""Gamma machinery, alternating sums, and the closed-form constants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfmoments import specfun as sf
from cfmoments.errors import DomainError

# frozen from an arbitrary-precision product/series evaluation
GAMMA_3_7 = 4.170651783796603165
MELLIN_05 = 2.363271801207354703
MELLIN_M05 = 1.772453850905516027
I_2_07 = 1.4570757861536125292


class TestGamma:
    def test_half_integer(self):
        assert sf.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_factorial(self):
        assert sf.gamma(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_high_precision_oracle(self):
        assert sf.gamma(3.7) == pytest.approx(GAMMA_3_7, rel=1e-12)

    def test_pole_errors(self):
        for x in (0.0, -1.0, -2.0, -7.0):
            with pytest.raises(DomainError):
                sf.gamma(x)

    def test_recurrence_grid(self):
        xs = np.linspace(0.1, 49.0, 1201)
        worst = max(
            abs(sf.gamma(x + 1.0) - x * sf.gamma(x)) / abs(sf.gamma(x + 1.0))
            for x in xs
        )
        assert worst < 1e-12

    def test_reflection_grid(self):
        xs = np.linspace(0.01, 0.99, 197)
        for x in xs:
            lhs = sf.gamma(1.0 - x) * sf.gamma(x) * math.sin(math.pi * x)
            assert lhs == pytest.approx(math.pi, rel=1e-12)

    def test_duplication_grid(self):
        xs = np.linspace(0.1, 20.0, 241)
        for x in xs:
            lhs = sf.gamma(x) * sf.gamma(x + 0.5)
            rhs = 2.0 ** (1.0 - 2.0 * x) * math.sqrt(math.pi) * sf.gamma(2.0 * x)
            assert lhs == pytest.approx(rhs, rel=1e-11)

    @given(st.floats(0.2, 20.0))
    @settings(max_examples=60, deadline=None)
    def test_recurrence_property(self, x):
        assert sf.gamma(x + 1.0) == pytest.approx(x * sf.gamma(x), rel=1e-12)


class TestPowerDifferenceSum:
    def test_interior_integers_vanish(self):
        assert sf.power_difference_sum(2, 1.0) == 0.0
        for k in range(2, 8):
            for n in range(1, k):
                assert sf.power_difference_sum(k, float(n)) == 0.0

    def test_factorial_at_k(self):
        assert sf.power_difference_sum(3, 3.0) == pytest.approx(6.0, rel=1e-14)
        for k in range(1, 9):
            assert sf.power_difference_sum(k, float(k)) == pytest.approx(
                math.factorial(k), rel=1e-12
            )

    def test_single_term(self):
        assert sf.power_difference_sum(1, 0.5) == 1.0

    def test_order_cap(self):
        with pytest.raises(DomainError):
            sf.power_difference_sum(13, 0.5)

    @given(
        st.integers(1, 8),
        st.floats(0.05, 11.0).filter(lambda a: abs(a - round(a)) > 1e-3),
    )
    @settings(max_examples=80, deadline=None)
    def test_nonzero_off_integers(self, k, alpha):
        assert sf.power_difference_sum(k, alpha) != 0.0

    def test_mean_value_theta_in_unit_interval(self):
        for k in (1, 2, 3, 4, 5):
            for alpha in (0.3, 0.8, 1.4, 2.6, 3.3, 5.7, 7.2):
                if abs(alpha - round(alpha)) < 1e-9 or (alpha < k and alpha == int(alpha)):
                    continue
                if alpha <= k - 1 + 1e-9 and abs(alpha - round(alpha)) < 1e-9:
                    continue
                theta = sf.mean_value_theta(k, alpha)
                assert 0.0 < theta < 1.0, (k, alpha, theta)


class TestConstants:
    def test_moment_constant_k1_alpha1(self):
        assert sf.moment_constant(1, 1.0, 1) == pytest.approx(-1.0 / math.pi, rel=1e-14)

    def test_moment_constant_k1_alpha_half(self):
        expected = -math.sin(math.pi / 4) * sf.gamma(1.5) / math.pi
        assert sf.moment_constant(1, 0.5, 1) == pytest.approx(expected, rel=1e-13)
        assert sf.moment_constant(1, 0.5, 1) == pytest.approx(-0.19947114020071634, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            sf.moment_constant(2, 1.0, 1)  # alternating sum vanishes
        with pytest.raises(DomainError):
            sf.moment_constant(3, 2.0, 1)  # even integer order

    def test_reciprocal_pair(self):
        assert sf.difference_integral_constant(1, 1.0, 1) == pytest.approx(-math.pi, rel=1e-14)
        rec = sf.difference_integral_constant(1, 0.5, 1)
        assert rec == pytest.approx(1.0 / sf.moment_constant(1, 0.5, 1), rel=1e-13)
        assert math.isfinite(sf.difference_integral_constant(3, 3.0, 2))
        assert sf.difference_integral_constant(3, 3.0, 2) != 0.0

    def test_reciprocal_invariant_grid(self):
        for k in (1, 2, 3, 4, 5):
            for d in (1, 2, 3):
                for alpha in np.arange(0.1, k + (0.9 if k % 2 else -0.1), 0.2):
                    if abs(alpha - round(alpha)) < 0.05:
                        continue
                    prod = sf.moment_constant(k, alpha, d) * sf.difference_integral_constant(k, alpha, d)
                    assert prod == pytest.approx(1.0, rel=1e-12), (k, alpha, d)


class TestKernelIntegral:
    def test_exact_values(self):
        assert sf.cosine_difference_integral(1, 1.0) == pytest.approx(-math.pi, abs=1e-12)
        assert sf.cosine_difference_integral(3, 3.0) == pytest.approx(math.pi, abs=1e-12)
        assert sf.cosine_difference_integral(5, 5.0) == pytest.approx(-math.pi, abs=1e-12)

    def test_interior_integers_vanish(self):
        assert sf.cosine_difference_integral(3, 2.0) == 0.0
        assert sf.cosine_difference_integral(4, 3.0) == 0.0

    def test_oracle_value(self):
        assert sf.cosine_difference_integral(2, 0.7) == pytest.approx(I_2_07, rel=1e-13)

    def test_range_errors(self):
        with pytest.raises(DomainError):
            sf.cosine_difference_integral(2, 2.0)   # even k needs alpha < k
        with pytest.raises(DomainError):
            sf.cosine_difference_integral(3, 4.0)   # odd k needs alpha < k+1
        with pytest.raises(DomainError):
            sf.cosine_difference_integral(1, -0.5)

    def test_kernel_bound_pointwise(self):
        rs = np.geomspace(1e-3, 50.0, 400)
        for k in (1, 3, 5):
            vals = np.abs(sf.cosine_difference_kernel(k, rs))
            bound = sf.cosine_difference_kernel_bound(k, rs)
            assert np.all(vals <= bound * (1.0 + 1e-12)), k
        for k in (2, 4):
            vals = np.abs(sf.cosine_difference_kernel(k, rs))
            bound = sf.cosine_difference_kernel_bound(k, rs)
            assert np.all(vals <= bound * (1.0 + 1e-12)), k

    def test_kernel_matches_direct_expansion(self):
        rs = np.linspace(0.1, 20.0, 57)
        for k in (1, 2, 3, 4, 5):
            direct = (np.exp(-1j * rs) - 1) ** k + (np.exp(1j * rs) - 1) ** k
            stable = sf.cosine_difference_kernel(k, rs)
            assert np.abs(direct.real - stable).max() < 1e-11


class TestMellin:
    def test_limit_value(self):
        assert sf.sin_squared_mellin(0.0) == math.pi / 2.0

    def test_quadrature_oracle_values(self):
        assert sf.sin_squared_mellin(0.5) == pytest.approx(MELLIN_05, rel=1e-13)
        assert sf.sin_squared_mellin(-0.5) == pytest.approx(MELLIN_M05, rel=1e-13)

    def test_range(self):
        for bad in (-1.0, 1.0, 1.5):
            with pytest.raises(DomainError):
                sf.sin_squared_mellin(bad)


class TestSphereArea:
    def test_values(self):
        assert sf.sphere_area(1) == 2.0
        assert sf.sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
        assert sf.sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)


class TestTrigPowerTail:
    @pytest.mark.parametrize("y,alpha", [(40.0, 0.5), (32.0, 1.5), (80.0, 2.5), (25.0, 0.3)])
    def test_against_fourier_quadrature(self, y, alpha):
        from scipy.integrate import quad

        got, bound = sf.trig_power_tail(y, alpha)
        oc, _ = quad(lambda u: u ** (-1 - alpha), y, np.inf, weight="cos", wvar=1.0)
        os_, _ = quad(lambda u: u ** (-1 - alpha), y, np.inf, weight="sin", wvar=1.0)
        assert got.real == pytest.approx(oc, abs=5e-10)
        assert got.imag == pytest.approx(os_, abs=5e-10)
