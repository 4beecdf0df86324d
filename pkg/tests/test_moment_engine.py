"""The difference-integral moment engine against its closed-form oracles."""

import math

import numpy as np
import pytest

from cfmoments import charfn as cf
from cfmoments import closed_forms as cfo
from cfmoments import moment_engine as me
from cfmoments.errors import DivergenceSuspectedError, DomainError
from cfmoments.quadrature import QuadratureSpec
from cfmoments.specfun import gamma, power_difference_sum


class TestSelectOrder:
    def test_small_fractional(self):
        assert me.select_difference_order(0.5) == (1, "M13")

    def test_odd_integer(self):
        assert me.select_difference_order(3.0) == (3, "M13")

    def test_even_integer(self):
        assert me.select_difference_order(2.0) == (None, "even-limit")

    def test_larger_fractional(self):
        assert me.select_difference_order(2.5) == (3, "M13")

    def test_complex_preference(self):
        assert me.select_difference_order(2.5, prefer_real=False) == (3, "M12")
        assert me.select_difference_order(1.5, prefer_real=False) == (2, "M12")

    def test_positive_order_required(self):
        with pytest.raises(DomainError):
            me.select_difference_order(0.0)


class TestAbsoluteMoment:
    def test_gaussian_first_moment(self):
        res = me.absolute_moment(cf.make_gaussian(1.0, 1), 1.0)
        assert res.value == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-9)
        assert res.value == pytest.approx(1.1283791671, abs=1e-9)
        assert res.formula == "M13" and res.k_used == 1

    def test_cauchy_half_moment(self):
        res = me.absolute_moment(cf.make_stable(1.0, 1.0, 1), 0.5)
        assert res.value == pytest.approx(math.sqrt(2.0), rel=1e-9)

    def test_point_mass(self):
        res = me.absolute_moment(cf.make_point_mass([1.7]), 0.8)
        assert res.value == pytest.approx(1.7**0.8, rel=1e-9)

    def test_empirical_quadrature_vs_exact(self):
        rng = np.random.default_rng(1234)
        xs = rng.normal(size=50)
        e = cf.make_empirical(xs)
        for a in (0.5, 0.7):
            res = me.absolute_moment(e, a)
            brute = float(np.mean(np.abs(xs) ** a))
            assert res.value == pytest.approx(brute, rel=1e-3)
            exact = me.absolute_moment(e, a, method="exact")
            assert exact.formula == "discrete-exact"
            assert exact.value == pytest.approx(brute, rel=1e-14)

    def test_value_nonnegative_and_error_reported(self):
        res = me.absolute_moment(cf.make_linnik(1.5, 1.0, 2), 0.9)
        assert res.value >= 0.0
        assert res.error_estimate >= 0.0

    def test_even_integer_routes_to_limit(self):
        res = me.absolute_moment(cf.make_gaussian(1.0, 1), 2.0)
        assert res.formula == "even-limit"
        assert res.value == pytest.approx(2.0, abs=1e-4)

    def test_guard_band_reroutes_complex_formula(self):
        g = cf.make_gaussian(1.0, 1)
        res = me.absolute_moment(g, 1.0 + 5e-7, k=2, formula="M12")
        assert res.diagnostics.get("rerouted")
        assert res.formula == "M13"
        expected = 2.0 ** (1.0 + 5e-7) * gamma((2.0 + 5e-7) / 2) / gamma(0.5)
        assert res.value == pytest.approx(expected, rel=1e-8)

    def test_dimension_limit_nonradial(self):
        pm = cf.make_point_mass([1.0, 0.0, 0.0, 0.0])
        with pytest.raises(DomainError):
            me.absolute_moment(pm, 0.5)

    def test_tail_mode_requirements(self):
        spec_env = QuadratureSpec(tail_mode="analytic-bound")
        spec_osc = QuadratureSpec(tail_mode="oscillatory-ibp")
        g = cf.make_gaussian(1.0, 1)
        rng = np.random.default_rng(3)
        e = cf.make_empirical(rng.normal(size=20))
        assert me.absolute_moment(g, 0.5, spec_env).value == pytest.approx(
            me.absolute_moment(g, 0.5).value, rel=1e-9
        )
        assert me.absolute_moment(e, 0.5, spec_osc).value == pytest.approx(
            me.absolute_moment(e, 0.5).value, rel=1e-9
        )
        with pytest.raises(DomainError):
            me.absolute_moment(g, 0.5, spec_osc)
        with pytest.raises(DomainError):
            me.absolute_moment(e, 0.5, spec_env)

    def test_exact_method_requires_oracle(self):
        profile = cf.make_gaussian(1.0, 1)
        semi = cf.CharFn(
            dim=1, minus_one=profile.minus_one, is_radial=True, is_real=True,
            radial_minus_one=profile.radial_minus_one, envelope=profile.envelope,
        )
        with pytest.raises(DomainError):
            me.absolute_moment(semi, 0.5, method="exact")


class TestOracleAgreement:
    """Engine vs closed forms across the parameter grid."""

    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 1.5, 2.5, 3.0])
    def test_gaussian_grid(self, d, alpha):
        res = me.absolute_moment(cf.make_gaussian(1.0, d), alpha)
        assert res.value == pytest.approx(cfo.stable_moment(2.0, alpha, d), rel=1e-6)

    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("p", [0.7, 1.0, 1.5])
    def test_stable_grid(self, d, p):
        for frac in (0.4, 0.8):
            alpha = frac * p
            res = me.absolute_moment(cf.make_stable(p, 1.0, d), alpha)
            assert res.value == pytest.approx(cfo.stable_moment(p, alpha, d), rel=1e-6)

    @pytest.mark.parametrize(
        "p,beta,alpha",
        [(1.0, 1.0, 0.5), (1.5, 2.0, 0.9), (2.0, 1.5, 2.5), (0.8, 3.0, 0.5), (2.0, 1.0, 3.0)],
    )
    def test_linnik_grid(self, p, beta, alpha):
        res = me.absolute_moment(cf.make_linnik(p, beta, 1), alpha)
        assert res.value == pytest.approx(cfo.linnik_moment(p, beta, alpha, 1), rel=1e-6)

    def test_linnik_plane_and_space(self):
        for d in (2, 3):
            res = me.absolute_moment(cf.make_linnik(1.5, 2.0, d), 0.9)
            assert res.value == pytest.approx(cfo.linnik_moment(1.5, 2.0, 0.9, d), rel=1e-6)

    def test_schoenberg_mixture_engine(self):
        from cfmoments.measures import DiscreteMeasure

        nu = DiscreteMeasure(np.array([[0.5], [2.0]]), np.array([0.25, 0.75]))
        phi = cf.make_schoenberg(nu, 1.5, 2)
        res = me.absolute_moment(phi, 0.8)
        expected = cfo.schoenberg_moment([0.5, 2.0], [0.25, 0.75], 1.5, 0.8, 2)
        assert res.value == pytest.approx(expected, rel=1e-6)

    def test_schoenberg_with_origin_component(self):
        from cfmoments.measures import DiscreteMeasure

        # a zero mixing atom contributes a unit point mass at the origin
        nu = DiscreteMeasure(np.array([[0.0], [1.0]]), np.array([0.3, 0.7]))
        phi = cf.make_schoenberg(nu, 2.0, 1)
        assert phi.tail_limit == pytest.approx(0.3)
        res = me.absolute_moment(phi, 1.0)
        expected = 0.7 * cfo.stable_moment(2.0, 1.0, 1)
        assert res.value == pytest.approx(expected, rel=1e-6)

    def test_mixture_engine(self):
        mix = cf.make_mixture(
            [cf.make_gaussian(1.0, 1), cf.make_linnik(2.0, 1.0, 1)], [0.4, 0.6]
        )
        res = me.absolute_moment(mix, 1.3)
        expected = 0.4 * cfo.stable_moment(2.0, 1.3, 1) + 0.6 * cfo.linnik_moment(2.0, 1.0, 1.3)
        assert res.value == pytest.approx(expected, rel=1e-6)

    def test_scaled_stable(self):
        res = me.absolute_moment(cf.make_stable(1.5, 2.0, 2), 0.8)
        expected = cfo.stable_moment(1.5, 0.8, 2) * 2.0 ** (0.8 / 1.5)
        assert res.value == pytest.approx(expected, rel=1e-7)

    def test_near_edge_softer_tolerance(self):
        p = 0.7
        alpha = p - 0.05
        res = me.absolute_moment(cf.make_stable(p, 1.0, 1), alpha)
        assert res.value == pytest.approx(cfo.stable_moment(p, alpha, 1), rel=1e-4)


class TestFormulaeConsistency:
    @pytest.mark.parametrize("phi,k,alpha", [
        (cf.make_gaussian(1.0, 1), 1, 0.5),
        (cf.make_gaussian(1.0, 1), 3, 0.5),
        (cf.make_gaussian(1.0, 1), 3, 2.5),
        (cf.make_gaussian(0.5, 2), 3, 2.5),
        (cf.make_linnik(1.5, 2.0, 1), 1, 0.5),
        (cf.make_linnik(1.5, 2.0, 1), 3, 0.5),
        (cf.make_linnik(1.5, 2.0, 1), 3, 1.2),
    ], ids=["g-1-05", "g-3-05", "g-3-25", "g2d-3-25", "l-1-05", "l-3-05", "l-3-12"])
    def test_complex_real_coincidence(self, phi, k, alpha):
        # both formulas where both hypotheses hold (non-integer alpha < k)
        r13 = me.absolute_moment(phi, alpha, k=k, formula="M13")
        if alpha < k:
            r12 = me.absolute_moment(phi, alpha, k=k, formula="M12")
            assert r12.value == pytest.approx(r13.value, rel=1e-8)
        else:
            assert r13.value > 0.0

    def test_k_invariance(self):
        g = cf.make_gaussian(1.0, 2)
        r1 = me.absolute_moment(g, 0.5, k=1, formula="M13")
        r3 = me.absolute_moment(g, 0.5, k=3, formula="M13")
        assert r1.value == pytest.approx(r3.value, rel=1e-6)
        l = cf.make_linnik(2.0, 1.0, 1)
        r1 = me.absolute_moment(l, 1.3, k=1, formula="M13")
        r3 = me.absolute_moment(l, 1.3, k=3, formula="M13")
        assert r1.value == pytest.approx(r3.value, rel=1e-6)

    def test_scaling_law(self):
        g = cf.make_gaussian(1.0, 1)
        for c in (0.5, 2.0, 5.0):
            sc = cf.make_scaled(g, c)
            lhs = me.absolute_moment(sc, 0.7).value
            rhs = c**0.7 * me.absolute_moment(g, 0.7).value
            assert lhs == pytest.approx(rhs, rel=1e-8)

    @pytest.mark.parametrize("phi,top", [
        (cf.make_gaussian(1.0, 1), 3.5),
        (cf.make_linnik(2.0, 1.5, 1), 3.5),
    ], ids=["gaussian", "linnik"])
    def test_order_monotonicity(self, phi, top):
        orders = [0.3, 0.7, 1.3, 1.9, 2.7, top]
        vals = [me.absolute_moment(phi, a).value ** (1.0 / a) for a in orders]
        for lo, hi in zip(vals[:-1], vals[1:]):
            assert lo <= hi * (1.0 + 1e-9)

    def test_order_continuity(self):
        g = cf.make_gaussian(1.0, 1)
        base = me.absolute_moment(g, 1.5).value
        diffs = [
            abs(me.absolute_moment(g, 1.5 - eps).value - base)
            for eps in (1e-1, 1e-2, 1e-3)
        ]
        assert diffs[0] > diffs[1] > diffs[2]


class TestEvenOrder:
    def test_gaussian_variance(self):
        res = me.even_order_moment(cf.make_gaussian(1.0, 1), 2)
        assert res.value == pytest.approx(2.0, abs=1e-4)
        assert res.formula == "even-limit"

    def test_point_mass_square(self):
        res = me.even_order_moment(cf.make_point_mass([1.5]), 2)
        assert res.value == pytest.approx(2.25, rel=1e-6)

    def test_gaussian_fourth_order(self):
        res = me.even_order_moment(cf.make_gaussian(1.0, 1), 4)
        assert res.value == pytest.approx(12.0, rel=1e-3)

    def test_linnik_p2(self):
        res = me.even_order_moment(cf.make_linnik(2.0, 2.0, 1), 2)
        assert res.value == pytest.approx(cfo.linnik_moment(2.0, 2.0, 2.0), rel=1e-4)

    def test_validation(self):
        with pytest.raises(DomainError):
            me.even_order_moment(cf.make_gaussian(1.0, 1), 3)


class TestDivergenceDetection:
    def test_cauchy_above_order_one(self):
        with pytest.raises(DivergenceSuspectedError):
            me.absolute_moment(cf.make_stable(1.0, 1.0, 1), 1.5)

    def test_stable_at_its_exponent(self):
        with pytest.raises(DivergenceSuspectedError):
            me.absolute_moment(cf.make_stable(0.7, 1.0, 1), 0.71)

    def test_convolution_gains_no_order(self):
        conv = cf.make_product(cf.make_stable(1.0, 1.0, 1), cf.make_gaussian(1.0, 1))
        with pytest.raises(DivergenceSuspectedError):
            me.absolute_moment(conv, 1.5)


class TestRadialIntegral:
    def test_flat_profile_is_zero(self):
        val = me.radial_difference_integral(lambda r: np.ones_like(r), 2, 0.5)
        assert val == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("p,alpha", [(1.0, 0.5), (0.7, 0.4), (2.0, 1.3)])
    def test_first_difference_closed_form(self, p, alpha):
        got = me.radial_difference_integral(
            lambda r: np.exp(-(r**p)), 1, alpha,
            minus_one=lambda r: np.expm1(-(r**p)),
            envelope=lambda r: np.exp(-(np.asarray(r, dtype=float) ** p)),
        )
        expected = -gamma(1.0 - alpha / p) / alpha
        assert got == pytest.approx(expected, rel=1e-8)

    def test_gaussian_profile_k3_closed_form(self):
        alpha = 2.5
        got = me.radial_difference_integral(
            lambda r: np.exp(-(r**2)), 3, alpha,
            minus_one=lambda r: np.expm1(-(r**2)),
            envelope=lambda r: np.exp(-(np.asarray(r, dtype=float) ** 2)),
        )
        expected = -math.pi * power_difference_sum(3, alpha) / (
            2.0 * math.sin(math.pi * alpha / 2.0) * gamma(1.0 + alpha / 2.0)
        )
        assert got == pytest.approx(expected, rel=1e-8)

    def test_plain_profile_without_helpers(self):
        got = me.radial_difference_integral(lambda r: np.exp(-(r**2)), 1, 0.5)
        assert got == pytest.approx(-gamma(0.75) / 0.5, rel=1e-7)


class TestFulldimIntegral:
    def test_radial_agreement(self):
        g = cf.make_gaussian(1.0, 2)
        full, err, diag = me.fulldim_difference_integral(g, 1, 0.5)
        problem = me._assemble_problem(g, 1, 0.5, QuadratureSpec(), real_part=True)
        radial, rerr, _ = me._difference_integral(problem, 1, 0.5, QuadratureSpec())
        assert full.real == pytest.approx(problem.angular * radial.real, rel=1e-9)
        assert abs(full.imag) <= 1e-9 * (1.0 + abs(full.real))

    def test_empirical_plane(self):
        rng = np.random.default_rng(77)
        xs = rng.normal(size=(10, 2))
        e = cf.make_empirical(xs)
        res = me.absolute_moment(e, 0.5, k=1)
        brute = float(np.mean(np.sqrt((xs**2).sum(1)) ** 0.5))
        assert res.value == pytest.approx(brute, rel=1e-2)

    def test_empirical_plane_with_small_radius_atom(self):
        # an atom close to the origin forces the Bessel tail bridge
        xs = np.array([[0.04, 0.03], [1.2, -0.5], [-2.0, 0.7], [0.6, 1.4]])
        e = cf.make_empirical(xs)
        res = me.absolute_moment(e, 0.8)
        brute = float(np.mean(np.sqrt((xs**2).sum(1)) ** 0.8))
        assert res.value == pytest.approx(brute, rel=3e-3)

    def test_shifted_gaussian_vs_monte_carlo(self):
        sg = cf.make_product(cf.make_gaussian(1.0, 2), cf.make_point_mass([1.0, 0.0]))
        res = me.absolute_moment(sg, 0.5, k=1, formula="M12")
        rng = np.random.default_rng(4242)
        pts = rng.normal(scale=math.sqrt(2.0), size=(1_000_000, 2)) + np.array([1.0, 0.0])
        vals = np.sqrt((pts**2).sum(1)) ** 0.5
        est, se = float(vals.mean()), float(vals.std() / math.sqrt(len(vals)))
        assert abs(res.value - est) < 3.0 * se
