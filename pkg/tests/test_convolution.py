"""Convolution moments, the difference product rule, and the order bound."""

import math

import numpy as np
import pytest

from cfmoments import charfn as cf
from cfmoments import closed_forms as cfo
from cfmoments import convolution as cv
from cfmoments.errors import DivergenceSuspectedError
from cfmoments.moment_engine import absolute_moment


class TestLeibnizRule:
    def test_constant_factor_collapses(self):
        g = cf.make_gaussian(1.0, 1)
        one = cf.make_point_mass([0.0])
        for k in (1, 2, 3):
            xi = 0.9
            lhs = cv.leibniz_difference(g, one, xi, k)
            rhs = cf.iterated_difference(g, xi, k)
            assert abs(lhs - rhs) < 1e-14

    def test_gaussian_pair_direct(self):
        g1, g2 = cf.make_gaussian(1.0, 1), cf.make_gaussian(2.0, 1)
        xi, k = 0.7, 3
        lhs = cv.leibniz_difference(g1, g2, xi, k)
        g3 = cf.make_gaussian(3.0, 1)
        rhs = cf.iterated_difference(g3, xi, k)
        assert abs(lhs - rhs) < 1e-13

    def test_point_mass_pair(self):
        pa, pb = cf.make_point_mass([0.8]), cf.make_point_mass([0.4])
        xi, k = 1.1, 2
        lhs = cv.leibniz_difference(pa, pb, xi, k)
        expected = (np.exp(-1j * xi * 1.2) - 1.0) ** k
        assert abs(lhs - expected) < 1e-14

    def test_identity_across_orders_and_increments(self):
        rng = np.random.default_rng(31)
        pairs = [
            (cf.make_gaussian(1.0, 1), cf.make_stable(1.0, 1.0, 1)),
            (cf.make_linnik(1.5, 1.0, 1), cf.make_gaussian(0.5, 1)),
            (cf.make_empirical(rng.normal(size=6)), cf.make_point_mass([1.3])),
            (cf.make_gaussian(1.0, 2), cf.make_point_mass([0.5, -0.2])),
        ]
        for phi, psi in pairs:
            prod = cf.make_product(phi, psi)
            for k in range(1, 6):
                xi = rng.uniform(0.2, 1.5, size=phi.dim)
                lhs = cv.leibniz_difference(phi, psi, xi, k)
                rhs = cf.iterated_difference(prod, xi, k)
                assert abs(lhs - rhs) < 1e-12, (phi.label, psi.label, k)


class TestConvolutionMoment:
    def test_gaussian_pair_closed_form(self):
        got = cv.convolution_moment(cf.make_gaussian(1.0, 1), cf.make_gaussian(1.0, 1), 1.0)
        expected = cfo.stable_moment(2.0, 1.0, 1) * 2.0**0.5
        assert got.value == pytest.approx(expected, rel=1e-8)
        assert expected == pytest.approx(2.0 * math.sqrt(2.0 / math.pi), rel=1e-14)

    def test_empirical_pair_sum_oracle(self):
        rng = np.random.default_rng(9)
        xs, ys = rng.normal(size=20), rng.normal(size=20)
        got = cv.convolution_moment(cf.make_empirical(xs), cf.make_empirical(ys), 0.7)
        brute = float(np.mean([abs(a + b) ** 0.7 for a in xs for b in ys]))
        assert got.value == pytest.approx(brute, rel=1e-3)

    def test_identity_element(self):
        g = cf.make_gaussian(1.0, 1)
        delta = cf.make_point_mass([0.0])
        got = cv.convolution_moment(g, delta, 0.7)
        alone = absolute_moment(g, 0.7)
        assert got.value == pytest.approx(alone.value, rel=1e-10)

    def test_order_ceiling_not_improved(self):
        with pytest.raises(DivergenceSuspectedError):
            cv.convolution_moment(cf.make_stable(1.0, 1.0, 1), cf.make_gaussian(1.0, 1), 1.5)


class TestBoundReport:
    def test_gaussian_cauchy(self):
        rep = cv.convolution_bound_report(
            cf.make_gaussian(1.0, 1), cf.make_stable(1.0, 1.0, 1), 2.0, 0.5
        )
        assert rep.gamma == 0.5
        assert math.isfinite(rep.ratio) and rep.ratio > 0.0

    def test_point_mass_pair_triangle(self):
        rep = cv.convolution_bound_report(
            cf.make_point_mass([1.0]), cf.make_point_mass([0.7]), 0.8, 0.8
        )
        assert rep.lhs == pytest.approx(1.7**0.8, rel=1e-8)
        assert rep.ratio <= 2.0

    def test_scale_invariant_ratio(self):
        ratios = []
        for c in (0.5, 1.0, 3.0):
            g = cf.make_scaled(cf.make_gaussian(1.0, 1), c)
            rep = cv.convolution_bound_report(g, g, 0.9, 0.9)
            ratios.append(rep.ratio)
        assert max(ratios) - min(ratios) < 1e-6

    def test_ratio_stability_across_families(self):
        rng = np.random.default_rng(515)
        families = [
            lambda: cf.make_gaussian(float(rng.uniform(0.5, 2.0)), 1),
            lambda: cf.make_linnik(2.0, float(rng.uniform(0.5, 3.0)), 1),
            lambda: cf.make_empirical(rng.normal(size=12)),
        ]
        ratios = []
        for _ in range(10):
            for mk in families:
                phi, psi = mk(), mk()
                for a, b in [(0.5, 0.9), (0.9, 1.5), (0.5, 0.5)]:
                    rep = cv.convolution_bound_report(phi, psi, a, b)
                    ratios.append(rep.ratio)
        assert len(ratios) >= 30
        assert max(ratios) <= 4.0  # empirical cap, recorded for regression
