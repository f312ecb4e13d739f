"""Tests for BMO flavors, medians, rearrangements, and oscillation machinery."""

import math

import numpy as np
import pytest

from besselweights.bmo import (
    bmo_median_norm,
    bmo_triangle_norm,
    john_nirenberg_profile,
    local_mean_oscillation,
    log_mu_oscillation_endpoint_form,
    median,
    median_oscillation,
    median_stability_check,
    p_oscillation,
    quantile_threshold,
    rearrangement,
    superlevel_measure,
    superlevel_set,
    triangle_oscillation,
    vmo_defect,
    weighted_bmo_norm,
)
from besselweights.measure import BesselMeasure, FuncExpr, Interval
from besselweights.weights import IntervalFamily, TildeAp, Weight, weight_constant

M1 = BesselMeasure(1.0)
M0 = BesselMeasure(1e-9)
LOGB = FuncExpr.log_of_mu_density(1.0)  # 2 log x


def small_family(seed=0):
    return IntervalFamily.standard(5, seed=seed, n_random=20)


class TestSuperlevel:
    def test_indicator_sets(self):
        f = FuncExpr.indicator(Interval(0.25, 0.5), 2.0)
        s = superlevel_set(f, 1.0, Interval(0, 1))
        assert len(s) == 1
        assert (s[0].a, s[0].b) == (0.25, 0.5)

    def test_log_threshold(self):
        B = Interval(0.5, 4.0)
        s = superlevel_set(LOGB, 0.0, B)  # {2 log x > 0} = (1, 4)
        assert len(s) == 1
        assert s[0].a == pytest.approx(1.0, rel=1e-9)
        assert s[0].b == pytest.approx(4.0)

    def test_measure_exact(self):
        B = Interval(0.5, 4.0)
        val = superlevel_measure(LOGB, 0.0, B, M1)
        assert val == pytest.approx(M1.mu(Interval(1.0, 4.0)), rel=1e-9)


class TestMedian:
    def test_constant_symbol(self):
        assert median(FuncExpr.constant(3.3), Interval(1, 2), M1) == pytest.approx(3.3)

    def test_monotone_measure_bisection(self):
        # b strictly increasing, ref = dmu, lam=1, B=(1,3): b at m = 14^{1/3}
        val = median(LOGB, Interval(1, 3), M1)
        expected = 2.0 * math.log(14.0 ** (1.0 / 3.0))
        assert val == pytest.approx(expected, rel=1e-9)

    def test_indicator_infimum_convention(self):
        b = FuncExpr.indicator(Interval(0.0, 0.5))
        assert median(b, Interval(0, 1), M0) == pytest.approx(0.0, abs=1e-12)

    def test_postconditions_random(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            vals = list(rng.uniform(-2, 2, size=4))
            b = FuncExpr.piecewise_constant([0.1, 0.5, 1.0, 2.0, 3.0], vals)
            B = Interval(0.1, 3.0)
            alpha = median(b, B, M1)  # asserts its own post-conditions
            assert math.isfinite(alpha)


class TestTriangleNorm:
    def test_constant_is_zero(self):
        rep = bmo_triangle_norm(FuncExpr.constant(2.0), M1, small_family())
        assert rep.norm_estimate == pytest.approx(0.0, abs=1e-12)

    def test_log_endpoint_closed_form(self):
        # the right-endpoint-centered absolute integral matches the closed form
        rng = np.random.default_rng(8)
        for lam in (0.5, 1.0, 2.0):
            m = BesselMeasure(lam)
            b = FuncExpr.log_of_mu_density(lam)
            for _ in range(25):
                a = float(10.0 ** rng.uniform(-4, 1))
                bb = a * float(10.0 ** rng.uniform(0.05, 1.5))
                B = Interval(a, bb)
                center = b(bb * (1 - 1e-16)) if False else 2.0 * lam * math.log(bb)
                dev = (b - center).restrict(B).abs()
                from besselweights.measure import dmu

                val = dev.integrate(B, dmu(m))
                assert val == pytest.approx(
                    log_mu_oscillation_endpoint_form(lam, B), rel=1e-12
                )

    def test_log_zero_based_interval_closed_form(self):
        B = Interval(0.0, 1.0)
        from besselweights.measure import dmu

        dev = (LOGB - 0.0).restrict(B).abs()
        val = dev.integrate(B, dmu(M1))
        assert val == pytest.approx(log_mu_oscillation_endpoint_form(1.0, B), rel=1e-12)

    def test_log_norm_finite_over_families(self):
        rep = bmo_triangle_norm(LOGB, M1, IntervalFamily.standard(10, seed=2))
        assert math.isfinite(rep.norm_estimate)
        assert rep.norm_estimate > 0.1

    def test_linear_symbol_unbounded(self):
        b = FuncExpr.power(1.0, 1.0)
        fam_small = IntervalFamily(
            "growing", tuple(Interval(0.0, 2.0**j) for j in range(4))
        )
        fam_big = IntervalFamily(
            "growing", tuple(Interval(0.0, 2.0**j) for j in range(12))
        )
        r1 = bmo_triangle_norm(b, M1, fam_small)
        r2 = bmo_triangle_norm(b, M1, fam_big)
        assert r2.norm_estimate > 8 * r1.norm_estimate


class TestWeightedNorm:
    def test_constant_zero(self):
        rep = weighted_bmo_norm(FuncExpr.constant(1.0), Weight.one(), 2.0, M1, small_family())
        assert rep.norm_estimate == pytest.approx(0.0, abs=1e-10)

    def test_sawtooth_hand_value(self):
        # w = 1, p = 1, Lebesgue-like: plain mean oscillation of a step
        b = FuncExpr.piecewise_constant([0.0, 0.5, 1.0], [0.0, 1.0])
        B = Interval(0, 1)
        val = p_oscillation(b, Weight.one(), 1.0, M0, B)
        assert val == pytest.approx(0.5, rel=1e-7)

    def test_embedding_forward_direction(self):
        # triangle-BMO controls weighted p-BMO for in-class power weights
        fam = small_family(3)
        w = Weight.power(1.0)
        for p in (1.0, 2.0):
            rep_w = weighted_bmo_norm(LOGB, w, p, M1, fam)
            rep_t = bmo_triangle_norm(LOGB, M1, fam)
            assert rep_w.norm_estimate <= 25.0 * rep_t.norm_estimate

    def test_embedding_reverse_per_interval(self):
        # (1/mu(B)) int |b-b_B| dmu <= [w]^{1/p} ((1/w(B)) int |b-b_B|^p w dx)^{1/p}
        lam, p = 1.0, 2.0
        m = BesselMeasure(lam)
        w = Weight.power(1.5)
        fam = small_family(9)
        tag = TildeAp(p, lam - 0.5)
        cw = weight_constant(w, tag, IntervalFamily.standard(10, seed=1))
        assert not cw.divergent
        for B in fam.intervals[:40]:
            lhs = triangle_oscillation(LOGB, m, B)
            rhs = cw.value ** (1.0 / p) * p_oscillation(LOGB, w, p, m, B)
            assert lhs <= rhs * (1 + 1e-9)


class TestMedianNorm:
    def test_constant_zero(self):
        assert median_oscillation(FuncExpr.constant(5.0), Weight.one(), 0.5, Interval(0, 1)) == 0.0

    def test_indicator_half_split(self):
        b = FuncExpr.indicator(Interval(0.0, 0.5))
        val = median_oscillation(b, Weight.one(), 0.5, Interval(0, 1))
        assert val == pytest.approx(0.0, abs=1e-12)

    def test_chebyshev_one_sided_bound(self):
        # s^{1/p} * median_quantity(B) <= p_oscillation(B) per interval
        rng = np.random.default_rng(12)
        w = Weight.one()
        for _ in range(60):
            vals = list(rng.uniform(-1, 3, size=4))
            b = FuncExpr.piecewise_constant([0.2, 0.7, 1.3, 2.0, 2.8], vals)
            B = Interval(0.2, 2.8)
            p = float(rng.uniform(1.0, 3.0))
            s = float(rng.uniform(0.05, 0.5))
            med = median_oscillation(b, w, s, B)
            posc = p_oscillation(b, w, p, M1, B)
            assert s ** (1.0 / p) * med <= posc * (1 + 1e-9)

    def test_report_flavor(self):
        rep = bmo_median_norm(LOGB, Weight.one(), 0.25, IntervalFamily.random(20, seed=5))
        assert "median" in rep.flavor
        assert math.isfinite(rep.norm_estimate)


class TestRearrangement:
    def test_scaled_indicator(self):
        c, E = 2.5, Interval(0.5, 1.0)
        b = FuncExpr.indicator(E, c)
        w = Weight.one()
        wE = w.mass(E)
        assert rearrangement(b, w, wE * 0.5) == pytest.approx(c, rel=1e-10)
        assert rearrangement(b, w, wE * 0.999) == pytest.approx(c, rel=1e-10)
        assert rearrangement(b, w, wE * 1.001) == pytest.approx(0.0, abs=1e-9)

    def test_zero_function(self):
        assert rearrangement(FuncExpr.zero(), Weight.one(), 0.3) == 0.0

    def test_nonincreasing_in_t(self):
        rng = np.random.default_rng(3)
        b = FuncExpr.piecewise_constant([0.1, 0.4, 0.9, 1.5], [1.0, 3.0, 0.5])
        w = Weight.power(0.5)
        ts = np.linspace(0.01, 2.0, 25)
        vals = [rearrangement(b, w, float(t)) for t in ts]
        assert all(v2 <= v1 + 1e-12 for v1, v2 in zip(vals, vals[1:]))

    def test_equimeasurability(self):
        b = FuncExpr.piecewise_constant([0.1, 0.4, 0.9, 1.5], [1.0, 3.0, 0.5])
        w = Weight.one()
        H = Interval(0.1, 1.5)
        for gamma in (0.25, 0.75, 1.5, 2.9):
            wmass = superlevel_measure(b.restrict(H).abs(), gamma, H, w)
            # Lebesgue measure of {s : b*(s) > gamma}
            ss = np.linspace(1e-4, w.mass(H), 600)
            star = [rearrangement(b, w, float(s)) for s in ss]
            leb = float(np.sum(np.array(star) > gamma) * (ss[1] - ss[0]))
            assert leb == pytest.approx(wmass, abs=1.5e-2)


class TestLocalMeanOscillation:
    def test_constant(self):
        a_check, a_med = local_mean_oscillation(
            FuncExpr.constant(1.0), Interval(0.5, 1.0), 0.5, Weight.one()
        )
        assert a_check == pytest.approx(0.0, abs=1e-12)
        assert a_med == pytest.approx(0.0, abs=1e-12)

    def test_indicator_regression(self):
        b = FuncExpr.indicator(Interval(0.0, 0.5))
        a_check, a_med = local_mean_oscillation(b, Interval(0, 1), 0.5, Weight.one())
        # brute-force oracle over a dense c grid
        w = Weight.one()
        B = Interval(0, 1)
        t_arg = 0.5 * w.mass(B)
        brute = min(
            rearrangement((b - float(c)).restrict(B), w, t_arg, hull=B)
            for c in np.linspace(-0.5, 1.5, 501)
        )
        assert a_check == pytest.approx(brute, abs=1e-9)
        assert a_check <= a_med <= 2 * a_check + 1e-12

    def test_sandwich_on_seeded_suite(self):
        rng = np.random.default_rng(21)
        w = Weight.one()
        for _ in range(200):
            vals = list(rng.uniform(-2, 2, size=3))
            b = FuncExpr.piecewise_constant([0.2, 0.8, 1.4, 2.2], vals)
            B = Interval(0.2, 2.2)
            lam_frac = float(rng.uniform(0.05, 0.5))  # the sandwich needs <= 1/2
            a_check, a_med = local_mean_oscillation(b, B, lam_frac, w)
            assert a_check <= a_med * (1 + 1e-9)
            assert a_med <= 2 * a_check * (1 + 1e-9) + 1e-12


class TestMedianStability:
    def test_constant_lhs_zero(self):
        lhs, _ = median_stability_check(
            FuncExpr.constant(2.0), Interval(0.5, 1.0), 0.1, 0.5, Weight.one()
        )
        assert lhs == pytest.approx(0.0, abs=1e-12)

    def test_monotone_continuity(self):
        lhs_small, _ = median_stability_check(LOGB, Interval(1, 2), 0.001, 0.5, Weight.one())
        lhs_big, _ = median_stability_check(LOGB, Interval(1, 2), 0.2, 0.5, Weight.one())
        assert lhs_small < lhs_big

    def test_continuous_symbol_at_half(self):
        # for continuous monotone symbols the bound holds even at fraction 1/2
        rng = np.random.default_rng(41)
        for _ in range(50):
            a = float(10.0 ** rng.uniform(-2, 1))
            B = Interval(a, a * float(rng.uniform(1.5, 6.0)))
            eps = float(rng.uniform(0.01, 0.3))
            lhs, rhs = median_stability_check(LOGB, B, eps, 0.5, Weight.one())
            assert lhs <= rhs * (1 + 1e-9) + 1e-12

    def test_inequality_seeded(self):
        rng = np.random.default_rng(31)
        w = Weight.one()
        for _ in range(200):
            vals = list(rng.uniform(-1, 1, size=3))
            b = FuncExpr.piecewise_constant([0.2, 0.8, 1.4, 2.2], vals)
            B = Interval(0.2, 2.2)
            eps = float(rng.uniform(0.01, 0.4))
            # valid hypothesis range: the mass fraction must stay below (1-eps)/2
            lam_frac = (1.0 - eps) / 2.0 - 1e-9
            lhs, rhs = median_stability_check(b, B, eps, lam_frac, w)
            assert lhs <= rhs * (1 + 1e-9) + 1e-12


class TestVmoProfileAndJN:
    def test_constant_defects_vanish(self):
        d = vmo_defect(FuncExpr.constant(1.0), M1, [0.1, 1.0, 4.0], [2.0, 8.0])
        assert all(v == pytest.approx(0.0, abs=1e-12) for v in d.small_scale.values())
        assert all(v == pytest.approx(0.0, abs=1e-12) for v in d.far_field.values())

    def test_log_small_scale_defect_persists(self):
        # oscillation of log x^{2 lam} on (0, r) is scale-invariant and positive
        vals = [
            triangle_oscillation(LOGB, M1, Interval(0.0, r)) for r in (1.0, 0.1, 0.01)
        ]
        assert all(v == pytest.approx(vals[0], rel=1e-9) for v in vals)
        assert vals[0] > 0.3  # regression anchor for the lam = 1 constant

    def test_bump_defects_decay(self):
        bump = FuncExpr.indicator(Interval(1.0, 2.0))
        d = vmo_defect(bump, M1, [4.0, 16.0, 64.0], [4.0, 16.0, 64.0])
        ls = [d.large_scale[r] for r in (4.0, 16.0, 64.0)]
        assert ls[0] >= ls[1] >= ls[2]
        fars = [d.far_field[a] for a in (4.0, 16.0, 64.0)]
        assert fars[0] >= fars[1] >= fars[2]

    def test_jn_profile_decays_exponentially(self):
        rows = john_nirenberg_profile(LOGB, Interval(0.0, 1.0), M1, list(np.linspace(0.5, 6.0, 12)))
        fracs = [f for _, f in rows]
        assert all(f2 <= f1 + 1e-12 for f1, f2 in zip(fracs, fracs[1:]))
        # log-linear fit slope is negative and steep enough relative to the norm
        gs = np.array([g for g, f in rows if f > 0])
        ln = np.array([math.log(f) for _, f in rows if f > 0])
        slope = np.polyfit(gs, ln, 1)[0]
        norm = bmo_triangle_norm(LOGB, M1, small_family()).norm_estimate
        assert slope < 0
        assert abs(slope) >= 0.2 / norm

    def test_quantile_threshold_exactness(self):
        b = FuncExpr.piecewise_constant([0.0, 0.25, 0.5, 1.0], [3.0, 1.0, 0.0])
        w = Weight.one()
        B = Interval(0, 1)
        # |b - 0| > t tails: t=0 -> mass 0.5; target s=0.5: t=0 qualifies
        assert quantile_threshold(b, 0.0, B, w, 0.5) == pytest.approx(0.0)
        # s = 0.3: need tail <= 0.3: t = 1 gives {3} mass .25 <= .3
        assert quantile_threshold(b, 0.0, B, w, 0.3) == pytest.approx(1.0)


class TestExponentialIntegrability:
    def test_exp_gauge_of_centered_symbol_controlled_by_norm(self):
        # Luxemburg gauge at the exponential scale of b - b_B is bounded by a
        # fixed multiple of the triangle norm, uniformly over intervals
        from besselweights.orlicz import exp_m1, luxemburg_norm

        b = LOGB
        fam = IntervalFamily.random(25, seed=9, lo_exp=-3.0, hi_exp=1.0)
        norm = bmo_triangle_norm(b, M1, IntervalFamily.standard(10, seed=9)).norm_estimate
        worst = 0.0
        for B in fam.intervals:
            val = luxemburg_norm((b - M1.average(b, B)).restrict(B), exp_m1(), B, M1)
            worst = max(worst, val / norm)
        assert worst <= 12.0  # recorded constant for the exponential gauge

    def test_small_parameter_exponential_means_bounded(self):
        # (1/mu(B)) int exp(s |b - b_B|) dmu stays uniformly bounded for small s
        from besselweights.measure import integrate_callable, dmu

        b = LOGB
        fam = IntervalFamily.random(20, seed=10, lo_exp=-3.0, hi_exp=1.0)
        norm = bmo_triangle_norm(b, M1, IntervalFamily.standard(10, seed=10)).norm_estimate
        s = 0.25 / norm
        sup = 0.0
        for B in fam.intervals:
            dev = (b - M1.average(b, B)).restrict(B).abs()
            val = integrate_callable(
                lambda x: math.exp(s * dev(x)), B, dmu(M1), points=dev.breakpoints(),
                rel_tol=1e-8,
            ) / M1.mu(B)
            sup = max(sup, val)
        assert sup <= 4.0  # recorded uniform constant at this s
