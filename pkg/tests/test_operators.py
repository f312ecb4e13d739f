"""Tests for sparse operators, commutator forms, maximal operators, norms."""

import numpy as np
import pytest

from besselweights.dyadic import (
    DyadicCube,
    canonical_major_subsets,
    zero_chain,
)
from besselweights.errors import PreconditionError
from besselweights.measure import BesselMeasure, FuncExpr, Interval
from besselweights.operators import (
    cube_average,
    dyadic_maximal,
    dyadic_maximal_profile,
    inner_product_mu,
    lp_norm,
    operator_norm_lower_bound,
    oscillation_expansion_sides,
    oscillation_stopping_tree,
    sparse_apply,
    sparse_commutator_apply,
    sparse_layer_mass_bound,
)
from besselweights.orlicz import llogl
from besselweights.weights import Weight

M1 = BesselMeasure(1.0)
M0 = BesselMeasure(1e-9)


def family_of(cubes, m):
    return canonical_major_subsets(cubes, m)


class TestSparseApply:
    def test_indicator_of_own_cube(self):
        Q = DyadicCube(0, 0)
        S = family_of([Q], M1)
        out = sparse_apply(S, FuncExpr.indicator(Q.interval), M1)
        assert out(0.5) == pytest.approx(1.0, rel=1e-13)
        assert out(1.5) == 0.0

    def test_constant_preserved(self):
        Q = DyadicCube(0, 0)
        S = family_of([Q], M1)
        out = sparse_apply(S, FuncExpr.constant(3.0), M1)
        assert out(0.25) == pytest.approx(3.0, rel=1e-13)

    def test_two_cube_stack(self):
        # S = {[0,1), [0,1/2)}, f = chi_[0,1/2), Lebesgue: 1/2 + 1 = 3/2 on [0,1/2)
        S = family_of(zero_chain([0, 1]), M0)
        out = sparse_apply(S, FuncExpr.indicator(Interval(0, 0.5)), M0)
        assert out(0.25) == pytest.approx(1.5, rel=1e-7)
        assert out(0.75) == pytest.approx(0.5, rel=1e-7)

    def test_positivity_monotonicity(self):
        rng = np.random.default_rng(2)
        S = family_of(zero_chain([0, 1, 2]) + [DyadicCube(2, 1)], M1)
        breaks = [0.0, 0.25, 0.5, 1.0]
        for _ in range(20):
            fv = rng.uniform(0, 2, size=3)
            gv = fv + rng.uniform(0, 1, size=3)
            f = FuncExpr.piecewise_constant(breaks, list(fv))
            g = FuncExpr.piecewise_constant(breaks, list(gv))
            Tf = sparse_apply(S, f, M1)
            Tg = sparse_apply(S, g, M1)
            for x in (0.1, 0.3, 0.6, 0.9):
                assert Tf(x) <= Tg(x) + 1e-12

    def test_self_adjoint_wrt_mu(self):
        rng = np.random.default_rng(3)
        S = family_of(zero_chain([0, 2]) + [DyadicCube(1, 1)], M1)
        breaks = [0.0, 0.3, 0.7, 1.0]
        B = Interval(1e-12, 2.0)
        for _ in range(25):
            f = FuncExpr.piecewise_constant(breaks, list(rng.uniform(0, 2, 3)))
            g = FuncExpr.piecewise_constant(breaks, list(rng.uniform(0, 2, 3)))
            lhs = inner_product_mu(sparse_apply(S, f, M1), g, M1, B)
            rhs = inner_product_mu(f, sparse_apply(S, g, M1), M1, B)
            assert lhs == pytest.approx(rhs, rel=1e-10)


class TestCommutator:
    def test_constant_symbol_vanishes(self):
        S = family_of(zero_chain([0, 1]), M1)
        b = FuncExpr.constant(5.0)
        f = FuncExpr.indicator(Interval(0, 1))
        for variant in ("left", "adjoint"):
            out = sparse_commutator_apply(S, b, f, M1, variant)
            for x in (0.1, 0.4, 0.8):
                assert abs(out(x)) < 1e-12

    def test_left_variant_explicit(self):
        Q = DyadicCube(0, 0)
        S = family_of([Q], M1)
        b = FuncExpr.log_of_mu_density(1.0)  # 2 log x
        f = FuncExpr.indicator(Q.interval)
        out = sparse_commutator_apply(S, b, f, M1, "left")
        bq = cube_average(b, Q, M1)
        for x in (0.15, 0.5, 0.9):
            assert out(x) == pytest.approx(abs(b(x) - bq), rel=1e-9)

    def test_adjoint_duality(self):
        rng = np.random.default_rng(7)
        S = family_of(zero_chain([0, 1, 3]), M1)
        b = FuncExpr.log_of_mu_density(1.0)
        breaks = [0.0, 0.2, 0.6, 1.0]
        B = Interval(1e-15, 1.0)
        for _ in range(10):
            f = FuncExpr.piecewise_constant(breaks, list(rng.uniform(0, 2, 3)))
            g = FuncExpr.piecewise_constant(breaks, list(rng.uniform(0, 2, 3)))
            lhs = inner_product_mu(sparse_commutator_apply(S, b, f, M1, "left"), g, M1, B)
            rhs = inner_product_mu(f, sparse_commutator_apply(S, b, g, M1, "adjoint"), M1, B)
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_shift_invariance_in_b(self):
        S = family_of(zero_chain([0, 2]), M1)
        b = FuncExpr.log_of_mu_density(1.0)
        f = FuncExpr.indicator(Interval(0.0, 0.5))
        out1 = sparse_commutator_apply(S, b, f, M1, "left")
        out2 = sparse_commutator_apply(S, b + 3.7, f, M1, "left")
        for x in (0.05, 0.3, 0.9):
            assert out1(x) == pytest.approx(out2(x), rel=1e-10, abs=1e-12)

    def test_positive_homogeneity_in_b(self):
        S = family_of(zero_chain([0, 2]), M1)
        b = FuncExpr.log_of_mu_density(1.0)
        f = FuncExpr.indicator(Interval(0.0, 0.5))
        base = sparse_commutator_apply(S, b, f, M1, "left")
        doubled = sparse_commutator_apply(S, b * 2.0, f, M1, "left")
        for x in (0.05, 0.3, 0.9):
            assert doubled(x) == pytest.approx(2.0 * base(x), rel=1e-10, abs=1e-12)


class TestDyadicMaximal:
    def test_constant_function(self):
        grid = zero_chain([0, 1, 2]) + [DyadicCube(1, 1), DyadicCube(2, 1)]
        val = dyadic_maximal(FuncExpr.constant(2.5), Weight.one(), grid, 0.3)
        assert val == pytest.approx(2.5, rel=1e-12)

    def test_reference_two_cube_value(self):
        grid = [DyadicCube(0, 0), DyadicCube(1, 0), DyadicCube(1, 1)]
        f = FuncExpr.indicator(Interval(0.0, 0.5))
        val = dyadic_maximal(f, Weight.one(), grid, 0.75)
        assert val == pytest.approx(0.5, rel=1e-12)

    def test_lp_bound_universal(self):
        # ||M^D_sigma f||_{L^p(sigma dx)} <= p' ||f||_{L^p(sigma dx)}
        rng = np.random.default_rng(11)
        grid = []
        for j in range(0, 5):
            grid += [DyadicCube(j, k) for k in range(2**j)]
        for trial in range(10):
            p = float(rng.uniform(1.3, 3.5))
            pprime = p / (p - 1)
            sigma = Weight.power(float(rng.uniform(-0.5, 2.0)))
            breaks = sorted(set([0.0, 1.0] + list(rng.uniform(0.01, 0.99, size=5))))
            vals = list(rng.uniform(0, 3, size=len(breaks) - 1))
            f = FuncExpr.piecewise_constant(breaks, vals)
            prof = dyadic_maximal_profile(f, sigma, grid)
            lhs = lp_norm(prof, p, sigma, Interval(1e-12, 1.0))
            rhs = pprime * lp_norm(f, p, sigma, Interval(1e-12, 1.0))
            assert lhs <= rhs * (1 + 1e-9)


class TestNormEstimate:
    def test_identity_operator(self):
        w = Weight.one()
        witnesses = [FuncExpr.indicator(Interval(0, 1)), FuncExpr.power(1.0, 0.5).restrict(Interval(0, 1))]
        est = operator_norm_lower_bound(lambda f: f, 2.0, w, witnesses, Interval(1e-12, 1.0))
        assert est.value == pytest.approx(1.0, rel=1e-10)

    def test_single_cube_projection(self):
        Q = DyadicCube(0, 0)
        S = family_of([Q], M1)
        w = Weight.one()
        est = operator_norm_lower_bound(
            lambda f: sparse_apply(S, f, M1),
            2.0,
            w,
            [FuncExpr.indicator(Q.interval)],
            Interval(1e-12, 1.0),
        )
        assert est.value == pytest.approx(1.0, rel=1e-10)

    def test_estimate_recomputable(self):
        Q = DyadicCube(0, 0)
        S = family_of([Q], M1)
        w = Weight.power(0.5)
        T = lambda f: sparse_apply(S, f, M1)
        est = operator_norm_lower_bound(
            T, 2.0, w,
            [FuncExpr.indicator(Interval(0.0, 0.5)), FuncExpr.indicator(Q.interval)],
            Interval(0.0, 1.0),
        )
        assert est.recompute(T, Interval(0.0, 1.0)) == pytest.approx(est.value, rel=1e-12)

    def test_zero_witnesses_raise(self):
        with pytest.raises(PreconditionError):
            operator_norm_lower_bound(
                lambda f: f, 2.0, Weight.one(), [FuncExpr.zero()], Interval(1e-12, 1.0)
            )

    def test_holder_split_of_major_subsets(self):
        # mu(E)^{p-1} <= w(E)^{(p-1)/p} sigma_*(E)^{(p-1)/p'} for random powers
        rng = np.random.default_rng(13)
        from besselweights.weights import dual_weight

        for _ in range(60):
            lam = float(rng.uniform(0.3, 1.5))
            m = BesselMeasure(lam)
            p = float(rng.uniform(1.3, 3.0))
            alpha = float(rng.uniform(-0.8, 1.8))
            w = Weight.power(alpha)
            pair = dual_weight(w, p, lam)
            a = float(10.0 ** rng.uniform(-2, 0.5))
            E = Interval(a, a * float(rng.uniform(1.2, 4.0)))
            muE = m.mu(E)
            wE = w.mass(E)
            sE = pair.sigma_star.mass(E)
            pprime = p / (p - 1)
            lhs = muE ** (p - 1)
            rhs = wE ** ((p - 1) / p) * sE ** ((p - 1) / pprime)
            assert lhs <= rhs * (1 + 1e-10)


class TestLayeredMassBound:
    def _banded_family(self, k, psi, m):
        # spaced zero-chain: mu-ratio per step 8^2 = 64 -> eta = 63/64 >= 31/32
        cubes = zero_chain([0, 2, 4, 6, 8])
        S = canonical_major_subsets(cubes, m)
        assert S.eta >= 1.0 - 1.0 / (2.0 * psi.gamma_doubling) - 1e-12
        # constant on [0,1) puts every cube in band k exactly
        c = 4.0**-k * psi.inverse(1.0)
        f = FuncExpr.indicator(Interval(0.0, 1.0), c)
        return S, f

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_bound_holds_and_is_informative(self, k):
        psi = llogl(1.0)  # gamma = 16
        phi = llogl(1.0)
        S, f = self._banded_family(k, psi, M1)
        from besselweights.dyadic import level_sets

        bands, overflow = level_sets(S.cubes, f, psi, M1)
        assert not overflow and set(bands) == {k} and len(bands[k]) == len(S.cubes)
        w = Weight.power(2.0 * M1.lam)  # w = mu-density
        E = [Interval(0.0, 2.0**-8)]  # inside the deepest cube: lhs = 5 w(E)
        lhs, rhs, parts = sparse_layer_mass_bound(S, f, psi, phi, w, E, M1, k)
        assert lhs == pytest.approx(len(S.cubes) * w.mass(E[0]), rel=1e-12)
        assert lhs <= rhs * (1 + 1e-9)
        # informative: the bottom term does real work when 2^k < len(S)
        if 2.0**k < len(S.cubes):
            assert rhs - parts["bottom_term"] < lhs

    def test_bound_with_unit_weight(self):
        psi = phi = llogl(1.0)
        k = 2
        S, f = self._banded_family(k, psi, M1)
        w = Weight.one()
        E = [Interval(0.0, 2.0**-9), Interval(0.5, 0.75)]
        lhs, rhs, _ = sparse_layer_mass_bound(S, f, psi, phi, w, E, M1, k)
        assert lhs <= rhs * (1 + 1e-9)


class TestOscillationExpansion:
    def test_pointwise_domination_with_single_constant(self):
        b = FuncExpr.log_of_mu_density(1.0)
        root = DyadicCube(0, 0)
        tree = oscillation_stopping_tree(b, root, M1, max_level=10)
        # expansion over the full chain tree under root to depth 10
        from besselweights.dyadic import build_grid

        expansion = build_grid(root.interval, 0, 10)
        xs = list(np.geomspace(2.0**-10, 0.999, 120))
        rows = oscillation_expansion_sides(b, root, expansion, M1, xs)
        cs = [lhs / rhs for _, lhs, rhs in rows if rhs > 0]
        assert max(cs) < 4.0  # single constant c works across the sample grid
        assert tree  # stopping tree exists (trivial for this tame symbol)


class TestVmoTailMechanism:
    def test_adjoint_commutator_dominated_by_oscillation_level(self):
        # for a symbol with small oscillation at small scales, the adjoint
        # commutator form over a family of small cubes is pointwise dominated
        # by (calibrated c) * eps * A_S(A*_tree |f|), with eps the largest
        # cube oscillation of the symbol; calibrate on one instance and
        # assert on a second (deeper) instance
        import numpy as np
        from besselweights.dyadic import build_grid

        b = FuncExpr.power(1.0, 0.5)  # sqrt: vanishing small-scale oscillation
        f = FuncExpr.indicator(Interval(0.25, 1.0))

        def sides(min_level, max_level):
            cubes = [Q for Q in build_grid(Interval(0.25, 1.0), min_level, min_level)]
            S = canonical_major_subsets(cubes, M1)
            tree = build_grid(Interval(0.25, 1.0), min_level, max_level)
            S_tree = canonical_major_subsets(tree, M1)
            lhs = sparse_commutator_apply(S, b, f, M1, "adjoint")
            from besselweights.operators import sparse_apply

            inner = sparse_apply(S_tree, f, M1)  # A*_tree|f| = A_tree f for f >= 0
            rhs = sparse_apply(S, inner, M1)
            eps = max(
                M1.average(
                    (b - cube_average(b, Q, M1)).restrict(Q.interval).abs(), Q.interval
                )
                for Q in S_tree.cubes
            )
            xs = np.linspace(0.26, 0.99, 60)
            ratios = [
                lhs(float(x)) / (eps * rhs(float(x)))
                for x in xs
                if rhs(float(x)) > 0 and lhs(float(x)) > 0
            ]
            return max(ratios)

        c_cal = sides(4, 6) * 1.25
        assert sides(5, 7) <= c_cal


class TestBandedCubeMechanism:
    def test_major_subset_mass_lower_bound(self):
        # the mechanism behind the layered bound: on a norm-banded cube the
        # major subset already carries unit psi-mass after the 4^k rescale,
        # (2 gamma / mu(Q)) int_{E_Q} psi(4^k |f|) dmu >= 1
        from besselweights.measure import dmu
        from besselweights.orlicz import llogl

        psi = llogl(1.0)
        gamma = psi.gamma_doubling
        m = M1
        for k in (1, 2, 3):
            cubes = zero_chain([0, 2, 4, 6, 8])
            S = canonical_major_subsets(cubes, m)
            c = 4.0**-k * psi.inverse(1.0)
            f = FuncExpr.indicator(Interval(0.0, 1.0), c)
            for Q in S.cubes:
                mass = 0.0
                for iv in S.major_subsets[Q]:
                    val = psi(4.0**k * c)
                    mass += val * m.mu(iv)
                lhs = 2.0 * gamma * mass / m.mu(Q.interval)
                assert lhs >= 1.0 - 1e-9
