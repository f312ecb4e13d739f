"""Failure of the weak (1,1) bound for the Riesz commutator.

The symbol b0 = log x^{2 lam} has finite triangle-BMO norm (verified here
against a closed form to 1e-12), yet the commutator against an atom near the
origin has tail profile g(x) = eps^{2 lam} x^{-(2 lam + 1)} log(x/eps), for
which the weak-type product

    massProduct(t) = t * mu({x > x0 : g(x) > t})

grows without bound as t -> 0.  The growth is logarithmic: the identity
t * X_t^{2 lam + 1} = eps^{2 lam} log(X_t / eps) forces per-decade increments
that are additive, so per-decade ratios decay toward 1.

The shipped strict gate demands a multiplicative >= 1.5 per decade across the
whole window [1e-10, 1e-2]; the logarithmic growth mechanics above make that
unattainable for any (lam, eps), so that check reports FAIL by design and the
actual divergence is certified by the monotone-growth and slope-anchor
checks.  A bounded smooth symbol is run as contrast: its product plateaus,
so the divergence detection is not vacuous.
"""

from __future__ import annotations

import math
import os

import numpy as np

from ..bmo import bmo_triangle_norm, log_mu_oscillation_endpoint_form
from ..measure import BesselMeasure, FuncExpr, Interval, dmu
from ..riesz import RieszKernelEvaluator, counterexample_g, counterexample_profile
from ..weights import IntervalFamily
from .config import ScenarioConfig
from .csvio import write_csv
from .verdict import Verdict


def run_counterexample(cfg: ScenarioConfig) -> Verdict:
    verdict = Verdict(cfg.name)
    lams = cfg.get_floats("lams", "0.5 1.0")
    eps = cfg.get_float("eps", 1e-3)
    t_lo_exp = cfg.get_int("t_low_exponent", -10)
    t_hi_exp = cfg.get_int("t_high_exponent", -2)
    gate = cfg.tol("per_decade_gate", 1.5)
    growth_gate = cfg.tol("total_growth_gate", 1.5)

    for lam in lams:
        ts = [10.0**k for k in range(t_hi_exp, t_lo_exp - 1, -1)]
        rows = counterexample_profile(lam, eps, ts)
        mps = [mp for _, mp in rows]
        ratios = []
        for m1, m2 in zip(mps, mps[1:]):
            ratios.append(m2 / m1 if m1 > 0 else math.inf if m2 > 0 else math.nan)
        # strict per-decade gate over the whole window (fails by design:
        # the product is logarithmic in 1/t, see module docstring)
        finite_ratios = [r for r in ratios if not math.isnan(r)]
        gate_ok = all(r >= gate for r in finite_ratios)
        worst = min(finite_ratios) if finite_ratios else math.nan
        verdict.add(
            f"strict per-decade gate lam={lam:g}",
            worst,
            gate,
            gate_ok,
            relation=">=",
            note="multiplicative growth >= gate on every decade of the window; "
            "logarithmic tail growth cannot sustain this (expected FAIL)",
        )
        nonzero = [mp for mp in mps if mp > 0]
        increasing = all(m2 > m1 for m1, m2 in zip(nonzero, nonzero[1:]))
        total = nonzero[-1] / nonzero[0] if nonzero else 0.0
        verdict.add(
            f"divergence without bound lam={lam:g}",
            total,
            growth_gate,
            increasing and total >= growth_gate,
            relation=">=",
            note="product strictly increasing on the nonzero tail with total "
            "growth past the gate (the honest content of the failure of "
            "weak (1,1))",
        )
        # analytic slope anchor: t * X_t^{2 lam + 1} gains eps^{2 lam} per e-fold
        g, x0 = counterexample_g(lam, eps)
        m = BesselMeasure(lam)
        anchors = []
        for t in (1e-7, 1e-9, 1e-11):
            hi = x0
            while g(hi) > t:
                hi *= 2.0
            lo = hi / 2.0
            for _ in range(200):
                mid = math.sqrt(lo * hi)
                if g(mid) > t:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-14 * hi:
                    break
            X = 0.5 * (lo + hi)
            anchors.append((t * X ** (2 * lam + 1), math.log(X)))
        slopes = [
            (p2 - p1) / (l2 - l1)
            for (p1, l1), (p2, l2) in zip(anchors, anchors[1:])
        ]
        slope_err = max(abs(s / eps ** (2 * lam) - 1.0) for s in slopes)
        verdict.add(
            f"log-slope anchor lam={lam:g}",
            slope_err,
            1e-6,
            slope_err <= 1e-6,
            note="t X_t^{2lam+1} gains eps^{2lam} per e-fold of X",
        )
        # the same symbol is in triangle-BMO: closed-form check to 1e-12
        b = FuncExpr.log_of_mu_density(lam)
        mm = BesselMeasure(lam)
        rng = np.random.default_rng(cfg.seed)
        worst_rel = 0.0
        for _ in range(50):
            a = float(10.0 ** rng.uniform(-4, 1))
            bb = a * float(10.0 ** rng.uniform(0.05, 1.5))
            B = Interval(a, bb)
            center = 2.0 * lam * math.log(bb)
            val = (b - center).restrict(B).abs().integrate(B, dmu(mm))
            ref = log_mu_oscillation_endpoint_form(lam, B)
            worst_rel = max(worst_rel, abs(val - ref) / abs(ref))
        norm = bmo_triangle_norm(b, mm, IntervalFamily.standard(10, seed=cfg.seed))
        verdict.add(
            f"symbol oscillation closed form lam={lam:g}",
            worst_rel,
            1e-12,
            worst_rel <= 1e-12,
            note="endpoint-centred absolute oscillation integral vs closed form",
        )
        verdict.add(
            f"symbol BMO-finite lam={lam:g}",
            norm.norm_estimate,
            float("inf"),
            math.isfinite(norm.norm_estimate) and norm.norm_estimate > 0,
            relation="finite",
            note="log x^{2 lam} has finite triangle oscillation norm",
        )
        path = write_csv(
            os.path.join(cfg.out_dir, f"counterexample_lam{lam:g}.csv"),
            [
                f"scenario={cfg.name} seed={cfg.seed} lam={lam:g} eps={eps:g}",
                "check: massProduct(t) = t * mu({x > x0 : g(x) > t}) diverges as "
                "t -> 0; growth is logarithmic (additive per decade)",
            ],
            ["t", "mass_product", "ratio_vs_previous_decade"],
            [
                (t, mp, ratios[i - 1] if i > 0 else math.nan)
                for i, (t, mp) in enumerate(rows)
            ],
        )
        verdict.artifacts.append(path)

    # contrast: a bounded smooth symbol yields a bounded product
    lam_c = lams[0]
    ev = RieszKernelEvaluator(lam_c)
    m = BesselMeasure(lam_c)
    atom = Interval(eps, 2 * eps)
    f = FuncExpr.indicator(atom, 1.0 / m.mu(atom))
    b_bounded = FuncExpr.constant(1.0) - FuncExpr.power(1.0, -1.0)
    g0, x0 = counterexample_g(lam_c, eps)
    xs = np.geomspace(max(4 * eps, x0), 1e4, 48)
    prof = [(float(x), abs(ev.commutator_apply(b_bounded, f, float(x)))) for x in xs]
    # thresholds inside the sampled value range so exceedance sets stay in-grid
    v_tail = prof[-1][1]
    products = []
    for t in [v_tail * 10.0**j for j in range(1, 7)]:
        above = [x for x, v in prof if v > t]
        if above:
            products.append(t * m.mu(Interval(min(above), max(above))))
    plateau = max(products) / min(products) if len(products) >= 2 else 1.0
    verdict.add(
        "bounded-symbol contrast plateaus",
        plateau,
        2.0,
        0.0 < plateau <= 2.0,
        note="with a bounded smooth symbol the product stays within a fixed "
        "band, so the divergence detection is not vacuous",
    )
    return verdict
