"""Commutator-form sparse operators against the squared-envelope bound.

The protocol of the plain sparse sweep is reused with the oscillation symbol
b = log x^{2 lam}, for both the left form (oscillation outside the average)
and its mu-adjoint, with the slope budget doubled:

    norm lower bound <= C * ||b|| * [w]^{2 max(1, 1/(p-1))}.

Two structural facts are pinned exactly: a constant symbol annihilates both
forms, and b -> 2b doubles every measured norm (positive homogeneity of the
oscillation factor).
"""

from __future__ import annotations

import os

from ..bmo import bmo_triangle_norm
from ..dyadic import canonical_major_subsets, zero_chain
from ..measure import BesselMeasure, FuncExpr, Interval
from ..operators import lp_norm, sparse_commutator_apply
from ..weights import IntervalFamily, Weight
from .config import ScenarioConfig
from .sparse_scaling import run_sparse_scaling
from .verdict import Verdict


def run_commutator_bound(cfg: ScenarioConfig) -> Verdict:
    lam = cfg.get_float("lam", 1.0)
    b = FuncExpr.log_of_mu_density(lam)
    m = BesselMeasure(lam)

    def left(S, f, mm):
        return sparse_commutator_apply(S, b, f, mm, "left")

    def adjoint(S, f, mm):
        return sparse_commutator_apply(S, b, f, mm, "adjoint")

    verdict = Verdict(cfg.name)
    for variant, op in (("left", left), ("adjoint", adjoint)):
        sub = run_sparse_scaling(
            cfg, apply_op=op, budget_factor=2.0, label=f"commutator({variant})"
        )
        verdict.checks += sub.checks
        verdict.artifacts += sub.artifacts

    # structural checks on a fixed instance
    S = canonical_major_subsets(zero_chain(list(range(8))), m)
    f = FuncExpr.indicator(Interval(0.0, 1.0))
    w = Weight.power(0.5)
    dom = Interval(0.0, 2.0)
    p = 2.0
    zero_out = sparse_commutator_apply(S, FuncExpr.constant(3.0), f, m, "left")
    verdict.add(
        "constant symbol annihilates",
        lp_norm(zero_out, p, w, dom) if not zero_out.is_zero() else 0.0,
        1e-12,
        (zero_out.is_zero() or lp_norm(zero_out, p, w, dom) <= 1e-12),
        note="|b - b_Q| = 0 for constant b",
    )
    base = lp_norm(sparse_commutator_apply(S, b, f, m, "left"), p, w, dom)
    doubled = lp_norm(sparse_commutator_apply(S, b * 2.0, f, m, "left"), p, w, dom)
    verdict.add(
        "positive homogeneity in the symbol",
        abs(doubled - 2.0 * base) / (2.0 * base),
        1e-9,
        abs(doubled - 2.0 * base) <= 1e-9 * 2.0 * base,
        note="scaling b -> 2b doubles the measured norm exactly",
    )
    norm_b = bmo_triangle_norm(b, m, IntervalFamily.standard(10, seed=cfg.seed)).norm_estimate
    verdict.add(
        "oscillation-norm prefactor recorded",
        norm_b,
        float("inf"),
        norm_b > 0.0,
        relation="finite",
        note="estimates scale linearly in the symbol's oscillation norm",
    )
    return verdict
