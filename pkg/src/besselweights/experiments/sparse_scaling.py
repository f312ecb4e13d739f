"""Sparse-operator norm growth against the weight constant.

Power weights t^alpha approach the lower class boundary alpha -> -1; at each
sweep point the weight constant [w] is estimated over the standard interval
family, and an operator-norm lower bound for the sparse operator on a
boundary-stressing zero-based chain is measured from a witness family (cube
indicators, the dual-density direction t^{-alpha}, zero-based plateaus, and
seeded random steps).  The chain depth grows like 1/delta with the distance
delta to the boundary so the lower bound can follow the constant.

Pass criteria: the log-log slope of estimate vs [w] stays at most
max(1, 1/(p-1)) + slack, and the per-point ratio estimate / [w]^exponent is
bounded by one constant calibrated on the first sweep points.
"""

from __future__ import annotations

import math
import os

import numpy as np

from ..dyadic import canonical_major_subsets, zero_chain
from ..measure import BesselMeasure, FuncExpr, Interval
from ..operators import operator_norm_lower_bound, sparse_apply
from ..weights import IntervalFamily, TildeAp, Weight, weight_constant
from .config import ScenarioConfig
from .csvio import write_csv
from .verdict import Verdict


def boundary_weights(cfg: ScenarioConfig) -> list[float]:
    return cfg.get_floats("deltas", "0.4 0.2 0.1 0.05 0.025")


def chain_family(delta: float, depth_growth: float, depth_cap: int, m: BesselMeasure):
    depth = min(depth_cap, max(10, int(math.ceil(depth_growth / delta))))
    cubes = zero_chain(list(range(depth)))
    return canonical_major_subsets(cubes, m)


def witness_functions(alpha: float, depth: int, seed: int) -> list[FuncExpr]:
    rng = np.random.default_rng(seed)
    out = [FuncExpr.indicator(Interval(0.0, 1.0))]
    out.append(FuncExpr.power(1.0, -alpha).restrict(Interval(0.0, 1.0)))
    for j in (depth // 2, depth - 1):
        out.append(FuncExpr.indicator(Interval(0.0, 2.0**-j)))
    for _ in range(3):
        breaks = [0.0] + sorted(10.0 ** rng.uniform(-6, 0, size=4)) + [1.0]
        vals = list(rng.uniform(0.0, 2.0, size=len(breaks) - 1))
        out.append(FuncExpr.piecewise_constant(breaks, vals))
    return out


def _load_replay_family(path: str):
    from ..dyadic import SparseFamily

    with open(path, "r", encoding="utf-8") as fh:
        return SparseFamily.from_lines(fh)


def measure_sweep(cfg: ScenarioConfig, p: float, lam: float, apply_op):
    """(rows, slope, ratios, families) for one exponent sweep at fixed p."""
    m = BesselMeasure(lam)
    c = lam - 0.5
    exponent = max(1.0, 1.0 / (p - 1.0))
    depth_growth = cfg.get_float("depth_growth", 2.0)
    depth_cap = cfg.get_int("depth_cap", 120)
    fam_depth = cfg.get_int("family_depth", 25)
    replay = cfg.params.get("sparse_file")
    rows, logw, logn, families = [], [], [], []
    for delta in boundary_weights(cfg):
        alpha = -1.0 + delta
        w = Weight.power(alpha)
        wc = weight_constant(
            w, TildeAp(p, c), IntervalFamily.standard(fam_depth, seed=cfg.seed)
        )
        S = (
            _load_replay_family(replay)
            if replay
            else chain_family(delta, depth_growth, depth_cap, m)
        )
        families.append(S)
        depth = len(S.cubes)
        witnesses = witness_functions(alpha, depth, cfg.seed)
        est = operator_norm_lower_bound(
            lambda f: apply_op(S, f, m), p, w, witnesses, Interval(0.0, 2.0)
        )
        rows.append((p, alpha, delta, depth, S.eta, wc.value, est.value,
                     est.value / wc.value**exponent))
        logw.append(math.log(wc.value))
        logn.append(math.log(est.value))
    slope = float(np.polyfit(logw, logn, 1)[0])
    ratios = [r[-1] for r in rows]
    return rows, slope, ratios, families


def run_sparse_scaling(cfg: ScenarioConfig, apply_op=sparse_apply, budget_factor: float = 1.0,
                       label: str = "sparse operator") -> Verdict:
    verdict = Verdict(cfg.name)
    lam = cfg.get_float("lam", 1.0)
    ps = cfg.get_floats("ps", "1.5 2 3")
    slack = cfg.tol("slope_slack", 0.1)
    calib_margin = cfg.tol("ratio_margin", 1.25)
    calib_count = cfg.get_int("calibration_points", 2)

    all_rows = []
    deepest = None
    for p in ps:
        exponent = budget_factor * max(1.0, 1.0 / (p - 1.0))
        rows, slope, raw_ratios, families = measure_sweep(cfg, p, lam, apply_op)
        for S in families:
            if deepest is None or len(S.cubes) > len(deepest.cubes):
                deepest = S
        ratios = [est / wc**exponent for (_, _, _, _, _, wc, est, _) in rows]
        all_rows += [r[:-1] + (ratios[i],) for i, r in enumerate(rows)]
        budget = exponent + slack
        verdict.add(
            f"{label} slope p={p:g}",
            slope,
            budget,
            slope <= budget,
            note=f"log-log slope of norm lower bound vs [w]; budget {budget_factor:g}*max(1,1/(p-1))+{slack:g}",
        )
        c_cal = calib_margin * max(ratios[:calib_count])
        verdict.add(
            f"{label} single-constant ratio p={p:g}",
            max(ratios),
            c_cal,
            max(ratios) <= c_cal,
            note="estimate/[w]^exponent bounded by the constant calibrated on the first sweep points",
        )
    slug = label.replace(" ", "_").replace("(", "_").replace(")", "")
    path = write_csv(
        os.path.join(cfg.out_dir, f"{cfg.name}_{slug}_lam{lam:g}.csv"),
        [
            f"scenario={cfg.name} seed={cfg.seed} lam={lam:g}",
            f"check: {label} norm lower bound <= C * [w]^({budget_factor:g}*max(1,1/(p-1))) "
            "for the modified class at parameter lam-1/2",
        ],
        ["p", "alpha", "delta", "chain_depth", "eta", "weight_constant",
         "norm_lower_bound", "ratio_to_envelope"],
        all_rows,
    )
    verdict.artifacts.append(path)
    if deepest is not None:
        os.makedirs(cfg.out_dir, exist_ok=True)
        fam_path = os.path.join(cfg.out_dir, f"{cfg.name}_{slug}_lam{lam:g}.sparse")
        with open(fam_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(deepest.to_lines()) + "\n")
        verdict.artifacts.append(fam_path)
    return verdict
