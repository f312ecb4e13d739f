"""Sparse operators, their commutator forms, and dyadic maximal operators.

The sparse operator attached to a cube family S averages against dmu and
resums indicators:

    (A_S f)(x)   = sum_{Q in S} <f>_{mu,Q} chi_Q(x),

and, for a symbol b, the commutator-type forms put the oscillation factor
|b - b_Q| outside or inside the average:

    (A_{S,b} f)(x)  = sum_Q <f>_{mu,Q} |b(x) - b_Q| chi_Q(x),
    (A*_{S,b} f)(x) = sum_Q (1/mu(Q)) int_Q |b - b_Q| f dmu  chi_Q(x),

where b_Q is the mu-average of b on Q.  A_S output is exactly piecewise
constant on the cube-endpoint arrangement; the commutator outputs stay inside
the piecewise power-log family whenever b does (|b - b_Q| splits at its sign
changes), so all norms below are computed without sampling error.

Operator norms on L^p(w dx) are not computable; `operator_norm_lower_bound`
reports the exact Rayleigh quotient of the best witness, a certified lower
bound, which is the right direction for comparing against the theoretical
upper envelopes in the experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .dyadic import DyadicCube, SparseFamily
from .errors import PreconditionError, ZeroMassError
from .measure import DX, BesselMeasure, FuncExpr, Interval, dmu
from .orlicz import (
    YoungFunction,
    complementary,
    orlicz_maximal_profile,
)
from .weights import Weight

__all__ = [
    "cube_average",
    "sparse_apply",
    "sparse_commutator_apply",
    "dyadic_maximal",
    "dyadic_maximal_profile",
    "lp_norm",
    "OperatorNormEstimate",
    "operator_norm_lower_bound",
    "inner_product_mu",
    "sparse_layer_mass_bound",
    "oscillation_stopping_tree",
    "oscillation_expansion_sides",
]


def cube_average(f: FuncExpr, Q: DyadicCube, m: BesselMeasure) -> float:
    """<f>_{mu,Q}; exact."""
    return f.integrate(Q.interval, dmu(m)) / m.mu(Q.interval)


def _arrangement_cells(cubes: Sequence[DyadicCube]) -> list[Interval]:
    pts = sorted({p for Q in cubes for p in (Q.interval.a, Q.interval.b)})
    return [Interval(lo, hi) for lo, hi in zip(pts, pts[1:])]


def sparse_apply(S: SparseFamily, f: FuncExpr, m: BesselMeasure) -> FuncExpr:
    """A_S f as an exactly piecewise-constant function."""
    if not S.cubes:
        return FuncExpr.zero()
    avgs = [(Q, cube_average(f, Q, m)) for Q in S.cubes]
    cells = _arrangement_cells(S.cubes)
    breaks = [cells[0].a] + [c.b for c in cells]
    vals = []
    for cell in cells:
        mid = cell.midpoint
        vals.append(sum(a for Q, a in avgs if Q.contains_point(mid)))
    return FuncExpr.piecewise_constant(breaks, vals)


def sparse_commutator_apply(
    S: SparseFamily,
    b: FuncExpr,
    f: FuncExpr,
    m: BesselMeasure,
    variant: str = "left",
) -> FuncExpr:
    """A_{S,b} f (variant='left') or its mu-adjoint A*_{S,b} f (variant='adjoint').

    Exact within the function family: |b - b_Q| is split at its sign changes.
    """
    if variant not in ("left", "adjoint"):
        raise ValueError("variant must be 'left' or 'adjoint'")
    out = FuncExpr.zero()
    for Q in S.cubes:
        iv = Q.interval
        bq = cube_average(b, Q, m)
        osc = (b - FuncExpr.constant(bq)).restrict(iv).abs()
        if variant == "left":
            coef = cube_average(f, Q, m)
            if coef != 0.0:
                out = out + osc * coef
        else:
            coef = (osc * f).integrate(iv, dmu(m)) / m.mu(iv)
            if coef != 0.0:
                out = out + FuncExpr.indicator(iv, coef)
    return out


def inner_product_mu(f: FuncExpr, g: FuncExpr, m: BesselMeasure, B: Interval) -> float:
    """<f, g>_mu over B, exact for family members."""
    return (f * g).integrate(B, dmu(m))


# -- weighted dyadic maximal ------------------------------------------------------


def dyadic_maximal(
    f: FuncExpr, sigma: Weight, grid: Sequence[DyadicCube], x: float
) -> float:
    """max over grid cubes containing x of sigma-averages of |f| (sigma dx)."""
    best = None
    for Q in grid:
        if not Q.contains_point(x):
            continue
        mass = sigma.mass(Q.interval)
        if mass <= 0.0:
            raise ZeroMassError(f"sigma has zero mass on {Q}")
        val = (f.restrict(Q.interval).abs() * sigma.expr).integrate(Q.interval, DX) / mass
        best = val if best is None else max(best, val)
    if best is None:
        raise PreconditionError(f"no grid cube contains x={x:g}")
    return best


def dyadic_maximal_profile(
    f: FuncExpr, sigma: Weight, grid: Sequence[DyadicCube]
) -> FuncExpr:
    """The grid maximal function as a piecewise-constant profile."""
    vals_per_cube = []
    for Q in grid:
        mass = sigma.mass(Q.interval)
        if mass <= 0.0:
            raise ZeroMassError(f"sigma has zero mass on {Q}")
        vals_per_cube.append(
            (Q, (f.restrict(Q.interval).abs() * sigma.expr).integrate(Q.interval, DX) / mass)
        )
    cells = _arrangement_cells(grid)
    breaks = [cells[0].a] + [c.b for c in cells]
    out = []
    for cell in cells:
        mid = cell.midpoint
        covering = [v for Q, v in vals_per_cube if Q.contains_point(mid)]
        out.append(max(covering) if covering else 0.0)
    return FuncExpr.piecewise_constant(breaks, out)


# -- norms and norm estimates -------------------------------------------------------


def lp_norm(f: FuncExpr, p: float, w: Weight, domain: Interval | None = None) -> float:
    """||f||_{L^p(w dx)}; the domain defaults to the support of f."""
    B = domain or f.support_bounds()
    if B is None:
        return 0.0
    return f.lp_integral(p, w.expr, B) ** (1.0 / p)


@dataclass(frozen=True)
class OperatorNormEstimate:
    """Certified lower bound ||T f*||/||f*|| with the witness stored."""

    value: float
    test_function: FuncExpr
    p: float
    weight: Weight
    method: str

    def recompute(self, T: Callable[[FuncExpr], FuncExpr], domain: Interval) -> float:
        return lp_norm(T(self.test_function), self.p, self.weight, domain) / lp_norm(
            self.test_function, self.p, self.weight, domain
        )


def operator_norm_lower_bound(
    T: Callable[[FuncExpr], FuncExpr],
    p: float,
    w: Weight,
    witnesses: Sequence[FuncExpr],
    domain: Interval,
    method: str = "witness-family",
) -> OperatorNormEstimate:
    """max over witnesses of ||T f||_{L^p(w dx)} / ||f||_{L^p(w dx)}."""
    best, best_f = -math.inf, None
    for f in witnesses:
        nf = lp_norm(f, p, w, domain)
        if nf <= 0.0:
            continue
        ratio = lp_norm(T(f), p, w, domain) / nf
        if ratio > best:
            best, best_f = ratio, f
    if best_f is None:
        raise PreconditionError("all witnesses have zero norm in L^p(w dx)")
    return OperatorNormEstimate(best, best_f, p, w, method)


# -- layered mass bound for banded sparse families -----------------------------------


def sparse_layer_mass_bound(
    S: SparseFamily,
    f: FuncExpr,
    psi: YoungFunction,
    phi: YoungFunction,
    w: Weight,
    E: Sequence[Interval],
    m: BesselMeasure,
    k: int,
    maximal_intervals: Sequence[Interval] | None = None,
) -> tuple[float, float, dict]:
    """Both sides of the layered mass bound for a norm-banded sparse family.

    lhs = sum_{Q in S} w(E ∩ Q)          (w against dx)
    rhs = 2^k w(E)
          + (4 gamma_psi / phibar^{-1}((2 gamma_psi)^{2^k}))
            * int psi(4^k |f|) M_phi(w/mu) dmu

    The maximal operator is taken over `maximal_intervals` (defaults to the
    family's own cubes), which keeps the bound valid: the argument only needs
    M_phi(w/mu) >= ||w/mu||_{phi,Q} on each family cube Q.
    """
    if psi.gamma_doubling is None:
        raise PreconditionError("psi needs a declared doubling constant")
    gamma = psi.gamma_doubling
    lhs = 0.0
    for Q in S.cubes:
        for e_iv in E:
            inter = e_iv.intersect(Q.interval)
            if inter is not None:
                lhs += w.mass(inter)
    wE = sum(w.mass(e_iv) for e_iv in E)
    bar = complementary(phi)
    denom = bar.inverse((2.0 * gamma) ** (2.0**k))
    h = w.expr * FuncExpr.power(1.0, -2.0 * m.lam)  # the density w/mu
    fam = list(maximal_intervals) if maximal_intervals is not None else S.intervals()
    profile = orlicz_maximal_profile(h, phi, fam, m)
    f_abs = f.restrict(_hull(S, f)).abs()
    psi_of_f = _apply_young_piecewise(psi, f_abs, 4.0**k)
    integral = (psi_of_f * profile).integrate(_hull(S, f), dmu(m))
    rhs2 = 4.0 * gamma / denom * integral
    return lhs, 2.0**k * wE + rhs2, {
        "w(E)": wE,
        "denominator": denom,
        "integral": integral,
        "bottom_term": rhs2,
    }


def _hull(S: SparseFamily, f: FuncExpr) -> Interval:
    pts = [Q.interval.a for Q in S.cubes] + [Q.interval.b for Q in S.cubes]
    sb = f.support_bounds()
    if sb is not None:
        pts += [sb.a, sb.b]
    return Interval(min(pts), max(pts))


def _apply_young_piecewise(psi: YoungFunction, f_abs: FuncExpr, scale: float) -> FuncExpr:
    """psi(scale * f) for piecewise-constant nonnegative f, exactly."""
    if not f_abs.is_piecewise_constant():
        raise PreconditionError("banded mass bound expects piecewise-constant test data")
    breaks, vals = [], []
    for p in f_abs.pieces:
        if not breaks:
            breaks.append(p.lo)
        elif p.lo > breaks[-1]:
            vals.append(0.0)
            breaks.append(p.lo)
        vals.append(psi(scale * p.atoms[0][0]))
        breaks.append(p.hi)
    if not breaks:
        return FuncExpr.zero()
    return FuncExpr.piecewise_constant(breaks, vals)


# -- oscillation expansion over a stopping tree ---------------------------------------


def oscillation_stopping_tree(
    b: FuncExpr,
    root: DyadicCube,
    m: BesselMeasure,
    max_level: int,
    factor: float = 2.0,
) -> list[DyadicCube]:
    """Stopping cubes for the oscillation of b under root.

    Starting from the root, a descendant P stops when the mu-average of
    |b - b_R| over P exceeds factor * C0 times its average over the current
    stopping ancestor R (C0 the parent/child measure-ratio bound); stopping
    cubes re-anchor the recursion.  Every chain from the root into the tree is
    included implicitly by expanding non-stopping children.
    """
    c0 = 2.0 ** (2.0 * m.lam + 1.0)
    out = [root]
    stack = [root]
    while stack:
        R = stack.pop()
        bR = cube_average(b, R, m)
        oscR = m.average((b - FuncExpr.constant(bR)).restrict(R.interval).abs(), R.interval)
        if oscR <= 0.0:
            continue
        frontier = list(R.children())
        while frontier:
            P = frontier.pop()
            if P.level > max_level:
                continue
            oscP = m.average(
                (b - FuncExpr.constant(bR)).restrict(P.interval).abs(), P.interval
            )
            if oscP > factor * c0 * oscR:
                out.append(P)
                stack.append(P)
            else:
                if P.level < max_level:
                    frontier.extend(P.children())
    return sorted(set(out))


def oscillation_expansion_sides(
    b: FuncExpr,
    Q: DyadicCube,
    expansion_cubes: Sequence[DyadicCube],
    m: BesselMeasure,
    xs: Sequence[float],
) -> list[tuple[float, float, float]]:
    """(x, |b(x)-b_Q|, sum over expansion cubes P containing x of <|b-b_P|>_P)."""
    bq = cube_average(b, Q, m)
    oscs = []
    for P in expansion_cubes:
        if Q.contains(P):
            bp = cube_average(b, P, m)
            avg = m.average(
                (b - FuncExpr.constant(bp)).restrict(P.interval).abs(), P.interval
            )
            oscs.append((P, avg))
    rows = []
    for x in xs:
        if not Q.contains_point(x):
            continue
        lhs = abs(b(x) - bq)
        rhs = sum(avg for P, avg in oscs if P.contains_point(x))
        rows.append((x, lhs, rhs))
    return rows
