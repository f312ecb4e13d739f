"""Muckenhoupt-type weight classes on the half-line.

Two per-interval products drive everything.  For a class parameter c (so the
reference measure is nu_c = x^{2c+1} dx) and 1 < p < infty:

    modified class:   (1/nu_c(B) int_B w dt) *
                      (1/nu_c(B) int_B t^{(2c+1)p'} w^{-1/(p-1)} dt)^{p-1}

    classical class:  (1/mu(B) int_B w dmu) *
                      (1/mu(B) int_B w^{-1/(p-1)} dmu)^{p-1}

The modified class mixes Lebesgue averages of w with a power-twisted dual
average; its p = 1 member compares w(B)/nu_c(B) against the pointwise density
ratio w(x)/x^{2c+1}.

True weight constants are suprema over all intervals and are not computable;
`weight_constant` reports the exact maximum over an explicit interval family,
hence a certified lower bound.  For power weights t^alpha membership is
decidable anyway: the per-interval product is scale-invariant, the families
include zero-based intervals, and out-of-class exponents make one factor
integral diverge symbolically.  The stabilisation/divergence dichotomy built
on this is exact for the power scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .errors import DivergenceError, ZeroMassError
from .measure import DX, BesselMeasure, FuncExpr, Interval, dnu

__all__ = [
    "Weight",
    "ApMu",
    "TildeAp",
    "TildeA1",
    "IntervalFamily",
    "WeightConstantReport",
    "tilde_ap_quantity",
    "ap_mu_quantity",
    "tilde_a1_quantity",
    "weight_constant",
    "DualPair",
    "dual_weight",
    "PowerRange",
    "power_weight_range",
    "power_dichotomy",
    "DichotomyResult",
]


@dataclass(frozen=True)
class Weight:
    """A nonnegative function usable as a weight; nonnegativity is spot-checked."""

    expr: FuncExpr
    description: str = ""

    def __post_init__(self):
        for x in np.geomspace(1e-6, 1e6, 49):
            if self.expr(float(x)) < 0.0:
                raise ValueError(f"weight is negative at x={x:g}")

    @classmethod
    def power(cls, alpha: float, coef: float = 1.0) -> "Weight":
        return cls(FuncExpr.power(coef, alpha), f"{coef:g} t^{alpha:g}")

    @classmethod
    def one(cls) -> "Weight":
        return cls(FuncExpr.constant(1.0), "1")

    def __call__(self, x: float) -> float:
        return self.expr(x)

    def mass(self, B: Interval) -> float:
        """w(B) = int_B w dt (Lebesgue)."""
        return self.expr.integrate(B, DX)


# -- class tags ---------------------------------------------------------------


@dataclass(frozen=True)
class ApMu:
    p: float
    lam: float  # Bessel parameter of the underlying measure

    def __post_init__(self):
        if self.p <= 1.0:
            raise ValueError("classical class needs p > 1")


@dataclass(frozen=True)
class TildeAp:
    p: float
    class_lambda: float

    def __post_init__(self):
        if self.p <= 1.0:
            raise ValueError("use TildeA1 for the limiting class")


@dataclass(frozen=True)
class TildeA1:
    class_lambda: float


ClassTag = ApMu | TildeAp | TildeA1


# -- interval families ----------------------------------------------------------


@dataclass(frozen=True)
class IntervalFamily:
    """A deterministic finite interval family; rule + seed reproduce it."""

    rule: str
    intervals: tuple[Interval, ...]

    def __len__(self) -> int:
        return len(self.intervals)

    @classmethod
    def dyadic(cls, depth: int, index_cap: int = 32) -> "IntervalFamily":
        """Dyadic intervals of levels -depth..depth intersecting (0, 2^depth],
        with per-level index capped (the per-interval products of interest are
        scale-invariant, so low indices carry the extremal shapes)."""
        out = []
        for j in range(-depth, depth + 1):
            side = 2.0**-j
            n_fit = max(1, min(index_cap, int(2.0 ** (depth + j))))
            for k in range(n_fit):
                out.append(Interval(k * side, (k + 1) * side))
        return cls(f"dyadic(J={depth},cap={index_cap})", tuple(out))

    @classmethod
    def boundary_refining(cls, depth: int) -> "IntervalFamily":
        """(0, 2^-j) and (2^-j, 1): shapes that witness blow-up at the origin."""
        out = [Interval(0.0, 2.0**-j) for j in range(depth + 1)]
        out += [Interval(2.0**-j, 1.0) for j in range(1, depth + 1)]
        return cls(f"boundary(J={depth})", tuple(out))

    @classmethod
    def random(cls, n: int, seed: int, lo_exp: float = -4.0, hi_exp: float = 2.0) -> "IntervalFamily":
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(n):
            a = float(10.0 ** rng.uniform(lo_exp, hi_exp))
            length = float(10.0 ** rng.uniform(lo_exp, hi_exp))
            out.append(Interval(a, a + length))
        return cls(f"random(n={n},seed={seed})", tuple(out))

    @classmethod
    def standard(cls, depth: int, seed: int = 0, n_random: int = 50, index_cap: int = 32) -> "IntervalFamily":
        """dyadic + boundary-refining + seeded random; monotone in depth."""
        fam = (
            cls.dyadic(depth, index_cap).intervals
            + cls.boundary_refining(depth).intervals
            + cls.random(n_random, seed).intervals
        )
        return cls(f"standard(J={depth},seed={seed})", fam)

    def __or__(self, other: "IntervalFamily") -> "IntervalFamily":
        return IntervalFamily(f"{self.rule}|{other.rule}", self.intervals + other.intervals)


# -- per-interval quantities ----------------------------------------------------


def tilde_ap_quantity(w: Weight, p: float, class_lambda: float, B: Interval) -> float:
    """The modified two-factor product on a single interval.

    Raises DivergenceError when either factor integral is infinite, which
    witnesses non-membership via B.
    """
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    pprime = p / (p - 1.0)
    nu = FuncExpr.constant(1.0).integrate(B, dnu(class_lambda))
    first = w.expr.integrate(B, DX) / nu
    dual_density = FuncExpr.power(1.0, (2.0 * class_lambda + 1.0) * pprime) * w.expr.powf(
        -1.0 / (p - 1.0)
    )
    second = dual_density.integrate(B, DX) / nu
    return first * second ** (p - 1.0)


def ap_mu_quantity(w: Weight, p: float, m: BesselMeasure, B: Interval) -> float:
    """The classical two-factor product with both averages against dmu."""
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    muB = m.mu(B)
    from .measure import dmu as _dmu

    first = (w.expr).integrate(B, _dmu(m)) / muB
    second = w.expr.powf(-1.0 / (p - 1.0)).integrate(B, _dmu(m)) / muB
    return first * second ** (p - 1.0)


def tilde_a1_quantity(
    w: Weight, class_lambda: float, B: Interval, sample_points: int = 1024
) -> float:
    """(w(B)/nu_c(B)) * sup over a geometric sample grid of x^{2c+1}/w(x).

    The essential supremum is approximated on the grid (hence a lower bound);
    for piecewise-monotone densities the endpoints attain it and the value is
    exact.  Vanishing w at a sample raises ZeroMassError.
    """
    nu = FuncExpr.constant(1.0).integrate(B, dnu(class_lambda))
    ratio = w.mass(B) / nu
    lo = B.a if B.a > 0.0 else B.b * 1e-12
    grid = np.geomspace(lo, B.b, sample_points)
    e = 2.0 * class_lambda + 1.0
    sup = 0.0
    for x in grid:
        x = float(x)
        wx = w(x)
        if wx <= 0.0:
            raise ZeroMassError(f"weight vanishes at sample x={x:g}")
        sup = max(sup, x**e / wx)
    return ratio * sup


# -- constants over families -------------------------------------------------------


@dataclass(frozen=True)
class WeightConstantReport:
    """Maximum of the per-interval quantity over a family (a certified lower
    bound for the true constant).  `value` is +inf when some interval makes a
    factor integral diverge; `finite_value` then still carries the max over
    the non-divergent intervals for growth diagnostics."""

    value: float
    argmax_interval: Interval | None
    family_size: int
    class_tag: ClassTag
    divergent: bool
    finite_value: float
    finite_argmax: Interval | None


def _quantity(w: Weight, tag: ClassTag, B: Interval) -> float:
    if isinstance(tag, ApMu):
        return ap_mu_quantity(w, tag.p, BesselMeasure(tag.lam), B)
    if isinstance(tag, TildeAp):
        return tilde_ap_quantity(w, tag.p, tag.class_lambda, B)
    return tilde_a1_quantity(w, tag.class_lambda, B)


def weight_constant(w: Weight, tag: ClassTag, family: IntervalFamily) -> WeightConstantReport:
    """Exact max of the per-interval quantity over the family; divergence on
    any member interval is reported as the +inf flag, not an exception."""
    if not family.intervals:
        raise ValueError("family must be nonempty")
    best, best_B = -math.inf, None
    witness = None
    for B in family.intervals:
        try:
            q = _quantity(w, tag, B)
        except DivergenceError:
            if witness is None:
                witness = B
            continue
        if q > best:
            best, best_B = q, B
    if witness is not None:
        return WeightConstantReport(
            math.inf, witness, len(family), tag, True, best, best_B
        )
    return WeightConstantReport(best, best_B, len(family), tag, False, best, best_B)


# -- dual weights -------------------------------------------------------------------


@dataclass(frozen=True)
class DualPair:
    sigma: Weight        # w^{1-p'}
    sigma_star: Weight   # t^{2*lam*p'} w^{1-p'}


def dual_weight(w: Weight, p: float, lam: float) -> DualPair:
    """sigma = w^{1-p'} and sigma_star = t^{2*lam*p'} * w^{1-p'}.

    Requires w to stay in the representable family under the power (single
    power atoms or piecewise-constant cells); RepresentationError otherwise.
    The exact per-interval duality swaps p and p' = p/(p-1):

        product(sigma_star, p', c, B) = product(w, p, c, B)^{1/(p-1)}

    for the class parameter c = lam - 1/2, every interval B.
    """
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    pprime = p / (p - 1.0)
    sig = w.expr.powf(1.0 - pprime)
    sig_star = FuncExpr.power(1.0, 2.0 * lam * pprime) * sig
    return DualPair(
        Weight(sig, f"({w.description})^(1-p')"),
        Weight(sig_star, f"t^{2 * lam * pprime:g} ({w.description})^(1-p')"),
    )


# -- power-weight ranges ---------------------------------------------------------------


@dataclass(frozen=True)
class PowerRange:
    lower: float
    upper: float
    upper_inclusive: bool = False

    def contains(self, alpha: float) -> bool:
        if self.upper_inclusive:
            return self.lower < alpha <= self.upper
        return self.lower < alpha < self.upper


def power_weight_range(tag: ClassTag) -> PowerRange:
    """Exact admissible exponent interval for t^alpha.

    classical: (-1-2*lam, p-1+2*lam*(p-1)), open.
    modified:  (-1, p-1+(2c+1)p), open for p > 1.
    limiting p = 1 modified class: (-1, 2c+1], the upper endpoint is the
    nu-density itself (its density ratio is identically 1), so it belongs.
    """
    if isinstance(tag, ApMu):
        return PowerRange(-1.0 - 2.0 * tag.lam, tag.p - 1.0 + 2.0 * tag.lam * (tag.p - 1.0))
    if isinstance(tag, TildeAp):
        return PowerRange(-1.0, tag.p - 1.0 + (2.0 * tag.class_lambda + 1.0) * tag.p)
    return PowerRange(-1.0, 2.0 * tag.class_lambda + 1.0, upper_inclusive=True)


# -- stabilisation / divergence dichotomy ------------------------------------------------


@dataclass(frozen=True)
class DichotomyResult:
    value_at_depth: float
    value_at_double: float
    ratio: float
    divergent: bool
    member: bool


def power_dichotomy(
    alpha: float,
    tag: ClassTag,
    depth: int,
    seed: int = 0,
    n_random: int = 50,
    index_cap: int = 32,
    stabilization_band: float = 1.05,
) -> DichotomyResult:
    """Decide membership of t^alpha by comparing constants at depth and 2*depth.

    Families are monotone in depth, so the ratio is >= 1.  Members stabilise
    (ratio under the band); non-members either trip the symbolic divergence
    flag on a zero-based interval or grow without bound.
    """
    w = Weight.power(alpha)
    r1 = weight_constant(w, tag, IntervalFamily.standard(depth, seed, n_random, index_cap))
    r2 = weight_constant(w, tag, IntervalFamily.standard(2 * depth, seed, n_random, index_cap))
    divergent = r1.divergent or r2.divergent
    ratio = math.inf if divergent else r2.value / r1.value
    member = (not divergent) and ratio < stabilization_band
    return DichotomyResult(r1.value, r2.value, ratio, divergent, member)
