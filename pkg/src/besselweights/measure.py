"""Measures on the half-line and an exactly integrable function family.

The package works on (R_+, |.|, dmu) with dmu = x^{2*lam} dx, lam > 0.  Three
reference measures appear throughout:

    dx                    Lebesgue measure,
    dmu   = x^{2*lam} dx  the Bessel measure,
    dnu_c = x^{2*c+1} dx  the auxiliary family indexed by a class parameter c.

All of them are of the form x^e dx, so a single primitive covers everything:
the closed-form antiderivative of x^beta * log(x)^m.

Functions are represented by :class:`FuncExpr`: a finite list of disjoint
cells (lo, hi), each carrying a sum of atoms c * x^alpha * log(x)^m, and zero
off the cells.  The family is closed under +, -, products, restriction,
absolute value (by splitting cells at sign changes) and real powers of
single-atom pieces, and every member integrates in closed form against any
x^e dx.  That is enough to express every function manipulated here (powers,
log x^{2*lam}, indicators, sparse-operator outputs) without quadrature error.

A guarded adaptive-quadrature fallback (`integrate_callable`) handles
compositions that leave the family, e.g. phi(|f|) for a Young function phi.
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .errors import DivergenceError, QuadratureError, RepresentationError

__all__ = [
    "Interval",
    "BesselMeasure",
    "MeasureKind",
    "DX",
    "dmu",
    "dnu",
    "FuncExpr",
    "integrate",
    "integrate_callable",
    "mu_interval",
    "nu_interval",
    "power_log_integral",
]

_COEF_EPS = 0.0  # atoms with coefficient exactly 0 are dropped


@dataclass(frozen=True)
class Interval:
    """An interval (a, b) in R_+ with 0 <= a < b < inf."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a < self.b < math.inf):
            raise ValueError(f"invalid interval ({self.a}, {self.b})")

    @classmethod
    def clipped(cls, lo: float, hi: float) -> "Interval":
        """Clip geometry that crosses 0 to (0, hi); the half-line owns the space."""
        return cls(max(lo, 0.0), hi)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def contains(self, x: float) -> bool:
        return self.a < x < self.b

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.a, other.a), min(self.b, other.b)
        return Interval(lo, hi) if lo < hi else None


# ---------------------------------------------------------------------------
# Measure kinds: every reference measure is x^exponent dx.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureKind:
    """A measure of the form x^exponent dx."""

    exponent: float
    label: str = "dx"


DX = MeasureKind(0.0, "dx")


def dmu(m: "BesselMeasure") -> MeasureKind:
    return MeasureKind(2.0 * m.lam, "dmu")


def dnu(class_lambda: float) -> MeasureKind:
    return MeasureKind(2.0 * class_lambda + 1.0, f"dnu({class_lambda})")


# ---------------------------------------------------------------------------
# Exact antiderivatives of x^beta log(x)^m.
# ---------------------------------------------------------------------------


def _power_diff(e1: float, a: float, b: float) -> float:
    """b^e1 - a^e1 for 0 <= a < b, stable when e1*log(b/a) is small."""
    if a == 0.0:
        if e1 <= 0.0:
            raise DivergenceError(f"integral of x^{e1 - 1.0} diverges at 0")
        return b**e1
    la = math.log(a)
    d = e1 * math.log(b / a)
    if d > 30.0:  # no cancellation; the expm1 form would overflow
        return math.exp(e1 * math.log(b)) - math.exp(e1 * la)
    return math.exp(e1 * la) * math.expm1(d)


def power_log_integral(beta: float, m: int, a: float, b: float) -> float:
    """Exact integral of x^beta * log(x)^m over (a, b), 0 <= a < b < inf.

    Raises DivergenceError when a == 0 and the integral is infinite
    (beta <= -1).  The divergence test is symbolic, not numeric.
    """
    if m < 0:
        raise ValueError("log power must be a nonnegative integer")
    if a == 0.0 and beta <= -1.0:
        raise DivergenceError(f"integral of x^{beta} log^{m} x diverges at 0")
    if beta == -1.0:
        # antiderivative log(x)^{m+1} / (m+1)
        return (math.log(b) ** (m + 1) - math.log(a) ** (m + 1)) / (m + 1)
    e1 = beta + 1.0
    if m == 0:
        return _power_diff(e1, a, b) / e1
    # F(x) = x^{e1} * sum_{j=0..m} (-1)^j m!/(m-j)! * log(x)^{m-j} / e1^{j+1}
    def anti(x: float) -> float:
        if x == 0.0:
            return 0.0  # valid since e1 > 0 here
        lx = math.log(x)
        fact = 1.0
        acc = 0.0
        for j in range(m + 1):
            acc += ((-1.0) ** j) * fact * lx ** (m - j) / e1 ** (j + 1)
            fact *= m - j
        return x**e1 * acc

    if a == 0.0 and e1 <= 0.0:  # pragma: no cover - guarded above
        raise DivergenceError("divergent at 0")
    return anti(b) - anti(a)


# ---------------------------------------------------------------------------
# BesselMeasure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BesselMeasure:
    """The measure dmu = x^{2*lam} dx on R_+, lam > 0.

    mu is doubling on intervals of the half-line; `doubling_ratio` exposes the
    two-interval ratio used by the crude certificate mu(2B)/mu(B) <=
    4 * 2^{2*lam+1}.
    """

    lam: float

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("Bessel parameter must be positive")

    def mu(self, B: Interval) -> float:
        """mu(B) = (b^{2*lam+1} - a^{2*lam+1}) / (2*lam + 1)."""
        return power_log_integral(2.0 * self.lam, 0, B.a, B.b)

    def nu(self, class_lambda: float, B: Interval) -> float:
        """nu_c(B) = integral of x^{2c+1} dx over B (closed form)."""
        return power_log_integral(2.0 * class_lambda + 1.0, 0, B.a, B.b)

    def mu_density(self, x: float) -> float:
        return x ** (2.0 * self.lam)

    def doubling_ratio(self, center: float, r: float) -> float:
        """mu((c-2r, c+2r) ∩ R_+) / mu((c-r, c+r) ∩ R_+)."""
        big = Interval.clipped(center - 2 * r, center + 2 * r)
        small = Interval.clipped(center - r, center + r)
        return self.mu(big) / self.mu(small)

    def integrate(self, f: "FuncExpr", B: Interval, kind: MeasureKind) -> float:
        """Exact integral of f against x^e dx over B."""
        return f.integrate(B, kind)

    def average(self, f: "FuncExpr", B: Interval) -> float:
        """mu-average of f over B."""
        return self.integrate(f, B, dmu(self)) / self.mu(B)


# ---------------------------------------------------------------------------
# FuncExpr: piecewise power-log functions.
# ---------------------------------------------------------------------------

Atom = tuple[float, float, int]  # (coef, alpha, logpow)


def _merge_atoms(atoms: Iterable[Atom]) -> tuple[Atom, ...]:
    acc: dict[tuple[float, int], float] = {}
    for c, alpha, m in atoms:
        if c == 0.0:
            continue
        key = (alpha, m)
        acc[key] = acc.get(key, 0.0) + c
    out = tuple(
        (c, alpha, m) for (alpha, m), c in sorted(acc.items()) if c != _COEF_EPS
    )
    return out


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float  # may be math.inf
    atoms: tuple[Atom, ...]

    def eval(self, x: float) -> float:
        lx = math.log(x)
        return sum(c * x**alpha * lx**m for c, alpha, m in self.atoms)


class FuncExpr:
    """A function on R_+: finitely many cells of power-log sums, zero elsewhere."""

    __slots__ = ("pieces", "_los")

    def __init__(self, pieces: Sequence[Piece]):
        cleaned = [p for p in pieces if p.atoms and p.lo < p.hi]
        cleaned.sort(key=lambda p: p.lo)
        for prev, nxt in zip(cleaned, cleaned[1:]):
            if nxt.lo < prev.hi - 1e-15 * max(1.0, abs(prev.hi)):
                raise ValueError("overlapping pieces")
        object.__setattr__(self, "pieces", tuple(cleaned))
        object.__setattr__(self, "_los", [p.lo for p in cleaned])

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "FuncExpr":
        return cls([])

    @classmethod
    def constant(cls, c: float) -> "FuncExpr":
        return cls([Piece(0.0, math.inf, ((c, 0.0, 0),))]) if c != 0.0 else cls.zero()

    @classmethod
    def power(cls, c: float, alpha: float) -> "FuncExpr":
        """c * x^alpha on all of R_+."""
        return cls([Piece(0.0, math.inf, ((c, alpha, 0),))]) if c != 0.0 else cls.zero()

    @classmethod
    def log_power(cls, c: float, alpha: float, m: int) -> "FuncExpr":
        """c * x^alpha * log(x)^m on all of R_+."""
        return cls([Piece(0.0, math.inf, ((c, alpha, m),))]) if c != 0.0 else cls.zero()

    @classmethod
    def log_of_mu_density(cls, lam: float) -> "FuncExpr":
        """log x^{2*lam} = 2*lam * log x."""
        return cls.log_power(2.0 * lam, 0.0, 1)

    @classmethod
    def indicator(cls, B: Interval, value: float = 1.0) -> "FuncExpr":
        if value == 0.0:
            return cls.zero()
        return cls([Piece(B.a, B.b, ((value, 0.0, 0),))])

    @classmethod
    def piecewise_constant(
        cls, breakpoints: Sequence[float], values: Sequence[float]
    ) -> "FuncExpr":
        """Values v_i on cells (b_i, b_{i+1}); zero outside [b_0, b_last]."""
        if len(values) != len(breakpoints) - 1:
            raise ValueError("need len(values) == len(breakpoints) - 1")
        if any(x >= y for x, y in zip(breakpoints, breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if breakpoints[0] < 0.0:
            raise ValueError("breakpoints must lie in R_+")
        pieces = [
            Piece(lo, hi, ((v, 0.0, 0),))
            for lo, hi, v in zip(breakpoints, breakpoints[1:], values)
            if v != 0.0
        ]
        return cls(pieces)

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.pieces

    def is_piecewise_constant(self) -> bool:
        return all(
            all(alpha == 0.0 and m == 0 for _, alpha, m in p.atoms)
            for p in self.pieces
        )

    def support_bounds(self) -> Interval | None:
        if not self.pieces:
            return None
        hi = self.pieces[-1].hi
        return None if hi == math.inf else Interval(self.pieces[0].lo, hi)

    def breakpoints(self) -> list[float]:
        pts: list[float] = []
        for p in self.pieces:
            pts.append(p.lo)
            if p.hi != math.inf:
                pts.append(p.hi)
        return sorted(set(pts))

    def __call__(self, x: float) -> float:
        """Evaluate at x > 0; cells are half-open [lo, hi), zero off cells."""
        if x <= 0.0:
            return 0.0
        i = bisect.bisect_right(self._los, x) - 1
        if i < 0:
            return 0.0
        p = self.pieces[i]
        return p.eval(x) if x < p.hi else 0.0

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self(float(x)) for x in xs])

    @staticmethod
    def _piece_eval_grid(p: Piece, xs: np.ndarray) -> np.ndarray:
        lx = np.log(xs)
        out = np.zeros_like(xs)
        for c, alpha, m in p.atoms:
            term = c * xs**alpha
            if m:
                term = term * lx**m
            out += term
        return out

    # -- arithmetic ----------------------------------------------------------

    def _cells_on(self, grid: list[float]) -> list[tuple[float, float, tuple[Atom, ...]]]:
        out = []
        for lo, hi in zip(grid, grid[1:]):
            mid = _geometric_mid(lo, hi)
            i = bisect.bisect_right(self._los, mid) - 1
            atoms: tuple[Atom, ...] = ()
            if i >= 0:
                p = self.pieces[i]
                if p.lo <= mid < p.hi:
                    atoms = p.atoms
            out.append((lo, hi, atoms))
        return out

    @staticmethod
    def _common_grid(f: "FuncExpr", g: "FuncExpr") -> list[float]:
        pts = set()
        for h in (f, g):
            for p in h.pieces:
                pts.add(p.lo)
                pts.add(p.hi)
        return sorted(pts)

    def __add__(self, other: "FuncExpr | float") -> "FuncExpr":
        if isinstance(other, (int, float)):
            other = FuncExpr.constant(float(other))
        grid = self._common_grid(self, other)
        if not grid:
            return FuncExpr.zero()
        mine = self._cells_on(grid)
        theirs = other._cells_on(grid)
        pieces = []
        for (lo, hi, a1), (_, _, a2) in zip(mine, theirs):
            atoms = _merge_atoms(list(a1) + list(a2))
            if atoms:
                pieces.append(Piece(lo, hi, atoms))
        return FuncExpr(pieces)

    def __neg__(self) -> "FuncExpr":
        return FuncExpr(
            [Piece(p.lo, p.hi, tuple((-c, a, m) for c, a, m in p.atoms)) for p in self.pieces]
        )

    def __sub__(self, other: "FuncExpr | float") -> "FuncExpr":
        if isinstance(other, (int, float)):
            other = FuncExpr.constant(float(other))
        return self + (-other)

    def __mul__(self, other: "FuncExpr | float") -> "FuncExpr":
        if isinstance(other, (int, float)):
            c = float(other)
            if c == 0.0:
                return FuncExpr.zero()
            return FuncExpr(
                [
                    Piece(p.lo, p.hi, tuple((c * co, a, m) for co, a, m in p.atoms))
                    for p in self.pieces
                ]
            )
        grid = self._common_grid(self, other)
        if not grid:
            return FuncExpr.zero()
        mine = self._cells_on(grid)
        theirs = other._cells_on(grid)
        pieces = []
        for (lo, hi, a1), (_, _, a2) in zip(mine, theirs):
            if not a1 or not a2:
                continue
            prods = [
                (c1 * c2, al1 + al2, m1 + m2)
                for c1, al1, m1 in a1
                for c2, al2, m2 in a2
            ]
            atoms = _merge_atoms(prods)
            if atoms:
                pieces.append(Piece(lo, hi, atoms))
        return FuncExpr(pieces)

    __rmul__ = __mul__

    def restrict(self, B: Interval) -> "FuncExpr":
        pieces = []
        for p in self.pieces:
            lo, hi = max(p.lo, B.a), min(p.hi, B.b)
            if lo < hi:
                pieces.append(Piece(lo, hi, p.atoms))
        return FuncExpr(pieces)

    def powf(self, s: float) -> "FuncExpr":
        """Pointwise power f^s; each cell must be a single power atom."""
        pieces = []
        for p in self.pieces:
            if len(p.atoms) != 1:
                raise RepresentationError(
                    "pointwise power needs single-atom cells; got a sum"
                )
            c, alpha, m = p.atoms[0]
            if m == 0:
                if c < 0.0:
                    raise RepresentationError("negative base under real power")
                if c == 0.0:
                    continue
                pieces.append(Piece(p.lo, p.hi, ((c**s, alpha * s, 0),)))
            elif float(s).is_integer() and s >= 0:
                k = int(s)
                pieces.append(Piece(p.lo, p.hi, ((c**k, alpha * k, m * k),)))
            else:
                raise RepresentationError(
                    "real power of a log atom leaves the representable family"
                )
        return FuncExpr(pieces)

    # -- sign handling -------------------------------------------------------

    def _piece_roots(self, p: Piece, lo: float, hi: float, samples: int) -> list[float]:
        """Sign-change points of the cell's atom sum inside (lo, hi)."""
        if len(p.atoms) == 1 and p.atoms[0][2] == 0:
            return []  # single pure power: constant sign
        lo_eff = lo if lo > 0.0 else hi * 1e-15
        xs = np.geomspace(lo_eff, hi, samples)
        vals = self._piece_eval_grid(p, xs)
        roots = []
        for x0, x1, v0, v1 in zip(xs, xs[1:], vals, vals[1:]):
            if v0 == 0.0:
                roots.append(float(x0))
            elif v0 * v1 < 0.0:
                roots.append(float(brentq(p.eval, x0, x1, rtol=1e-15)))
        # dedupe
        out: list[float] = []
        for r in roots:
            if lo < r < hi and (not out or r > out[-1] * (1 + 1e-13)):
                out.append(r)
        return out

    def abs(self, samples: int = 257) -> "FuncExpr":
        """|f| by splitting cells at sign changes (finite cells only)."""
        pieces = []
        for p in self.pieces:
            if p.hi == math.inf:
                raise RepresentationError("abs() requires finite cells; restrict first")
            cuts = [p.lo] + self._piece_roots(p, p.lo, p.hi, samples) + [p.hi]
            for lo, hi in zip(cuts, cuts[1:]):
                mid = _geometric_mid(lo, hi)
                if p.eval(mid) >= 0.0:
                    pieces.append(Piece(lo, hi, p.atoms))
                else:
                    pieces.append(
                        Piece(lo, hi, tuple((-c, a, m) for c, a, m in p.atoms))
                    )
        return FuncExpr(pieces)

    def sign_regions(self, B: Interval, samples: int = 257) -> list[tuple[Interval, int]]:
        """Partition of B into maximal cells of constant sign (+1, -1, 0)."""
        g = self.restrict(B)
        pts = {B.a, B.b}
        for p in g.pieces:
            pts.add(p.lo)
            pts.add(p.hi)
            for r in self._piece_roots(p, p.lo, p.hi, samples):
                pts.add(r)
        grid = sorted(pts)
        out = []
        for lo, hi in zip(grid, grid[1:]):
            mid = _geometric_mid(lo, hi)
            v = g(mid)
            sgn = 0 if v == 0.0 else (1 if v > 0.0 else -1)
            out.append((Interval(lo, hi), sgn))
        return out

    # -- integration ---------------------------------------------------------

    def integrate(self, B: Interval, kind: MeasureKind) -> float:
        """Exact integral of f * x^e dx over B; symbolic divergence detection."""
        total = 0.0
        for p in self.pieces:
            lo, hi = max(p.lo, B.a), min(p.hi, B.b)
            if lo >= hi:
                continue
            for c, alpha, m in p.atoms:
                total += c * power_log_integral(alpha + kind.exponent, m, lo, hi)
        return total

    def lp_integral(self, p_exp: float, weight: "FuncExpr", B: Interval) -> float:
        """integral of |f|^p * weight dx over B; exact when representable,
        cell-by-cell adaptive quadrature otherwise."""
        f_abs = self.restrict(B).abs()
        try:
            return (f_abs.powf(p_exp) * weight).integrate(B, DX)
        except RepresentationError:
            pass
        cuts = sorted(
            {p for p in f_abs.breakpoints() + weight.breakpoints() if B.a < p < B.b}
            | {B.a, B.b}
        )
        total = 0.0
        integrand = lambda x: abs(f_abs(x)) ** p_exp * weight(x)
        for lo, hi in zip(cuts, cuts[1:]):
            mid = _geometric_mid(lo, hi)
            if f_abs(mid) == 0.0 and weight(mid) == 0.0:
                continue
            if lo <= hi * 1e-290:
                total += _zero_cell_lp_quad(f_abs, weight, p_exp, mid, hi)
                continue
            total += integrate_callable(
                integrand, Interval(lo, hi), DX, rel_tol=1e-9
            )
        return total


def _geometric_mid(lo: float, hi: float) -> float:
    if lo > 0.0 and hi < math.inf:
        return math.sqrt(lo * hi)
    if hi == math.inf:
        return max(2.0 * lo, 1.0)
    return hi / 2.0


def _piece_atoms_at(f: "FuncExpr", x: float) -> tuple[Atom, ...] | None:
    i = bisect.bisect_right(f._los, x) - 1
    if i < 0:
        return None
    p = f.pieces[i]
    return p.atoms if p.lo <= x < p.hi else None


def _zero_cell_lp_quad(
    f_abs: "FuncExpr", weight: "FuncExpr", p_exp: float, probe: float, hi: float
) -> float:
    """int_0^hi |f|^p w dx in log coordinates with grouped exponentials.

    Factoring the minimal power exponents out of each factor keeps every term
    bounded as u -> -inf; integrability requires the grouped exponent
    p*min_a(f) + min_a(w) + 1 to be positive (symbolic divergence otherwise).
    """
    fa = _piece_atoms_at(f_abs, probe)
    wa = _piece_atoms_at(weight, probe)
    if fa is None or wa is None:
        return 0.0
    a_f = min(a for _, a, _ in fa)
    a_w = min(a for _, a, _ in wa)
    expo = p_exp * a_f + a_w + 1.0
    if expo <= 0.0:
        raise DivergenceError("p-mass integral diverges at 0")

    def F(u: float) -> float:
        s = sum(c * math.exp((a - a_f) * u) * u**m for c, a, m in fa)
        t = sum(c * math.exp((a - a_w) * u) * u**m for c, a, m in wa)
        return abs(s) ** p_exp * t * math.exp(expo * u)

    u_hi = math.log(hi)
    window = max(80.0, 80.0 / expo)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            F, u_hi - window, u_hi, limit=400, epsabs=1e-300, epsrel=1e-10
        )
    return val


# ---------------------------------------------------------------------------
# Free-function forms of the basic operations.
# ---------------------------------------------------------------------------


def mu_interval(m: BesselMeasure, B: Interval) -> float:
    """mu(B); always positive for nondegenerate intervals."""
    return m.mu(B)


def nu_interval(m: BesselMeasure, class_lambda: float, B: Interval) -> float:
    """nu_c(B); divergence at 0 is detected symbolically."""
    return m.nu(class_lambda, B)


def integrate(f: FuncExpr, B: Interval, kind: MeasureKind) -> float:
    """Exact integral of a family member against x^e dx over B."""
    return f.integrate(B, kind)


# ---------------------------------------------------------------------------
# Guarded adaptive quadrature for callables that leave the family.
# ---------------------------------------------------------------------------


def integrate_callable(
    g: Callable[[float], float],
    B: Interval,
    kind: MeasureKind = DX,
    points: Sequence[float] | None = None,
    rel_tol: float = 1e-10,
    abs_floor: float = 1e-300,
) -> float:
    """integral of g(x) * x^e dx over B by adaptive quadrature.

    Subdivision is bounded by scipy's limit; failure to reach `rel_tol`
    relative accuracy (with a tiny absolute floor) raises QuadratureError
    reporting the achieved error estimate.
    """
    e = kind.exponent
    integrand = (lambda x: g(x)) if e == 0.0 else (lambda x: g(x) * x**e)
    interior = sorted({p for p in (points or []) if B.a < p < B.b})
    with warnings.catch_warnings():
        # the explicit error check below supersedes scipy's advisory warnings
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(
            integrand,
            B.a,
            B.b,
            points=interior or None,
            limit=200,
            epsabs=abs_floor,
            epsrel=rel_tol,
        )
    if not math.isfinite(val):
        raise DivergenceError("quadrature returned a non-finite value")
    if err > rel_tol * max(abs(val), 1e-12) and err > 1e-13:
        raise QuadratureError(
            f"quadrature did not converge: estimated error {err:.3e} on value {val:.6e}",
            achieved_error=err,
        )
    return val
