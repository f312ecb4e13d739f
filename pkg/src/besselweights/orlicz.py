"""Young functions, Luxemburg norms, and Orlicz maximal operators.

A Young function is convex, increasing, and vanishes at 0.  Attached to a
Young function phi and an interval B is the Luxemburg gauge

    ||f||_{phi,B} = inf { s > 0 : (1/mu(B)) int_B phi(|f|/s) dmu <= 1 },

computed here by bisection in s (the inner average is decreasing in s).  The
complementary function phibar(s) = sup_t (s*t - phi(t)) is evaluated by
ternary search on the concave inner function; inverses are guarded bisections.
No closed forms are assumed anywhere.

Two scalar constants drive the endpoint estimates:

    c_phi  = int_1^inf phi^{-1}(t) / (t^2 * log(e+t)) dt
    k_phi  = sum_{k>=1} k / phibar^{-1}(base^{2^k})

Both admit a crisp finite/infinite dichotomy at desk scale: the integral is
probed on doubling log-windows and declared divergent when the window
increments stop decaying; the series is summed while its argument fits in
float range and certified by the geometric decay of its terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    EmptyFamilyError,
    PreconditionError,
    UnboundedComplementaryError,
)
from .measure import (
    DX,
    BesselMeasure,
    FuncExpr,
    Interval,
    dmu,
    integrate_callable,
)

__all__ = [
    "YoungFunction",
    "identity_young",
    "llogl",
    "power_young",
    "exp_m1",
    "compose_young",
    "luxemburg_norm",
    "complementary",
    "holder_orlicz_check",
    "c_phi",
    "CPhiResult",
    "k_phi",
    "KPhiResult",
    "orlicz_maximal",
    "orlicz_maximal_profile",
]

_HUGE = 1e300


def _guarded(fn: Callable[[float], float], t: float) -> float:
    try:
        v = fn(t)
    except OverflowError:
        return math.inf
    return v if not math.isnan(v) else math.inf


@dataclass(frozen=True)
class YoungFunction:
    """Convex increasing phi: [0,inf) -> [0,inf) with phi(0) = 0.

    gamma_doubling, when set, asserts phi(4t) <= gamma_doubling * phi(t); it is
    validated on a log grid at construction, as is midpoint convexity.
    """

    fn: Callable[[float], float]
    name: str
    gamma_doubling: float | None = None
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if not self._validate:
            return
        if abs(self.fn(0.0)) > 1e-300:
            raise ValueError(f"{self.name}: phi(0) must be 0")
        grid = np.logspace(-6, 6, 25)
        for s, t in zip(grid, grid[1:]):
            mid = 0.5 * (s + t)
            lhs = _guarded(self.fn, mid)
            rhs = 0.5 * (_guarded(self.fn, s) + _guarded(self.fn, t))
            if lhs > rhs * (1 + 1e-9) + 1e-300:
                raise ValueError(f"{self.name}: midpoint convexity fails near t={mid:g}")
        if _guarded(self.fn, 2.0) < _guarded(self.fn, 1.0):
            raise ValueError(f"{self.name}: not increasing")
        if self.gamma_doubling is not None:
            if self.gamma_doubling < 1.0:
                raise ValueError("doubling constant must be >= 1")
            for t in grid:
                if _guarded(self.fn, 4 * t) > self.gamma_doubling * _guarded(self.fn, t) * (
                    1 + 1e-9
                ):
                    raise ValueError(
                        f"{self.name}: phi(4t) <= {self.gamma_doubling} phi(t) fails at t={t:g}"
                    )

    def __call__(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        return _guarded(self.fn, t)

    def inverse(self, y: float) -> float:
        """phi^{-1}(y) by guarded bisection on [0, 1e300]."""
        if y <= 0.0:
            return 0.0
        hi = 1.0
        while self(hi) < y:
            hi *= 4.0
            if hi > _HUGE:
                raise ValueError(f"{self.name}: inverse bracket overflow at y={y:g}")
        lo = hi / 4.0 if hi > 1.0 else 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self(mid) < y:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-14 * hi:
                break
        return 0.5 * (lo + hi)

    def is_superlinear(self) -> bool:
        """phi(t)/t -> inf; required for a finite complementary function."""
        r1 = self(1e12) / 1e12
        r2 = self(1e250) / 1e250
        return r2 > 1.1 * r1


# -- built-ins ---------------------------------------------------------------


def identity_young() -> YoungFunction:
    return YoungFunction(lambda t: t, "Id", gamma_doubling=4.0)


def llogl(eps: float = 1.0, gamma: float | None = None) -> YoungFunction:
    """t * log(e+t)^eps for eps in (0, 1]; the L log L scale at eps = 1."""
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    if gamma is None:
        gamma = 16.0 if eps == 1.0 else 4.0 * 4.0**eps
    return YoungFunction(
        lambda t: t * math.log(math.e + t) ** eps, f"LlogL^{eps:g}", gamma_doubling=gamma
    )


def power_young(p: float) -> YoungFunction:
    """t^p / p for p > 1."""
    if p <= 1.0:
        raise ValueError("power exponent must exceed 1")
    return YoungFunction(lambda t: t**p / p, f"Power({p:g})", gamma_doubling=4.0**p)


def exp_m1(rate: float = 1.0) -> YoungFunction:
    """exp(rate * t) - 1; exponential integrability scale."""
    return YoungFunction(lambda t: math.exp(rate * t) - 1.0, f"ExpM1({rate:g})")


def compose_young(outer: YoungFunction, inner: YoungFunction) -> YoungFunction:
    """outer(inner(t)), composed literally with no renormalisation."""
    return YoungFunction(
        lambda t: outer(inner(t)),
        f"{outer.name}*{inner.name}",
        _validate=False,
    )


# -- complementary function ---------------------------------------------------


def complementary(phi: YoungFunction) -> YoungFunction:
    """phibar(s) = sup_{t>=0} (s t - phi(t)), by ternary search.

    Raises UnboundedComplementaryError when phi is not superlinear (then
    phibar jumps to +inf at finite s and callers must branch).
    """
    if not phi.is_superlinear():
        raise UnboundedComplementaryError(
            f"{phi.name} is not superlinear; complementary function is degenerate"
        )

    def bar(s: float) -> float:
        if s <= 0.0:
            return 0.0
        g = lambda t: s * t - phi(t)
        hi = 1.0
        while g(2 * hi) >= g(hi) and hi < _HUGE / 4:
            hi *= 2.0
        hi *= 2.0  # concavity puts the maximizer inside [0, 2*hi]
        lo = 0.0
        for _ in range(300):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if g(m1) < g(m2):
                lo = m1
            else:
                hi = m2
            if hi - lo <= 1e-15 * max(hi, 1.0):
                break
        t_star = 0.5 * (lo + hi)
        return max(g(t_star), 0.0)

    return YoungFunction(bar, f"conj({phi.name})", _validate=False)


# -- Luxemburg norm ------------------------------------------------------------


def _mean_of_phi(
    g_abs: FuncExpr, phi: YoungFunction, B: Interval, m: BesselMeasure, s: float
) -> float:
    """(1/mu(B)) int_B phi(|f|/s) dmu; exact for piecewise-constant |f|."""
    muB = m.mu(B)
    if g_abs.is_piecewise_constant():
        total = 0.0
        for p in g_abs.pieces:
            lo, hi = max(p.lo, B.a), min(p.hi, B.b)
            if lo >= hi:
                continue
            v = abs(p.atoms[0][0])
            phival = phi(v / s)
            if math.isinf(phival):
                return math.inf
            total += phival * m.mu(Interval(lo, hi))
        return total / muB
    pts = g_abs.breakpoints()
    try:
        val = integrate_callable(
            lambda x: phi(abs(g_abs(x)) / s), B, dmu(m), points=pts, rel_tol=1e-11
        )
    except OverflowError:
        return math.inf
    return val / muB


def luxemburg_norm(
    f: FuncExpr, phi: YoungFunction, B: Interval, m: BesselMeasure, rel_tol: float = 1e-9
) -> float:
    """Luxemburg gauge of f on B with respect to dmu, by bisection in s."""
    g_abs = f.restrict(B).abs()
    if g_abs.is_zero():
        return 0.0
    # initial scale from the largest cell coefficient magnitude
    peak = max(
        abs(g_abs(_cell_probe(p.lo, p.hi, B))) for p in g_abs.pieces
    )
    peak = max(peak, 1e-280)
    s = peak / max(phi.inverse(1.0), 1e-280)
    s = max(s, 1e-280)
    mean = lambda sv: _mean_of_phi(g_abs, phi, B, m, sv)
    hi = s
    steps = 0
    while mean(hi) > 1.0:
        hi *= 4.0
        steps += 1
        if steps > 200:
            raise PreconditionError("Luxemburg bisection: no upper bracket")
    lo = hi / 4.0
    steps = 0
    while mean(lo) <= 1.0 and lo > 1e-280:
        hi = lo
        lo /= 4.0
        steps += 1
        if steps > 200:
            return 0.0
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if mean(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * hi:
            break
    return hi


def _cell_probe(lo: float, hi: float, B: Interval) -> float:
    lo, hi = max(lo, B.a), min(hi, B.b)
    if lo <= 0.0:
        lo = hi * 1e-12
    return math.sqrt(lo * hi)


# -- generalized Holder ---------------------------------------------------------


def holder_orlicz_check(
    f: FuncExpr,
    g: FuncExpr,
    A: YoungFunction,
    Bfun: YoungFunction,
    C: YoungFunction,
    Q: Interval,
    m: BesselMeasure,
    grid: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Both sides of ||f g||_{C,Q} <= 2 ||f||_{A,Q} ||g||_{B,Q}.

    Precondition A^{-1}(t) B^{-1}(t) <= C^{-1}(t) is verified on a log grid;
    violation raises PreconditionError with the witness t.
    """
    ts = grid if grid is not None else np.logspace(-4, 8, 61)
    for t in ts:
        lhs = A.inverse(float(t)) * Bfun.inverse(float(t))
        rhs = C.inverse(float(t))
        if lhs > rhs * (1 + 1e-8):
            raise PreconditionError(
                f"A^-1(t) B^-1(t) <= C^-1(t) fails at t={t:g}: {lhs:g} > {rhs:g}",
                witness=float(t),
            )
    left = luxemburg_norm(f * g, C, Q, m)
    right = 2.0 * luxemburg_norm(f, A, Q, m) * luxemburg_norm(g, Bfun, Q, m)
    return left, right


# -- endpoint constants ----------------------------------------------------------


@dataclass(frozen=True)
class CPhiResult:
    value: float
    finite: bool
    partial: float
    increments: tuple[float, ...]
    tail_estimate: float


def c_phi(
    phi: YoungFunction,
    checkpoints: Sequence[float] = (1.0, 1e3, 1e6, 1e12, 1e24),
    divergence_cap: float = 1e6,
    decay_threshold: float = 0.95,
) -> CPhiResult:
    """int_1^inf phi^{-1}(t) / (t^2 log(e+t)) dt with a finiteness dichotomy.

    The integrand is integrated over log-doubling windows; the integral is
    declared divergent when either the partial integral exceeds the cap or the
    window increments stop decaying (ratio >= decay_threshold, which the
    borderline integrand 1/(t log t) attains with ratio 1).
    """
    # substitute t = e^u so each log window becomes a moderate smooth range
    def log_integrand(u: float) -> float:
        t = math.exp(u)
        return phi.inverse(t) / (t * math.log(math.e + t))

    if checkpoints[0] < 1.0:
        raise ValueError("checkpoints must start at 1 or above")
    increments = []
    for lo, hi in zip(checkpoints, checkpoints[1:]):
        increments.append(
            integrate_callable(
                log_integrand, Interval(math.log(lo), math.log(hi)), DX, rel_tol=1e-9
            )
        )
    partial = sum(increments)
    if partial > divergence_cap:
        return CPhiResult(math.inf, False, partial, tuple(increments), math.inf)
    ratio = increments[-1] / increments[-2] if increments[-2] > 0 else 0.0
    if ratio >= decay_threshold:
        return CPhiResult(math.inf, False, partial, tuple(increments), math.inf)
    tail = increments[-1] * ratio / (1.0 - ratio) if ratio > 0 else 0.0
    return CPhiResult(partial + tail, True, partial, tuple(increments), tail)


@dataclass(frozen=True)
class KPhiResult:
    value: float
    finite: bool
    terms: tuple[float, ...]
    tail_estimate: float


def k_phi(phi: YoungFunction, base: float = 32.0, k_max: int | None = None) -> KPhiResult:
    """sum_{k>=1} k / phibar^{-1}(base^{2^k}), partial sum plus decay certificate.

    Terms are computed while base^{2^k} fits in float range; the tail is
    certified by the (measured) geometric decay of consecutive terms.  A
    non-superlinear phi yields the +inf flag rather than an exception.
    """
    try:
        bar = complementary(phi)
    except UnboundedComplementaryError:
        return KPhiResult(math.inf, False, (), math.inf)
    terms = []
    k = 1
    while True:
        if k_max is not None and k > k_max:
            break
        exponent = 2.0**k * math.log(base)
        if exponent > math.log(1e300):
            break
        arg = math.exp(exponent)
        terms.append(k / bar.inverse(arg))
        k += 1
    if len(terms) < 3:
        return KPhiResult(math.inf, False, tuple(terms), math.inf)
    decreasing = all(t2 < t1 for t1, t2 in zip(terms[1:], terms[2:]))
    ratio = terms[-1] / terms[-2]
    if not decreasing or ratio >= 1.0:
        return KPhiResult(math.inf, False, tuple(terms), math.inf)
    tail = terms[-1] * ratio / (1.0 - ratio)
    return KPhiResult(sum(terms) + tail, True, tuple(terms), tail)


# -- Orlicz maximal operator -------------------------------------------------------


def orlicz_maximal(
    h: FuncExpr,
    phi: YoungFunction,
    x: float,
    intervals: Sequence[Interval],
    m: BesselMeasure,
) -> float:
    """max over family intervals containing x of ||h||_{phi,B}; a certified
    lower bound for the supremum over all intervals."""
    containing = [B for B in intervals if B.contains(x)]
    if not containing:
        raise EmptyFamilyError(f"no family interval contains x={x:g}")
    return max(luxemburg_norm(h, phi, B, m) for B in containing)


def orlicz_maximal_profile(
    h: FuncExpr,
    phi: YoungFunction,
    intervals: Sequence[Interval],
    m: BesselMeasure,
) -> FuncExpr:
    """The family maximal function as a piecewise-constant FuncExpr.

    Per-interval Luxemburg norms are computed once; on each cell of the
    endpoint arrangement the profile is the max over covering intervals.
    """
    if not intervals:
        raise EmptyFamilyError("empty interval family")
    norms = [(B, luxemburg_norm(h, phi, B, m)) for B in intervals]
    pts = sorted({p for B in intervals for p in (B.a, B.b)})
    breaks, vals = [pts[0]], []
    for lo, hi in zip(pts, pts[1:]):
        mid = 0.5 * (lo + hi)
        covering = [v for B, v in norms if B.a <= mid <= B.b]
        vals.append(max(covering) if covering else 0.0)
        breaks.append(hi)
    return FuncExpr.piecewise_constant(breaks, vals)
