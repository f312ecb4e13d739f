"""Dyadic grid on the half-line, sparse families, and layer decompositions.

Cubes are the half-open intervals [k 2^-j, (k+1) 2^-j); half-openness makes
each level tile (0, inf) exactly.  Two cubes are nested or disjoint, each has
two children, and on the half-line the grid satisfies the standard dyadic
axioms with geometric constant 1.

A family S is eta-sparse when each cube Q owns a major subset E_Q in Q with
mu(E_Q) >= eta mu(Q) and the E_Q pairwise disjoint (the disjoint variant is
what every argument here uses; it implies sparseness in the finite-overlap
sense as well).  `canonical_major_subsets` realises E_Q = Q minus the union
of next-layer family cubes inside Q, where layers peel maximal cubes off the
family repeatedly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DisjointnessError
from .measure import BesselMeasure, FuncExpr, Interval

__all__ = [
    "DyadicCube",
    "build_grid",
    "SparseFamily",
    "LayeredFamily",
    "verify_sparse",
    "canonical_major_subsets",
    "layer_decompose",
    "level_sets",
    "random_subtree",
    "zero_chain",
    "stopping_cubes",
    "subtract_intervals",
]

_MAX_CUBES = 10**7


@dataclass(frozen=True, order=True)
class DyadicCube:
    """The cube [index * 2^-level, (index+1) * 2^-level)."""

    level: int
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("index must be nonnegative")

    @property
    def side(self) -> float:
        return 2.0**-self.level

    @property
    def interval(self) -> Interval:
        return Interval(self.index * self.side, (self.index + 1) * self.side)

    def parent(self) -> "DyadicCube":
        return DyadicCube(self.level - 1, self.index // 2)

    def children(self) -> tuple["DyadicCube", "DyadicCube"]:
        return (
            DyadicCube(self.level + 1, 2 * self.index),
            DyadicCube(self.level + 1, 2 * self.index + 1),
        )

    def contains(self, other: "DyadicCube") -> bool:
        if other.level < self.level:
            return False
        return other.index >> (other.level - self.level) == self.index

    def contains_point(self, x: float) -> bool:
        iv = self.interval
        return iv.a <= x < iv.b

    def ancestor(self, level: int) -> "DyadicCube":
        if level > self.level:
            raise ValueError("ancestor level must not exceed cube level")
        return DyadicCube(level, self.index >> (self.level - level))


def build_grid(domain: Interval, min_level: int, max_level: int) -> list[DyadicCube]:
    """All cubes of levels min_level..max_level meeting the domain."""
    if min_level > max_level:
        raise ValueError("min_level must not exceed max_level")
    out: list[DyadicCube] = []
    for j in range(min_level, max_level + 1):
        side = 2.0**-j
        k_lo = max(0, int(math.floor(domain.a / side)))
        if k_lo * side + side <= domain.a:  # guard float floor
            k_lo += 1
        k_hi = int(math.ceil(domain.b / side))
        count = max(0, k_hi - k_lo)
        if len(out) + count > _MAX_CUBES:
            raise ValueError("grid would exceed the cube-count guard (1e7)")
        for k in range(k_lo, k_hi):
            cube = DyadicCube(j, k)
            iv = cube.interval
            if iv.b > domain.a and iv.a < domain.b:
                out.append(cube)
    return sorted(out)


# -- sparse families ------------------------------------------------------------


@dataclass(frozen=True)
class SparseFamily:
    """Cubes with designated pairwise-disjoint major subsets and parameter eta."""

    cubes: tuple[DyadicCube, ...]
    major_subsets: dict  # DyadicCube -> tuple[Interval, ...]
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "cubes", tuple(sorted(self.cubes)))

    def __len__(self) -> int:
        return len(self.cubes)

    def intervals(self) -> list[Interval]:
        return [Q.interval for Q in self.cubes]

    # line format: "level index etaNum etaDen lo hi [lo hi ...]"
    def to_lines(self) -> list[str]:
        frac = Fraction(self.eta).limit_denominator(2**40)
        lines = []
        for Q in self.cubes:
            parts = [str(Q.level), str(Q.index), str(frac.numerator), str(frac.denominator)]
            for iv in self.major_subsets.get(Q, ()):
                parts.append(repr(iv.a))
                parts.append(repr(iv.b))
            lines.append(" ".join(parts))
        return lines

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "SparseFamily":
        cubes, subsets = [], {}
        eta = 1.0
        for line in lines:
            parts = line.split()
            if not parts:
                continue
            level, index = int(parts[0]), int(parts[1])
            eta = int(parts[2]) / int(parts[3])
            Q = DyadicCube(level, index)
            cubes.append(Q)
            rest = [float(t) for t in parts[4:]]
            subsets[Q] = tuple(
                Interval(lo, hi) for lo, hi in zip(rest[::2], rest[1::2])
            )
        return cls(tuple(cubes), subsets, eta)


@dataclass(frozen=True)
class LayeredFamily:
    """Layer v+1 cubes are the maximal cubes once layers <= v are removed."""

    layers: tuple[tuple[DyadicCube, ...], ...]

    def all_cubes(self) -> list[DyadicCube]:
        return [Q for layer in self.layers for Q in layer]


def layer_decompose(cubes: Sequence[DyadicCube]) -> LayeredFamily:
    """Peel maximal cubes: layer(Q) = length of the longest chain of family
    cubes strictly containing Q."""
    cube_set = set(cubes)
    by_level = sorted(cube_set)  # level ascending: ancestors first
    min_level = by_level[0].level if by_level else 0
    layer_of: dict[DyadicCube, int] = {}
    for Q in by_level:
        depth = 0
        anc = Q
        while anc.level > min_level:
            anc = anc.parent()
            if anc in cube_set:
                depth = max(depth, layer_of[anc] + 1)
        layer_of[Q] = depth
    if not by_level:
        return LayeredFamily(())
    n_layers = max(layer_of.values()) + 1
    layers: list[list[DyadicCube]] = [[] for _ in range(n_layers)]
    for Q, v in layer_of.items():
        layers[v].append(Q)
    return LayeredFamily(tuple(tuple(sorted(layer)) for layer in layers))


def subtract_intervals(base: Interval, holes: Sequence[Interval]) -> tuple[Interval, ...]:
    """base minus the union of holes, as disjoint intervals."""
    cuts = sorted(
        (max(h.a, base.a), min(h.b, base.b)) for h in holes if h.b > base.a and h.a < base.b
    )
    out, cursor = [], base.a
    for lo, hi in cuts:
        if lo > cursor:
            out.append(Interval(cursor, lo))
        cursor = max(cursor, hi)
    if cursor < base.b:
        out.append(Interval(cursor, base.b))
    return tuple(out)


def canonical_major_subsets(cubes: Sequence[DyadicCube], m: BesselMeasure) -> SparseFamily:
    """E_Q = Q minus the union of next-layer family cubes inside Q.

    The E_Q are pairwise disjoint by the layer structure; eta is the measured
    min of mu(E_Q)/mu(Q) (eta = 0 is allowed and returned)."""
    layered = layer_decompose(cubes)
    subsets: dict[DyadicCube, tuple[Interval, ...]] = {}
    eta = 1.0
    for v, layer in enumerate(layered.layers):
        next_layer = layered.layers[v + 1] if v + 1 < len(layered.layers) else ()
        for Q in layer:
            holes = [P.interval for P in next_layer if Q.contains(P)]
            eq = subtract_intervals(Q.interval, holes)
            subsets[Q] = eq
            mass = sum(m.mu(iv) for iv in eq)
            eta = min(eta, mass / m.mu(Q.interval))
    return SparseFamily(tuple(cubes), subsets, eta)


def verify_sparse(S: SparseFamily, m: BesselMeasure) -> tuple[float, DyadicCube | None]:
    """(min_Q mu(E_Q)/mu(Q), witness cube); exact disjointness check first."""
    tagged = []
    for Q in S.cubes:
        for iv in S.major_subsets.get(Q, ()):
            tagged.append((iv.a, iv.b, Q))
    tagged.sort()
    for (a1, b1, q1), (a2, b2, q2) in zip(tagged, tagged[1:]):
        if a2 < b1 - 1e-14 * max(1.0, abs(b1)):
            raise DisjointnessError(
                f"major subsets overlap: {q1} and {q2} share ({a2:g}, {min(b1, b2):g})",
                pair=(q1, q2),
            )
    eta_max, witness = math.inf, None
    for Q in S.cubes:
        mass = sum(m.mu(iv) for iv in S.major_subsets.get(Q, ()))
        ratio = mass / m.mu(Q.interval)
        if ratio < eta_max:
            eta_max, witness = ratio, Q
    return eta_max, witness


# -- level sets by Luxemburg-norm bands -------------------------------------------


def level_sets(
    cubes: Sequence[DyadicCube],
    f: FuncExpr,
    psi,
    m: BesselMeasure,
) -> tuple[dict[int, list[DyadicCube]], list[DyadicCube]]:
    """Partition cubes by bands 4^{-k-1} < ||f||_{psi,Q} <= 4^{-k}, k >= 0.

    Cubes with norm > 1 are returned separately; norm-zero cubes are dropped.
    """
    from .orlicz import luxemburg_norm

    bands: dict[int, list[DyadicCube]] = {}
    overflow: list[DyadicCube] = []
    log4 = math.log(4.0)
    for Q in cubes:
        norm = luxemburg_norm(f, psi, Q.interval, m)
        if norm == 0.0:
            continue
        if norm > 1.0 + 1e-9:
            overflow.append(Q)
            continue
        u = max(0.0, -math.log(min(norm, 1.0)) / log4)
        k = int(math.floor(u + 1e-9))
        bands.setdefault(k, []).append(Q)
    return bands, overflow


# -- family generators --------------------------------------------------------------


def random_subtree(
    root: DyadicCube, depth: int, seed: int, keep_prob: float = 0.7
) -> list[DyadicCube]:
    """Seeded random subtree of the dyadic tree under root."""
    rng = np.random.default_rng(seed)
    out, frontier = [root], [root]
    for _ in range(depth):
        nxt = []
        for Q in frontier:
            for child in Q.children():
                if rng.uniform() < keep_prob:
                    out.append(child)
                    nxt.append(child)
        frontier = nxt
    return sorted(out)


def zero_chain(levels: Sequence[int]) -> list[DyadicCube]:
    """The chain of zero-based cubes [0, 2^-j) for the given levels."""
    return [DyadicCube(j, 0) for j in sorted(levels)]


def stopping_cubes(
    f: FuncExpr,
    root: DyadicCube,
    m: BesselMeasure,
    max_level: int,
    threshold_factor: float | None = None,
) -> list[DyadicCube]:
    """Stopping-time family: starting from root, children-maximal cubes whose
    |f| mu-average exceeds threshold_factor times the parent's, recursively.

    With threshold_factor >= the parent/child measure ratio bound the selected
    children of each stopping cube occupy at most half its measure, so the
    family is 1/2-sparse via canonical_major_subsets.
    """
    if threshold_factor is None:
        threshold_factor = 2.0 * 2.0 ** (2.0 * m.lam + 1.0)
    f_abs = f.restrict(root.interval).abs()
    out = [root]
    stack = [root]
    while stack:
        Q = stack.pop()
        base = m.average(f_abs, Q.interval)
        frontier = list(Q.children())
        while frontier:
            child = frontier.pop()
            if child.level > max_level:
                continue
            avg = m.average(f_abs, child.interval)
            if avg > threshold_factor * base and base > 0.0:
                out.append(child)
                stack.append(child)
            else:
                frontier.extend(child.children() if child.level < max_level else ())
    return sorted(set(out))
