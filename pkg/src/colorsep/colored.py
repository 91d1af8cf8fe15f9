"""Color-balanced divisions: two colors via prefix balancing, d colors via Steinitz chunks.

Both constructions start from a uniform division at ``r``, turn every part into
a vector of color counts scaled by 1/(2r), order the parts with the balancing
routine and merge consecutive chunks of parts into one super-part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .balancing import (
    BalancedPartition,
    WeightedVectorSet,
    balance_permutation,
    chunk_permutation,
    vector_partition_steinitz,
)
from .divisions import Division, make_division, uniform_division, verify_division
from .errors import InvalidParameter, UnbalancedInput
from .graph import Graph
from .separators import LIPTON_TARJAN, SeparatorOracle


@dataclass(frozen=True)
class ColoredDivision:
    division: Division
    partition: BalancedPartition
    # class memberships as used by the construction (after any swap)
    gamma1: frozenset
    gamma2: frozenset
    alpha: Fraction
    swapped: bool
    q: int


@dataclass
class ColoredReport:
    violations: list = field(default_factory=list)
    t: int = 0
    min_part_size: int = 0
    max_part_size: int = 0
    max_part_boundary: int = 0
    measured_c1: float = 0.0
    max_discrepancy: Fraction = Fraction(0)
    bound: Fraction = Fraction(0)
    alpha: Fraction = Fraction(0)

    @property
    def valid(self):
        return not self.violations


def _merge(g, base, chunks, r, mode):
    parts = []
    for ch in chunks:
        part = set()
        for j in ch:
            part.update(base.parts[j])
        parts.append(part)
    return make_division(g, base.boundary, parts, r, mode, index_sets=tuple(tuple(c) for c in chunks), base=base)


def _color_classes(g: Graph):
    if g.colors is None:
        raise InvalidParameter("graph carries no colors")
    if any(c not in (0, 1) for c in g.colors):
        raise InvalidParameter("two_color_division needs colors 0 and 1")
    gamma1 = frozenset(v for v in range(g.n) if g.colors[v] == 0)
    gamma2 = frozenset(v for v in range(g.n) if g.colors[v] == 1)
    return gamma1, gamma2


def two_color_division(
    g: Graph,
    oracle: SeparatorOracle = LIPTON_TARJAN,
    r: int = 16,
    q: int = 4,
    classes: Optional[tuple] = None,
    base: Optional[Division] = None,
) -> ColoredDivision:
    """Merge chunks of q' base parts so each super-part holds the two colors in
    the global ratio, up to an additive O(r).

    ``classes`` overrides the colors with an explicit pair (gamma1, gamma2) of
    disjoint vertex sets; vertices in neither class only count towards sizes.
    The labels are swapped when the first class is the larger one on the
    covered vertices, so that alpha <= 1.
    """
    if q < 1:
        raise InvalidParameter(f"q must be >= 1, got {q}")
    gamma1, gamma2 = (frozenset(c) for c in classes) if classes is not None else _color_classes(g)
    if gamma1 & gamma2:
        raise InvalidParameter("color classes overlap")
    if base is None:
        base = uniform_division(g, oracle, r)
    a = [len(p & gamma1) for p in base.parts]
    b = [len(p & gamma2) for p in base.parts]
    swapped = sum(a) > sum(b)
    if swapped:
        a, b = b, a
        gamma1, gamma2 = gamma2, gamma1
    if sum(b) == 0:
        raise UnbalancedInput("both color classes are empty on the covered vertices; |Gamma1|/|Gamma2| undefined")
    ell = base.t
    if ell < q:
        raise InvalidParameter(f"only {ell} base parts for q={q}; lower q or r")
    alpha = Fraction(sum(a), sum(b))
    scale = Fraction(1, 2 * r)
    vs = WeightedVectorSet.from_pairs([(x * scale, y * scale) for x, y in zip(a, b)], alpha=alpha)
    perm = balance_permutation(vs)
    part = chunk_permutation(perm, q, vs)
    div = _merge(g, base, part.chunks, r, "two-color")
    return ColoredDivision(div, part, gamma1, gamma2, alpha, swapped, q)


def discrepancies(cd: ColoredDivision):
    """Exact |V_i n Gamma1| - alpha |V_i n Gamma2| per super-part."""
    return [len(p & cd.gamma1) - cd.alpha * len(p & cd.gamma2) for p in cd.division.parts]


def verify_two_color(g: Graph, cd: ColoredDivision, bound=None, f=None) -> ColoredReport:
    """Check the four properties; the discrepancy bound defaults to 2r."""
    d = cd.division
    r = d.r
    rep = ColoredReport(t=d.t, alpha=cd.alpha)
    rep.bound = Fraction(2 * r) if bound is None else Fraction(bound)
    base = verify_division(g, d, f=f, check_sizes=False)
    rep.violations.extend(base.violations)
    if base.violations:
        return rep
    q_prime = cd.partition.q_prime
    sizes = [len(p) for p in d.parts]
    for i, s in enumerate(sizes):
        if 2 * s < q_prime * r or s > 2 * (q_prime + 1) * r:
            rep.violations.append(("part-size", i, s, q_prime, r))
    rep.min_part_size, rep.max_part_size = min(sizes), max(sizes)
    rep.max_part_boundary = base.max_part_boundary
    if base.f_r > 0:
        rep.measured_c1 = base.max_part_boundary / (cd.q * base.f_r)
    for i, x in enumerate(discrepancies(cd)):
        if abs(x) > rep.max_discrepancy:
            rep.max_discrepancy = abs(x)
        if abs(x) > rep.bound:
            rep.violations.append(("discrepancy", i, x, rep.bound))
    return rep


# ---------------------------------------------------------------------------
# d colors


@dataclass(frozen=True)
class DColorDivision:
    division: Division
    partition: BalancedPartition
    d: int
    # covered vertices of each color, |Z_q|
    color_totals: tuple


@dataclass
class DColorReport:
    violations: list = field(default_factory=list)
    t: int = 0
    min_part_size: int = 0
    max_part_size: int = 0
    max_part_boundary: int = 0
    measured_c1: float = 0.0
    max_deviation: Fraction = Fraction(0)
    bound: Fraction = Fraction(0)

    @property
    def valid(self):
        return not self.violations


def d_color_division(
    g: Graph, oracle: SeparatorOracle = LIPTON_TARJAN, r: int = 16, base: Optional[Division] = None
) -> DColorDivision:
    """Merge base parts into k = ceil(l/r) super-parts so that every color is
    spread evenly: each part's count vector is scaled by 1/(2r) and the parts
    are cut into consecutive Steinitz segments."""
    if g.colors is None:
        raise InvalidParameter("graph carries no colors")
    d = max(g.num_colors, max(g.colors, default=-1) + 1, 1)
    if base is None:
        base = uniform_division(g, oracle, r)
    ell = base.t
    if ell == 0:
        raise InvalidParameter("empty graph")
    counts = []
    for p in base.parts:
        row = [0] * d
        for v in p:
            row[g.colors[v]] += 1
        counts.append(row)
    scale = Fraction(1, 2 * r)
    vectors = [tuple(x * scale for x in row) for row in counts]
    k = -(-ell // r)
    part = vector_partition_steinitz(vectors, k)
    div = _merge(g, base, part.chunks, r, "d-color")
    totals = tuple(sum(row[c] for row in counts) for c in range(d))
    return DColorDivision(div, part, d, totals)


def deviations(g: Graph, dd: DColorDivision):
    """Per super-part and color: |V_i n Z_q| - |Z_q| / t, exact."""
    t = dd.division.t
    out = []
    for p in dd.division.parts:
        row = [0] * dd.d
        for v in p:
            row[g.colors[v]] += 1
        out.append(tuple(row[c] - Fraction(dd.color_totals[c], t) for c in range(dd.d)))
    return out


def verify_d_color(g: Graph, dd: DColorDivision, bound=None, f=None) -> DColorReport:
    """Check disjointness and boundaries, and the per-color deviation (default bound 4rd)."""
    d = dd.division
    r = d.r
    rep = DColorReport(t=d.t)
    rep.bound = Fraction(4 * r * dd.d) if bound is None else Fraction(bound)
    base = verify_division(g, d, f=f, check_sizes=False)
    rep.violations.extend(base.violations)
    if base.violations:
        return rep
    sizes = [len(p) for p in d.parts]
    rep.min_part_size, rep.max_part_size = min(sizes), max(sizes)
    rep.max_part_boundary = base.max_part_boundary
    if base.f_r > 0:
        rep.measured_c1 = base.max_part_boundary / (r * base.f_r)
    for i, row in enumerate(deviations(g, dd)):
        for c, x in enumerate(row):
            rep.max_deviation = max(rep.max_deviation, abs(x))
            if abs(x) > rep.bound:
                rep.violations.append(("color-deviation", i, c, x, rep.bound))
    return rep


# ---------------------------------------------------------------------------
# recomputation from a bare Division (used by the CLI verifier)


def recheck_two_color(g: Graph, d: Division, bound=None):
    """Return (max discrepancy, bound, violations) recomputed from colors alone.

    alpha is |Gamma1|/|Gamma2| over the covered vertices, with the labels
    ordered so that alpha <= 1.
    """
    if g.colors is None:
        raise InvalidParameter("graph carries no colors")
    counts = [(sum(1 for v in p if g.colors[v] == 0), sum(1 for v in p if g.colors[v] == 1)) for p in d.parts]
    a = sum(x for x, _ in counts)
    b = sum(y for _, y in counts)
    if a > b:
        counts = [(y, x) for x, y in counts]
        a, b = b, a
    if b == 0:
        raise UnbalancedInput("no colored vertex is covered")
    alpha = Fraction(a, b)
    bound = Fraction(2 * d.r) if bound is None else Fraction(bound)
    worst = Fraction(0)
    out = []
    for i, (x, y) in enumerate(counts):
        disc = x - alpha * y
        worst = max(worst, abs(disc))
        if abs(disc) > bound:
            out.append(("discrepancy", i, disc, bound))
    return worst, bound, out


def recheck_d_color(g: Graph, d: Division, bound=None):
    """Return (max deviation, bound, violations) against covered counts / t."""
    if g.colors is None:
        raise InvalidParameter("graph carries no colors")
    k = max(g.num_colors, max(g.colors, default=-1) + 1, 1)
    rows = []
    for p in d.parts:
        row = [0] * k
        for v in p:
            row[g.colors[v]] += 1
        rows.append(row)
    totals = [sum(r[c] for r in rows) for c in range(k)]
    t = len(rows)
    bound = Fraction(4 * d.r * k) if bound is None else Fraction(bound)
    worst = Fraction(0)
    out = []
    for i, row in enumerate(rows):
        for c in range(k):
            dev = row[c] - Fraction(totals[c], t)
            worst = max(worst, abs(dev))
            if abs(dev) > bound:
                out.append(("color-deviation", i, c, dev, bound))
    return worst, bound, out
