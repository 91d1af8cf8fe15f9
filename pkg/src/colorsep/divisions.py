"""(r, f(r))-divisions and uniform divisions with part sizes in [r/2, 2r]."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import InvalidGraph, InvalidParameter, ParameterOutOfWindow
from .graph import Graph
from .separators import LIPTON_TARJAN, SeparatorOracle

# a region whose boundary exceeds STEP2_FACTOR * f(r) gets re-split
STEP2_FACTOR = 3


@dataclass(frozen=True)
class Division:
    boundary: frozenset
    parts: tuple
    part_boundary: tuple
    r: int
    mode: str = "closed"
    index_sets: Optional[tuple] = None
    base: Optional["Division"] = None
    base_sequence: Optional[tuple] = None

    @property
    def t(self):
        return len(self.parts)


@dataclass
class DivisionReport:
    violations: list = field(default_factory=list)
    n: int = 0
    r: int = 0
    t: int = 0
    max_part_size: int = 0
    min_part_size: int = 0
    max_part_boundary: int = 0
    boundary_total: int = 0
    f_r: float = 0.0
    measured_c1: float = 0.0
    measured_c2: float = 0.0

    @property
    def valid(self):
        return not self.violations


def _boundary_of(g, part, boundary):
    out = set()
    for v in part:
        for u in g.adjacency[v]:
            if u in boundary:
                out.add(u)
    return frozenset(out)


def make_division(g, boundary, parts, r, mode="closed", index_sets=None, base=None, base_sequence=None):
    boundary = frozenset(boundary)
    parts = tuple(frozenset(p) for p in parts)
    pb = tuple(_boundary_of(g, p, boundary) for p in parts)
    return Division(boundary, parts, pb, r, mode, index_sets, base, base_sequence)


def rf_division(g: Graph, oracle: SeparatorOracle = LIPTON_TARJAN, r: int = 16, mode: str = "closed") -> Division:
    """Recursive (r, f(r))-division.

    ``mode="closed"`` bounds |V_i u N(V_i)| <= r; ``mode="interior"`` bounds
    |V_i| <= r (used as the base of the uniform construction).  Step one splits
    regions until they are small; step two re-splits regions whose boundary
    exceeds STEP2_FACTOR * f(r) with a separator that balances boundary
    vertices, keeping a split only if it shrinks every boundary.
    """
    if r < 1:
        raise InvalidParameter(f"r must be >= 1, got {r}")
    if mode not in ("closed", "interior"):
        raise InvalidParameter(f"unknown division mode {mode!r}")
    oracle.check_graph(g)
    n = g.vertex_count
    if n <= r:
        parts = [range(n)] if n else []
        return make_division(g, (), parts, r, mode)

    X = set()

    def too_big(region):
        if mode == "interior":
            return len(region) > r
        return len(region) + len(_boundary_of(g, region, X)) > r

    final = []
    stack = [list(range(n))]
    while stack:
        region = stack.pop()
        if not too_big(region):
            final.append(region)
            continue
        s, groups = oracle.split(g, region)
        X.update(s)
        for gr in reversed(groups):
            if gr:
                stack.append(gr)

    limit = STEP2_FACTOR * oracle.f(r)
    done = []
    queue = list(reversed(final))
    while queue:
        region = queue.pop()
        bnd = _boundary_of(g, region, X)
        if len(bnd) <= limit or len(region) <= 1:
            done.append(region)
            continue
        s, groups = oracle.split(g, list(region) + sorted(bnd), {b: 1 for b in bnd})
        rset = set(region)
        s_in = [v for v in s if v in rset]
        pieces = [[v for v in gr if v in rset] for gr in groups]
        pieces = [p for p in pieces if p]
        trial = X | set(s_in)
        if pieces and all(len(_boundary_of(g, p, trial)) < len(bnd) for p in pieces):
            X.update(s_in)
            for p in reversed(pieces):
                queue.append(p)
        else:
            done.append(region)

    done.sort(key=min)
    return make_division(g, X, done, r, mode)


def feasible_window(g: Graph, oracle: SeparatorOracle = LIPTON_TARJAN, r: int = 16, base: Division = None):
    """Return (c_star, low, high) for uniform_division at ``r``.

    ``low`` is the smallest admissible r (8) and ``high`` = n / x0 with
    x0 = 3 / c_star, where c_star = n*/n is measured on the base division.
    """
    n = g.vertex_count
    if base is None:
        base = rf_division(g, oracle, max(r // 8, 1), mode="interior")
    n_star = n - len(base.boundary)
    c_star = Fraction(n_star, n) if n else Fraction(0)
    high = n * c_star / 3 if c_star > 0 else Fraction(0)
    return c_star, 8, high


def uniform_division(g: Graph, oracle: SeparatorOracle = LIPTON_TARJAN, r: int = 16) -> Division:
    """Regroup an (r/8)-division into parts of size in [r/2, 2r].

    Step one walks the base parts from largest to smallest and puts each into
    the currently smallest group whose group count is below the cap, as long
    as that group holds at most n*/t vertices.  Step two deals the remaining
    parts round-robin.
    """
    n = g.vertex_count
    if n < 8:
        return make_division(g, (), [range(n)] if n else [], r, "uniform")
    if r < 8:
        raise ParameterOutOfWindow(f"r={r} below the lower window bound 8", bound="lower", window=(8, None))
    base = rf_division(g, oracle, r // 8, mode="interior")
    c_star, low, high = feasible_window(g, oracle, r, base)
    if c_star <= 0 or r > high:
        raise ParameterOutOfWindow(
            f"r={r} above the upper window bound n*/3={float(high):.2f}", bound="upper", window=(low, float(high))
        )

    order = sorted(range(base.t), key=lambda j: (-len(base.parts[j]), min(base.parts[j])))
    sizes = [len(base.parts[j]) for j in order]
    t = -(-sum(sizes) // r)
    groups = [[order[p] for p in gr] for gr in regroup(sizes, r)]

    parts = []
    for gr in groups:
        part = set()
        for jj in gr:
            part.update(base.parts[jj])
        parts.append(part)
    keep = [k for k in range(t) if parts[k]]
    return make_division(
        g,
        base.boundary,
        [parts[k] for k in keep],
        r,
        "uniform",
        index_sets=tuple(tuple(groups[k]) for k in keep),
        base=base,
        base_sequence=tuple(order),
    )


def regroup(sizes, r):
    """Group base parts (sizes non-increasing) into t = ceil(n*/r) groups.

    Returns one list of positions into ``sizes`` per group.  Step one gives
    the next part to the smallest group still below the count cap
    4*l*r/n* (that is 32 c_l / c* with c_l = l r / (8n) and c* = n*/n)
    while that group holds at most n*/t vertices; step two deals the rest
    round-robin in index order.
    """
    if any(a < b for a, b in zip(sizes, sizes[1:])):
        raise InvalidParameter("base part sizes must be non-increasing")
    ell = len(sizes)
    n_star = sum(sizes)
    if n_star == 0:
        return []
    t = -(-n_star // r)
    cap = Fraction(4 * ell * r, n_star)
    groups = [[] for _ in range(t)]
    gsize = [0] * t
    heap = [(0, i) for i in range(t)]
    j = 0
    while j < ell and heap:
        size, best = heap[0]
        if size * t > n_star:
            break
        heapq.heappop(heap)
        groups[best].append(j)
        gsize[best] += sizes[j]
        j += 1
        if len(groups[best]) < cap:
            heapq.heappush(heap, (gsize[best], best))
    i = 0
    while j < ell:
        groups[i].append(j)
        j += 1
        i = (i + 1) % t
    return groups


def base_order(d: Division):
    """Sizes of the base parts in the order the regrouping consumed them."""
    if d.base is None or d.base_sequence is None:
        return []
    return [len(d.base.parts[j]) for j in d.base_sequence]


def verify_division(
    g: Graph, d: Division, uniform: bool = False, f=None, mode: str = None, check_sizes: bool = True
) -> DivisionReport:
    """Recompute every division property from scratch.

    ``mode`` selects the size property when ``uniform`` is false: "closed"
    checks |V_i u N(V_i)| <= r, "interior" checks |V_i| <= r.  With
    ``check_sizes`` off only the structural properties are checked.
    """
    rep = DivisionReport(n=g.vertex_count, r=d.r, t=len(d.parts))
    if f is None:
        f = LIPTON_TARJAN.f
    mode = mode or (d.mode if d.mode in ("closed", "interior") else "closed")
    n = g.vertex_count
    owner = [-1] * n
    X = set(d.boundary)
    for v in X:
        if not (0 <= v < n):
            rep.violations.append(("out-of-range", v))
        else:
            owner[v] = -2
    for i, part in enumerate(d.parts):
        if not part:
            rep.violations.append(("empty-part", i))
        for v in part:
            if not (0 <= v < n):
                rep.violations.append(("out-of-range", v))
            elif owner[v] != -1:
                rep.violations.append(("overlap", v))
            else:
                owner[v] = i
    missing = [v for v in range(n) if owner[v] == -1]
    if missing:
        rep.violations.append(("uncovered", missing[:10], len(missing)))
    if rep.violations:
        return rep

    sizes = []
    bsizes = []
    for i, part in enumerate(d.parts):
        nb = set()
        for v in part:
            for u in g.adjacency[v]:
                if owner[u] == -2:
                    nb.add(u)
                elif owner[u] != i:
                    rep.violations.append(("parts-adjacent", i, owner[u], v, u))
        if i < len(d.part_boundary) and set(d.part_boundary[i]) != nb:
            rep.violations.append(("part-boundary-mismatch", i))
        sizes.append(len(part))
        bsizes.append(len(nb))
        if not check_sizes:
            pass
        elif uniform:
            if 2 * len(part) < d.r or len(part) > 2 * d.r:
                rep.violations.append(("part-size", i, len(part), d.r))
        elif mode == "interior":
            if len(part) > d.r:
                rep.violations.append(("part-size", i, len(part), d.r))
        elif len(part) + len(nb) > d.r:
            rep.violations.append(("closed-size", i, len(part) + len(nb), d.r))
    if len(d.part_boundary) != len(d.parts):
        rep.violations.append(("part-boundary-count", len(d.part_boundary), len(d.parts)))

    rep.max_part_size = max(sizes, default=0)
    rep.min_part_size = min(sizes, default=0)
    rep.max_part_boundary = max(bsizes, default=0)
    rep.boundary_total = len(X)
    fr = f(d.r) if d.r > 0 else 0.0
    rep.f_r = fr
    if fr > 0 and n > 0:
        rep.measured_c1 = rep.max_part_boundary / fr
        rep.measured_c2 = len(X) * d.r / (fr * n)
    return rep


# ---------------------------------------------------------------------------
# text format: "t |X| r", the X line, then one line per part


def format_division(d: Division) -> str:
    lines = [f"{d.t} {len(d.boundary)} {d.r}", " ".join(map(str, sorted(d.boundary)))]
    lines += [" ".join(map(str, sorted(p))) for p in d.parts]
    return "\n".join(lines) + "\n"


def parse_division(text: str, g: Graph = None) -> Division:
    lines = text.split("\n")
    try:
        t, nx, r = (int(x) for x in lines[0].split())
        X = [int(x) for x in lines[1].split()]
        parts = [[int(x) for x in lines[2 + i].split()] for i in range(t)]
    except (ValueError, IndexError):
        raise InvalidGraph("malformed division file") from None
    if len(X) != nx:
        raise InvalidGraph(f"division header says |X|={nx}, found {len(X)}")
    if g is None:
        pb = tuple(frozenset() for _ in parts)
        return Division(frozenset(X), tuple(frozenset(p) for p in parts), pb, r)
    return make_division(g, X, parts, r)


def read_division(path, g=None):
    with open(path) as fh:
        return parse_division(fh.read(), g)


def write_division(d: Division, path):
    with open(path, "w") as fh:
        fh.write(format_division(d))


def t_range(n_star, r):
    """Range [n*/(2r), 2n*/r + 1] that any uniform division's t must fall into."""
    return Fraction(n_star, 2 * r), Fraction(2 * n_star, r) + 1


__all__ = [
    "Division",
    "DivisionReport",
    "rf_division",
    "uniform_division",
    "verify_division",
    "feasible_window",
    "format_division",
    "parse_division",
    "read_division",
    "write_division",
    "make_division",
    "base_order",
    "t_range",
]
