"""Balanced vertex separators for embedded planar graphs.

Two oracles share one contract: ``split(g, vertices, weights)`` returns a
separator S and a list of vertex groups that are pairwise non-adjacent once S
is removed, each group carrying at most ``alpha`` of the total weight.  The
public ``Separation`` packs those groups into two sides.

The planar oracle follows Lipton and Tarjan: BFS levels first, and only when
the levels alone cannot balance the graph, a fundamental cycle of the BFS tree
in a triangulation of the middle levels.  Inside/outside weights of every
fundamental cycle are computed exactly through the dual spanning tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import (
    NotFound,
    OracleFailure,
    RejectsMissingEmbedding,
    RejectsNonPlanar,
    SizeLimitExceeded,
)
from .graph import Graph, connected_components, validate_graph

TWO_THIRDS = Fraction(2, 3)
C_LT = 2 * math.sqrt(2)
EXHAUSTIVE_LIMIT = 20


@dataclass(frozen=True)
class Separation:
    separator: frozenset
    side_a: frozenset
    side_b: frozenset
    alpha: Fraction


def check_separation(g: Graph, sep: Separation, vertices=None):
    """Recompute the three separation invariants; returns a list of violations."""
    universe = set(range(g.vertex_count)) if vertices is None else set(vertices)
    n = len(universe)
    problems = []
    s, a, b = set(sep.separator), set(sep.side_a), set(sep.side_b)
    if s & a or s & b or a & b:
        problems.append(("overlap",))
    if s | a | b != universe:
        problems.append(("not-a-partition", sorted(universe ^ (s | a | b))))
    for u in a:
        for v in g.adjacency[u]:
            if v in b:
                problems.append(("edge-across", u, v))
    alpha = Fraction(sep.alpha)
    for name, side in (("side_a", a), ("side_b", b)):
        if len(side) * alpha.denominator > alpha.numerator * n:
            problems.append(("unbalanced", name, len(side), n))
    return problems


def pack_groups(groups, weight_of):
    """Pack non-adjacent groups into two sides.

    If every group carries at most 2/3 of the total weight T, both sides end
    up with at most 2T/3: a group of weight >= T/3 goes alone, otherwise
    greedy placement into the lighter side leaves the heavier one below
    T/2 + T/6.
    """
    items = sorted(((weight_of(gr), gr) for gr in groups if gr), key=lambda it: (-it[0], it[1][0]))
    total = sum(w for w, _ in items)
    side_a, side_b = [], []
    if not items:
        return side_a, side_b
    if 3 * items[0][0] >= total:
        side_a.extend(items[0][1])
        for _, gr in items[1:]:
            side_b.extend(gr)
        return side_a, side_b
    wa = wb = 0
    for w, gr in items:
        if wa <= wb:
            side_a.extend(gr)
            wa += w
        else:
            side_b.extend(gr)
            wb += w
    return side_a, side_b


def _weight_fn(weights):
    if weights is None:
        return len
    return lambda vs: sum(weights.get(v, 0) for v in vs)


class SeparatorOracle:
    """Separator procedure plus the size bound f(n) = c * n^(1 - delta)."""

    name = "abstract"
    alpha = TWO_THIRDS
    c = C_LT
    delta = 0.5
    n0 = 2

    def f(self, n):
        return self.c * float(n) ** (1.0 - self.delta)

    def split_component(self, g, comp, weights, ladj=None):
        """Split one connected component; ``ladj`` is its local adjacency
        (rotation order when available) indexed by position in ``comp``."""
        raise NotImplementedError

    def check_graph(self, g):
        pass

    def split(self, g: Graph, vertices=None, weights=None):
        """Separate the subgraph induced by ``vertices``.

        Returns ``(S, groups)``; each group weighs at most 2/3 of the total.
        ``weights`` maps vertex -> nonnegative int (default: unit weights).
        """
        verts = list(range(g.vertex_count)) if vertices is None else sorted(set(vertices))
        if not verts:
            return [], []
        src = g.rotation if g.rotation is not None else g.adjacency
        if vertices is None:
            ladj = [list(r) for r in src]
        else:
            local = {v: i for i, v in enumerate(verts)}
            ladj = [[local[u] for u in src[v] if u in local] for v in verts]
        comps_local = _local_components(ladj, range(len(verts)))
        comps = [[verts[x] for x in c] for c in comps_local]
        weigh = _weight_fn(weights)
        cw = [weigh(c) for c in comps]
        total = sum(cw)
        if total == 0:
            return [], comps
        hi = max(range(len(comps)), key=lambda i: (cw[i], -comps[i][0]))
        heavy = comps[hi]
        if 3 * cw[hi] <= 2 * total:
            return [], comps
        if len(heavy) <= self.n0:
            if weights is None:
                pick = heavy[0]
            else:
                pick = max(heavy, key=lambda v: (weights.get(v, 0), -v))
            s, groups = [pick], [[v] for v in heavy if v != pick]
        else:
            if len(comps) == 1:
                sub = ladj
            else:
                pos = {x: i for i, x in enumerate(comps_local[hi])}
                sub = [[pos[y] for y in ladj[x]] for x in comps_local[hi]]
            s, groups = self.split_component(g, heavy, weights, sub)
        groups = groups + [c for i, c in enumerate(comps) if i != hi]
        for gr in groups:
            if 3 * weigh(gr) > 2 * total:
                raise OracleFailure(f"{self.name}: group of weight {weigh(gr)} exceeds 2/3 of {total}")
        return s, groups

    def __call__(self, g: Graph) -> Separation:
        self.check_graph(g)
        s, groups = self.split(g)
        a, b = pack_groups(groups, len)
        return Separation(frozenset(s), frozenset(a), frozenset(b), self.alpha)


class LiptonTarjanOracle(SeparatorOracle):
    name = "lipton-tarjan"

    def check_graph(self, g):
        if g.rotation is None:
            raise RejectsMissingEmbedding("lipton-tarjan separator needs a rotation system")
        rep = validate_graph(g)
        if not rep.valid:
            kinds = {v[0] for v in rep.violations}
            if "euler" in kinds:
                raise RejectsNonPlanar(f"rotation system is not planar: {rep.violations[:3]}")
            raise RejectsNonPlanar(f"invalid rotation system: {rep.violations[:3]}")

    def split_component(self, g, comp, weights, ladj=None):
        if g.rotation is None:
            raise RejectsMissingEmbedding("lipton-tarjan separator needs a rotation system")
        return _lt_component(g, comp, weights, self.c, ladj)


class ExhaustiveOracle(SeparatorOracle):
    name = "exhaustive"

    def split_component(self, g, comp, weights, ladj=None):
        if len(comp) > EXHAUSTIVE_LIMIT:
            raise SizeLimitExceeded(f"exhaustive oracle limited to {EXHAUSTIVE_LIMIT} vertices, got {len(comp)}")
        s, groups = _exhaustive_search(g, comp, weights, TWO_THIRDS, len(comp))
        return s, groups


LIPTON_TARJAN = LiptonTarjanOracle()
EXHAUSTIVE = ExhaustiveOracle()
ORACLES = {"lipton-tarjan": LIPTON_TARJAN, "exhaustive": EXHAUSTIVE}


def lipton_tarjan_separator(g: Graph) -> Separation:
    """Planar separator with alpha = 2/3 and |S| <= 2*sqrt(2)*sqrt(n)."""
    return LIPTON_TARJAN(g)


def exhaustive_separator(g: Graph, size_budget: int, alpha=TWO_THIRDS) -> Separation:
    """Minimum-cardinality alpha-balanced separator by enumeration (n <= 20).

    Among separators of minimum size the most balanced one wins, then the
    lexicographically smallest.
    """
    if g.vertex_count > EXHAUSTIVE_LIMIT:
        raise SizeLimitExceeded(f"exhaustive search limited to {EXHAUSTIVE_LIMIT} vertices")
    alpha = Fraction(alpha)
    s, groups = _exhaustive_search(g, list(range(g.vertex_count)), None, alpha, size_budget)
    side_a, side_b = _best_bipartition(groups, len, alpha, g.vertex_count)
    return Separation(frozenset(s), frozenset(side_a), frozenset(side_b), alpha)


def _best_bipartition(groups, weigh, alpha, total):
    """Subset-sum split of groups minimising the heavier side; None if > alpha*total."""
    reach = {0: ()}
    for idx, gr in enumerate(groups):
        w = weigh(gr)
        for s, chosen in sorted(reach.items()):
            if s + w not in reach:
                reach[s + w] = chosen + (idx,)
    tot = sum(weigh(gr) for gr in groups)
    best = None
    for s in sorted(reach):
        heavier = max(s, tot - s)
        if best is None or heavier < best[0]:
            best = (heavier, s)
    heavier, s = best
    if heavier * alpha.denominator > alpha.numerator * total:
        return None
    chosen = set(reach[s])
    side_a = [v for i, gr in enumerate(groups) if i in chosen for v in gr]
    side_b = [v for i, gr in enumerate(groups) if i not in chosen for v in gr]
    return side_a, side_b


def _exhaustive_search(g, comp, weights, alpha, size_budget):
    weigh = _weight_fn(weights)
    total = weigh(comp)
    for size in range(0, min(size_budget, len(comp)) + 1):
        best = None
        for cand in combinations(comp, size):
            rest = set(comp) - set(cand)
            groups = connected_components(g, rest)
            split = _best_bipartition(groups, weigh, alpha, total)
            if split is None:
                continue
            key = max(weigh(split[0]), weigh(split[1]))
            if best is None or key < best[0]:
                best = (key, list(cand), groups)
        if best is not None:
            return best[1], best[2]
    raise NotFound(f"no {alpha}-balanced separator with at most {size_budget} vertices")


# ---------------------------------------------------------------------------
# Lipton-Tarjan on one connected component


def _lt_component(g, comp, weights, c_bound, rot=None):
    n = len(comp)
    if rot is None:
        local = {v: i for i, v in enumerate(comp)}
        rot = [[local[u] for u in g.rotation[v] if u in local] for v in comp]
    if weights is None:
        w = [1] * n
    else:
        w = [weights.get(v, 0) for v in comp]
    total = sum(w)

    parent = [-1] * n
    depth = [-1] * n
    depth[0] = 0
    levels = [[0]]
    frontier = [0]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for x in frontier:
            for y in rot[x]:
                if depth[y] < 0:
                    depth[y] = d
                    parent[y] = x
                    nxt.append(y)
        if nxt:
            levels.append(nxt)
        frontier = nxt
    nlev = len(levels)
    if weights is None:
        lw = [len(lev) for lev in levels]
    else:
        lw = [sum(w[x] for x in lev) for lev in levels]
    before = [0] * (nlev + 1)
    for i in range(nlev):
        before[i + 1] = before[i] + lw[i]

    def glob(vs):
        return [comp[x] for x in vs]

    def lev_range(lo, hi):
        return [x for l in range(max(lo, 0), min(hi, nlev)) for x in levels[l]]

    # single BFS level
    best = None
    for l in range(nlev):
        wb, wa = before[l], total - before[l + 1]
        if 3 * wb <= 2 * total and 3 * wa <= 2 * total:
            key = (len(levels[l]), max(wb, wa), l)
            if best is None or key < best:
                best = key
    if best is not None and best[0] <= c_bound * math.sqrt(n):
        l = best[2]
        groups = [gr for gr in (lev_range(0, l), lev_range(l + 1, nlev)) if gr]
        return glob(levels[l]), [glob(gr) for gr in groups]

    def size(l):
        return len(levels[l]) if 0 <= l < nlev else 0

    l1 = next(l for l in range(nlev) if 2 * before[l + 1] > total)
    k = len(lev_range(0, l1 + 1))
    cands0 = [(size(l) + 2 * (l1 - l), -l) for l in range(-1, l1 + 1)]
    ok0 = [cd for cd in cands0 if cd[0] * cd[0] <= 4 * k]
    l0 = -min(ok0 or cands0)[1]
    cands2 = [(size(l) + 2 * (l - l1 - 1), l) for l in range(l1 + 1, nlev + 1)]
    ok2 = [cd for cd in cands2 if cd[0] * cd[0] <= 4 * (n - k)]
    l2 = min(ok2 or cands2)[1]

    sep = lev_range(l0, l0 + 1) + lev_range(l2, l2 + 1)
    first = lev_range(0, l0)
    middle = lev_range(l0 + 1, l2)
    last = lev_range(l2 + 1, nlev)
    wmid = sum(w[x] for x in middle)
    if 3 * wmid <= 2 * total:
        groups = [gr for gr in (first, middle, last) if gr]
        return glob(sep), [glob(gr) for gr in groups]

    is_mid = [False] * n
    for x in middle:
        is_mid[x] = True
    wm = [w[x] if is_mid[x] else 0 for x in range(n)]
    cycle = _best_fundamental_cycle(n, rot, parent, depth, l2 - 1, wm)
    sep_set = set(sep)
    sep_set.update(x for x in cycle if is_mid[x])
    rest = [x for x in middle if x not in sep_set]
    pieces = _local_components(rot, rest)
    groups = [gr for gr in [first, last] + pieces if gr]
    return glob(sorted(sep_set)), [glob(gr) for gr in groups]


def _local_components(rot, verts):
    """Components of the local graph restricted to ``verts`` (sorted lists)."""
    verts = list(verts)
    allowed = [False] * len(rot)
    for v in verts:
        allowed[v] = True
    seen = [False] * len(rot)
    out = []
    for s in verts:
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        i = 0
        while i < len(comp):
            x = comp[i]
            i += 1
            for y in rot[x]:
                if allowed[y] and not seen[y]:
                    seen[y] = True
                    comp.append(y)
        comp.sort()
        out.append(comp)
    return out


@dataclass
class CycleCandidates:
    """Per non-tree edge data for the fundamental-cycle phase (exposed for tests)."""

    u: np.ndarray
    v: np.ndarray
    inside_right: np.ndarray
    inside_left: np.ndarray
    cycle_weight: np.ndarray
    right_faces: list
    parent: np.ndarray
    n_real: int
    # half-edge (a, b) whose face lies right of u->v; for a dummy u it is the
    # face-walk edge leaving v
    right_half: list
    # for a dummy u: the face-walk edge entering v (names the spoke d-v)
    spoke_key: list
    # per dummy: the face-walk edge entering its tree parent
    dummy_anchor: list


def _best_fundamental_cycle(n, rot, parent, depth, max_depth, wm):
    cand = fundamental_cycle_candidates(n, rot, parent, depth, max_depth, wm)
    if cand is None:
        return [0]
    score = np.maximum(cand.inside_right, cand.inside_left)
    j = int(np.argmin(score))
    return _tree_cycle(cand.parent, int(cand.u[j]), int(cand.v[j]), cand.n_real)


def _tree_cycle(par, u, v, n_real):
    anc = []
    x = u
    while True:
        anc.append(x)
        if par[x] == x:
            break
        x = int(par[x])
    seen = {x: i for i, x in enumerate(anc)}
    path_v = []
    y = v
    while y not in seen:
        path_v.append(y)
        y = int(par[y])
    cyc = anc[: seen[y] + 1] + path_v
    return [x for x in cyc if x < n_real]


def fundamental_cycle_candidates(n, rot, parent, depth, max_depth, wm) -> Optional[CycleCandidates]:
    """Score every fundamental cycle of the BFS tree restricted to depth <= max_depth.

    The restricted graph is triangulated by placing a dummy vertex of weight 0
    inside every non-triangular face.  For each non-tree edge u->v the exact
    weight strictly on each side of its fundamental cycle is returned; the
    "right" side is the one containing the face to the right of u->v.
    """
    inh = [depth[x] <= max_depth for x in range(n)]
    hrot = [[y for y in rot[x] if inh[y]] if inh[x] else [] for x in range(n)]
    hpos = [{y: i for i, y in enumerate(r)} for r in hrot]
    off = [0] * (n + 1)
    for x in range(n):
        off[x + 1] = off[x] + len(hrot[x])
    m2 = off[n]
    if m2 == 0:
        return None
    tail = [0] * m2
    head = [0] * m2
    for x in range(n):
        base = off[x]
        for i, y in enumerate(hrot[x]):
            tail[base + i] = x
            head[base + i] = y

    face_of = [-1] * m2
    faces = []
    for h0 in range(m2):
        if face_of[h0] >= 0:
            continue
        fid = len(faces)
        walk = []
        h = h0
        while face_of[h] < 0:
            face_of[h] = fid
            walk.append(h)
            x, y = tail[h], head[h]
            ry = hpos[y]
            h = off[y] + (ry[x] + 1) % len(hrot[y])
        faces.append(walk)

    # extended tree over real vertices then dummies
    ext_parent = [parent[x] if parent[x] >= 0 else x for x in range(n)]
    ext_depth = list(depth)
    ext_w = list(wm)
    ppos = [0.0] * n  # position of the edge to child x inside parent's rotation
    refpos = [0.0] * n  # position of the reference edge at x
    for x in range(n):
        if inh[x] and parent[x] >= 0:
            ppos[x] = float(hpos[parent[x]][x])
            refpos[x] = float(hpos[x][parent[x]])

    tri_of_he = [-1] * m2
    ntri = 0
    nt_u, nt_v, nt_rt, nt_lt, nt_pu, nt_pv = [], [], [], [], [], []
    right_half, spoke_key, dummy_anchor = [], [], []
    for walk in faces:
        L = len(walk)
        if L == 3:
            for h in walk:
                tri_of_he[h] = ntri
            ntri += 1
            continue
        d = len(ext_parent)
        t0 = ntri
        ntri += L
        for i, h in enumerate(walk):
            tri_of_he[h] = t0 + i
        w0 = tail[walk[0]]
        prev_tail = tail[walk[-1]]
        p0 = hpos[w0][prev_tail] + 0.5
        ext_parent.append(w0)
        ext_depth.append(ext_depth[w0] + 1)
        ext_w.append(0)
        ppos.append(p0)
        refpos.append(0.0)
        dummy_anchor.append((tail[walk[-1]], head[walk[-1]]))
        for i in range(1, L):
            wi = tail[walk[i]]
            wprev = tail[walk[i - 1]]
            nt_u.append(d)
            nt_v.append(wi)
            nt_rt.append(t0 + i)
            nt_lt.append(t0 + i - 1)
            nt_pu.append(0.0)
            nt_pv.append(hpos[wi][wprev] + 0.5)
            right_half.append((tail[walk[i]], head[walk[i]]))
            spoke_key.append((tail[walk[i - 1]], head[walk[i - 1]]))

    for x in range(n):
        if not inh[x]:
            continue
        base = off[x]
        for i, y in enumerate(hrot[x]):
            if y < x or parent[y] == x or parent[x] == y:
                continue
            h = base + i
            nt_u.append(x)
            nt_v.append(y)
            nt_rt.append(tri_of_he[h])
            nt_lt.append(tri_of_he[off[y] + hpos[y][x]])
            nt_pu.append(float(i))
            nt_pv.append(float(hpos[y][x]))
            right_half.append((x, y))
            spoke_key.append(None)

    n_ext = len(ext_parent)
    n_nt = len(nt_u)
    if n_nt != ntri - 1:
        raise OracleFailure(f"dual of the cotree is not a tree: {n_nt} edges, {ntri} triangles")

    # root of the real tree gets its reference edge at rotation position 0
    root = 0
    assigned = [0] * ntri
    for x in range(n):
        if not inh[x] or wm[x] == 0:
            continue
        if parent[x] >= 0:
            p = parent[x]
            h = off[p] + hpos[p][x]
        else:
            y = hrot[x][0]
            h = off[y] + hpos[y][x]
        assigned[tri_of_he[h]] += wm[x]
    total_mid = sum(assigned)

    dadj = [[] for _ in range(ntri)]
    for j in range(n_nt):
        dadj[nt_rt[j]].append((nt_lt[j], j))
        dadj[nt_lt[j]].append((nt_rt[j], j))
    tpar = [-1] * ntri
    tpar_edge = [-1] * ntri
    seen = [False] * ntri
    seen[0] = True
    order = [0]
    for t in order:
        for s, j in dadj[t]:
            if not seen[s]:
                seen[s] = True
                tpar[s] = t
                tpar_edge[s] = j
                order.append(s)
    if len(order) != ntri:
        raise OracleFailure("dual cotree is disconnected")
    sub = list(assigned)
    for t in reversed(order[1:]):
        sub[tpar[t]] += sub[t]
    right_faces = [0] * n_nt
    for j in range(n_nt):
        rt, lt = nt_rt[j], nt_lt[j]
        if tpar_edge[rt] == j and tpar[rt] == lt:
            right_faces[j] = sub[rt]
        else:
            right_faces[j] = total_mid - sub[lt]

    par = np.asarray(ext_parent, dtype=np.int64)
    dep = np.asarray(ext_depth, dtype=np.int64)
    U = np.asarray(nt_u, dtype=np.int64)
    V = np.asarray(nt_v, dtype=np.int64)
    lca, cu, cv = _lca_batch(par, dep, U, V)

    wts = np.asarray(ext_w, dtype=np.int64)
    pw = np.zeros(n_ext, dtype=np.int64)
    for x in sorted(range(n_ext), key=lambda z: ext_depth[z]):
        pw[x] = wts[x] + (pw[ext_parent[x]] if ext_parent[x] != x else 0)

    ppos_a = np.asarray(ppos)
    refpos_a = np.asarray(refpos)
    pu = np.asarray(nt_pu)
    pv = np.asarray(nt_pv)
    arrive = np.where(V == lca, pv, ppos_a[cv])
    depart = np.where(U == lca, pu, ppos_a[cu])
    ref = refpos_a[lca]
    in_arc = np.where(arrive < depart, (arrive <= ref) & (ref < depart), (ref >= arrive) | (ref < depart))
    wl = wts[lca]
    cyc_r = pw[U] - pw[lca] + np.where(in_arc, wl, 0)
    cyc_l = pw[V] - pw[lca] + np.where(in_arc, 0, wl)
    rf = np.asarray(right_faces, dtype=np.int64)
    inside_right = rf - cyc_r
    inside_left = (total_mid - rf) - cyc_l
    cycle_weight = pw[U] + pw[V] - 2 * pw[lca] + wl
    return CycleCandidates(
        U, V, inside_right, inside_left, cycle_weight, right_faces, par, n, right_half, spoke_key, dummy_anchor
    )


def _lca_batch(par, dep, U, V):
    """Vectorised binary-lifting LCA; also returns the children of the LCA on
    the paths towards U and V (meaningless where U or V is the LCA)."""
    maxd = int(dep.max()) if len(dep) else 0
    log = max(1, maxd.bit_length())
    up = [par]
    for _ in range(1, log):
        up.append(up[-1][up[-1]])

    def lift(x, k):
        for j in range(log):
            x = np.where((k >> j) & 1, up[j][x], x)
        return x

    a, b = U.copy(), V.copy()
    swap = dep[a] < dep[b]
    a, b = np.where(swap, b, a), np.where(swap, a, b)
    a = lift(a, dep[a] - dep[b])
    for j in reversed(range(log)):
        ua, ub = up[j][a], up[j][b]
        diff = ua != ub
        a = np.where(diff, ua, a)
        b = np.where(diff, ub, b)
    lca = np.where(a == b, a, par[a])
    cu = lift(U, np.maximum(dep[U] - dep[lca] - 1, 0))
    cv = lift(V, np.maximum(dep[V] - dep[lca] - 1, 0))
    return lca, cu, cv
