"""Replay of the local-search analysis on a concrete pair of solutions.

Given a solution A and a reference solution O the replay rebuilds every object
of the swap argument: the exchange graph, its color-balanced division with O
and A as the two classes, the disregarded elements Z, the lost and won sets
L_i and W_i, the greedy order over each extended part, and one candidate swap
per part.  All counts are exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..colored import ColoredDivision, two_color_division
from ..divisions import uniform_division
from ..errors import InvalidParameter
from ..separators import LIPTON_TARJAN, SeparatorOracle
from .exchange import ExchangeGraph, exchange_violations
from .instance import CoverageInstance
from .solvers import SwapMove


@dataclass
class PartReplay:
    index: int
    A_i: tuple
    O_i: tuple
    N_O: tuple  # O-nodes of the boundary next to the part, after augmentation
    O_bar: tuple
    lost: int
    won: int
    order: tuple  # S_1, S_2, ... as family indices
    gains: tuple  # marginal gain of each S_j over Z_i and the earlier ones
    prefix_cover: tuple  # |(S_1 u .. u S_j) \ Z_i|
    eq3_ok: bool
    order_ok: bool
    ratio: Optional[Fraction]  # |L_i| / |W_i|, None when W_i is empty
    eq1_holds: bool
    candidate: Optional[SwapMove]  # gain measured on the original instance


@dataclass
class AnalysisReplay:
    b: int
    r: int
    q: int
    common: tuple
    alg: int  # coverage of A after removing A n O and its elements
    opt: int
    exchange: Optional[ExchangeGraph] = None
    division: Optional[ColoredDivision] = None
    exchange_violations: list = field(default_factory=list)
    augmented: list = field(default_factory=list)  # (O-node family index, part index)
    capacity: int = 0
    overflow: int = 0
    c1: float = 0.0
    c2: float = 0.0
    threshold: float = 0.0
    z: int = 0
    z_formula: int = 0
    parts: list = field(default_factory=list)
    sum_lost: int = 0
    sum_won: int = 0
    best_swap: Optional[SwapMove] = None
    best_part: Optional[int] = None

    @property
    def lost_claim(self):
        return self.sum_lost <= self.alg - self.z

    @property
    def won_claim(self):
        return self.sum_won >= self.opt - self.z

    @property
    def eq3_ok(self):
        return all(p.eq3_ok for p in self.parts)

    @property
    def order_ok(self):
        return all(p.order_ok for p in self.parts)

    @property
    def ok(self):
        return self.lost_claim and self.won_claim and self.eq3_ok and self.order_ok and not self.exchange_violations


def _union(fam, idx, drop=0):
    mask = 0
    for i in idx:
        mask |= fam[i]
    return mask & ~drop


def _greedy_order(fam, sets, z_i, removed):
    remaining = sorted(sets)
    covered = z_i | removed
    order, gains = [], []
    while remaining:
        best, best_gain = None, -1
        for s in remaining:
            gain = (fam[s] & ~covered).bit_count()
            if gain > best_gain:
                best, best_gain = s, gain
        remaining.remove(best)
        order.append(best)
        gains.append(best_gain)
        covered |= fam[best]
    return order, gains


def analysis_replay(
    inst: CoverageInstance,
    A,
    O,
    provider,
    b: int,
    r: Optional[int] = None,
    q: Optional[int] = None,
    oracle: SeparatorOracle = LIPTON_TARJAN,
) -> AnalysisReplay:
    """Rebuild the swap argument for solutions A and O.

    ``r`` and ``q`` default to b.  The number of merged chunks q is lowered to
    the number of base parts when the exchange graph is too small for q.
    """
    if b < 1:
        raise InvalidParameter(f"b must be >= 1, got {b}")
    r = b if r is None else r
    q = b if q is None else q
    fam = inst.family
    A_full = tuple(sorted(set(A)))
    common = tuple(sorted(set(A) & set(O)))
    removed = _union(fam, common)
    A2 = [i for i in A_full if i not in set(common)]
    O2 = sorted(set(O) - set(common))
    alg = _union(fam, A2, removed).bit_count()
    opt = _union(fam, O2, removed).bit_count()
    rep = AnalysisReplay(b, r, q, common, alg, opt)
    if not A2 and not O2:
        return rep

    h = provider(A2, O2)
    rep.exchange = h
    reduced = CoverageInstance(inst.universe_size, tuple(s & ~removed for s in fam), inst.budget)
    rep.exchange_violations = exchange_violations(reduced, A2, O2, h)
    g = h.graph
    o_local = frozenset(h.local_ids("O"))
    a_local = frozenset(h.local_ids("A"))
    base = uniform_division(g, oracle, r)
    q_used = max(1, min(q, base.t))
    rep.q = q_used
    cd = two_color_division(g, oracle, r, q_used, classes=(o_local, a_local), base=base)
    rep.division = cd
    div = cd.division
    t = div.t
    X = div.boundary

    f_r = oracle.f(r)
    f_b = oracle.f(b)
    n = g.n
    max_pb = max((len(pb) for pb in div.part_boundary), default=0)
    rep.c1 = max_pb / (q_used * f_r) if f_r > 0 else 0.0
    rep.c2 = len(X) * r / (f_r * n) if f_r > 0 and n else 0.0
    rep.threshold = 1.0 - 28.0 * rep.c1 * rep.c2 * f_b / b
    rep.capacity = max(1, math.ceil(4 * rep.c1 * rep.c2 * f_r * r))

    # N_i^O and the round-robin augmentation for O-nodes of X next to no part
    n_o = [set(v for v in div.part_boundary[i] if v in o_local) for i in range(t)]
    reached = set().union(*n_o) if n_o else set()
    load = [0] * t
    ptr = 0
    for x in sorted(v for v in X if v in o_local and v not in reached):
        target = None
        for step in range(t):
            i = (ptr + step) % t
            if load[i] < rep.capacity:
                target = i
                break
        if target is None:
            target = ptr % t
            rep.overflow += 1
        load[target] += 1
        n_o[target].add(x)
        rep.augmented.append((h.nodes[x], target))
        ptr = target + 1

    parts_A = [[h.nodes[v] for v in sorted(p) if v in a_local] for p in div.parts]
    parts_O = [[h.nodes[v] for v in sorted(p) if v in o_local] for p in div.parts]
    a_in_x = [h.nodes[v] for v in sorted(X) if v in a_local]
    cover_A = [_union(fam, ai, removed) for ai in parts_A]
    cover_X = _union(fam, a_in_x, removed)

    # Z: elements of union(A) not covered exclusively by the sets of one A_i
    seen = multi = 0
    for m in cover_A:
        multi |= seen & m
        seen |= m
    z = multi | cover_X
    rep.z = z.bit_count()
    # the literal definition: u in S n S' with S in A_i, S' in A \ A_i
    prefix = [0]
    for m in cover_A:
        prefix.append(prefix[-1] | m)
    suffix = [0] * (t + 1)
    for i in range(t - 1, -1, -1):
        suffix[i] = suffix[i + 1] | cover_A[i]
    z_formula = 0
    others = []
    for i in range(t):
        other = prefix[i] | suffix[i + 1] | cover_X
        others.append(other)
        z_formula |= cover_A[i] & other
    rep.z_formula = z_formula.bit_count()

    A_cov = inst.coverage(A_full)
    A_set = set(A_full)
    for i in range(t):
        o_bar = sorted(set(parts_O[i]) | {h.nodes[v] for v in n_o[i]})
        z_i = others[i]
        lost = (cover_A[i] & ~z).bit_count()
        won_mask = _union(fam, o_bar, removed) & ~z_i
        won = won_mask.bit_count()
        order, gains = _greedy_order(fam, o_bar, z_i, removed)
        pref, acc = [], 0
        for s in order:
            acc |= fam[s] & ~removed & ~z_i
            pref.append(acc.bit_count())
        eq3 = all(c * len(o_bar) >= (j + 1) * won for j, c in enumerate(pref))
        order_ok = all(x >= y for x, y in zip(gains, gains[1:]))
        ratio = Fraction(lost, won) if won else None
        eq1 = ratio is not None and float(ratio) < rep.threshold
        candidate = None
        if parts_A[i]:
            into = tuple(sorted(order[: len(parts_A[i])]))
            new = (A_set - set(parts_A[i])) | set(into)
            candidate = SwapMove(tuple(parts_A[i]), into, inst.coverage(new) - A_cov)
        rep.parts.append(
            PartReplay(
                i,
                tuple(parts_A[i]),
                tuple(parts_O[i]),
                tuple(sorted(h.nodes[v] for v in n_o[i])),
                tuple(o_bar),
                lost,
                won,
                tuple(order),
                tuple(gains),
                tuple(pref),
                eq3,
                order_ok,
                ratio,
                eq1,
                candidate,
            )
        )
        rep.sum_lost += lost
        rep.sum_won += won
        if candidate is not None and candidate.gain > 0:
            if rep.best_swap is None or candidate.gain > rep.best_swap.gain:
                rep.best_swap, rep.best_part = candidate, i
    return rep


def format_replay(rep: AnalysisReplay) -> str:
    """Plain-text table of the replay; deterministic for identical inputs."""
    lines = [
        f"b={rep.b} r={rep.r} q={rep.q} common={len(rep.common)} alg={rep.alg} opt={rep.opt}",
        f"parts={len(rep.parts)} |Z|={rep.z} |Z_formula|={rep.z_formula} augmented={len(rep.augmented)} "
        f"capacity={rep.capacity} overflow={rep.overflow}",
        f"c1={rep.c1:.6f} c2={rep.c2:.6f} threshold={rep.threshold:.6f}",
        f"sum|L_i|={rep.sum_lost} <= alg-|Z|={rep.alg - rep.z}: {'ok' if rep.lost_claim else 'FAIL'}",
        f"sum|W_i|={rep.sum_won} >= opt-|Z|={rep.opt - rep.z}: {'ok' if rep.won_claim else 'FAIL'}",
        f"prefix inequality: {'ok' if rep.eq3_ok else 'FAIL'}  greedy order: {'ok' if rep.order_ok else 'FAIL'}  "
        f"exchange violations: {len(rep.exchange_violations)}",
        "part |A_i| |O_i| |N_i| |Obar_i| |L_i| |W_i| L/W eq1 swap_gain",
    ]
    for p in rep.parts:
        ratio = "-" if p.ratio is None else f"{float(p.ratio):.4f}"
        gain = "-" if p.candidate is None else str(p.candidate.gain)
        lines.append(
            f"{p.index} {len(p.A_i)} {len(p.O_i)} {len(p.N_O)} {len(p.O_bar)} {p.lost} {p.won} {ratio} "
            f"{'yes' if p.eq1_holds else 'no'} {gain}"
        )
    if rep.best_swap is not None:
        mv = rep.best_swap
        lines.append(
            f"profitable swap in part {rep.best_part}: out={','.join(map(str, mv.out))} "
            f"into={','.join(map(str, mv.into))} gain={mv.gain}"
        )
    else:
        lines.append("profitable swap: none")
    return "\n".join(lines) + "\n"
