"""Greedy, brute force and b-swap local search for Maximum Coverage."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from ..errors import InvalidParameter, SizeLimitExceeded
from .instance import CoverageInstance, Solution

log = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 10**7
DEFAULT_EVALUATION_BUDGET = 5 * 10**6


@dataclass(frozen=True)
class SwapMove:
    out: tuple
    into: tuple
    gain: int


@dataclass
class LocalSearchResult:
    solution: Solution
    trace: list = field(default_factory=list)
    certified: bool = True
    evaluations: int = 0
    warnings: list = field(default_factory=list)


def greedy_mc(inst: CoverageInstance) -> Solution:
    """k rounds of the largest marginal gain, ties to the lowest index."""
    covered = 0
    chosen = []
    used = [False] * inst.m
    for _ in range(inst.budget):
        best, best_gain = -1, -1
        for i, s in enumerate(inst.family):
            if used[i]:
                continue
            gain = (s & ~covered).bit_count()
            if gain > best_gain:
                best, best_gain = i, gain
        if best < 0:
            break
        used[best] = True
        chosen.append(best)
        covered |= inst.family[best]
    return Solution(tuple(sorted(chosen)), covered.bit_count())


def brute_force_mc(inst: CoverageInstance, limit: int = BRUTE_FORCE_LIMIT) -> Solution:
    """Exact optimum over all k-subsets (first in lexicographic order on ties)."""
    k = inst.budget
    total = comb(inst.m, k)
    if total > limit:
        raise SizeLimitExceeded(f"C({inst.m}, {k}) = {total} subsets exceed the limit {limit}")
    fam = inst.family
    best, best_cov = (), -1
    for combo in combinations(range(inst.m), k):
        mask = 0
        for i in combo:
            mask |= fam[i]
        cov = mask.bit_count()
        if cov > best_cov:
            best, best_cov = combo, cov
    return Solution(tuple(best), max(best_cov, 0))


def count_moves(k_current: int, m_outside: int, b: int, can_add: bool) -> int:
    """Number of moves the canonical enumeration visits."""
    total = m_outside if can_add else 0
    for s in range(1, min(b, k_current) + 1):
        total += comb(k_current, s) * sum(comb(m_outside, t) for t in range(1, s + 1))
    return total


def _first_improving(inst, chosen, b, budget_left):
    """Scan moves in canonical order; return (move or None, evaluations, exhausted)."""
    fam = inst.family
    sol = sorted(chosen)
    inside = set(sol)
    outside = [i for i in range(inst.m) if i not in inside]
    cur_mask = inst.union(sol)
    cur = cur_mask.bit_count()
    evals = 0
    all_out = 0
    for i in outside:
        all_out |= fam[i]

    # pure additions while below budget
    if len(sol) < inst.budget:
        for i in outside:
            evals += 1
            gain = (fam[i] & ~cur_mask).bit_count()
            if gain > 0:
                return SwapMove((), (i,), gain), evals, False
            if evals >= budget_left:
                return None, evals, True

    for s in range(1, min(b, len(sol)) + 1):
        for out in combinations(sol, s):
            out_set = set(out)
            base = 0
            for i in sol:
                if i not in out_set:
                    base |= fam[i]
            if (base | all_out).bit_count() <= cur:
                # no replacement of this out-set can gain; count the skipped moves
                evals += sum(comb(len(outside), t) for t in range(1, s + 1))
                if evals >= budget_left:
                    return None, evals, True
                continue
            for t in range(1, min(s, len(outside)) + 1):
                for into in combinations(outside, t):
                    evals += 1
                    mask = base
                    for i in into:
                        mask |= fam[i]
                    gain = mask.bit_count() - cur
                    if gain > 0:
                        return SwapMove(out, into, gain), evals, False
                    if evals >= budget_left:
                        return None, evals, True
    return None, evals, False


def _initial(inst, init, rng):
    if init is None or init == "greedy":
        return greedy_mc(inst)
    if init == "empty":
        return Solution((), 0)
    if init == "random":
        if rng is None:
            raise InvalidParameter("init='random' needs an rng")
        picks = rng.choice(inst.m, size=inst.budget, replace=False) if inst.budget else []
        return Solution.of(inst, [int(i) for i in picks])
    if isinstance(init, Solution):
        if len(init.chosen) > inst.budget:
            raise InvalidParameter("initial solution exceeds the budget")
        return Solution.of(inst, init.chosen)
    raise InvalidParameter(f"unknown init {init!r}")


def local_search_mc(
    inst: CoverageInstance, b: int = 1, init=None, rng=None, max_evaluations: int = DEFAULT_EVALUATION_BUDGET
) -> LocalSearchResult:
    """First-improvement b-swap local search.

    A move removes 1..b chosen sets and adds at least one and at most as many
    unchosen ones; while fewer than k sets are chosen a single set may also be
    added.  Moves are scanned by out-size, then out-set lexicographically,
    then in-size and in-set lexicographically.  When the evaluation budget
    runs out the current solution is returned with ``certified`` False.
    """
    if b < 1:
        raise InvalidParameter(f"b must be >= 1, got {b}")
    sol = _initial(inst, init, rng)
    res = LocalSearchResult(sol)
    chosen = set(sol.chosen)
    cov = sol.coverage
    while True:
        move, evals, exhausted = _first_improving(inst, chosen, b, max_evaluations - res.evaluations)
        res.evaluations += evals
        if exhausted:
            res.certified = False
            msg = f"evaluation budget {max_evaluations} reached; solution not certified b-locally optimal"
            res.warnings.append(msg)
            log.warning(msg)
            break
        if move is None:
            break
        chosen.difference_update(move.out)
        chosen.update(move.into)
        new_cov = inst.coverage(chosen)
        if new_cov - cov != move.gain:
            raise AssertionError("swap gain disagrees with recomputed coverage")
        cov = new_cov
        res.trace.append(move)
    res.solution = Solution(tuple(sorted(chosen)), cov)
    return res


def verify_local_optimum(inst: CoverageInstance, sol: Solution, b: int, max_evaluations: int = DEFAULT_EVALUATION_BUDGET):
    """Exhaustively look for an improving move; returns (True, None) or (False, move)."""
    if b < 1:
        raise InvalidParameter(f"b must be >= 1, got {b}")
    if len(sol.chosen) > inst.budget:
        raise InvalidParameter("solution exceeds the budget")
    outside = inst.m - len(sol.chosen)
    total = count_moves(len(sol.chosen), outside, b, len(sol.chosen) < inst.budget)
    if total > max_evaluations:
        raise SizeLimitExceeded(f"{total} moves exceed the enumeration budget {max_evaluations}")
    move, _, _ = _first_improving(inst, set(sol.chosen), b, total + 1)
    return move is None, move


def apply_move(inst: CoverageInstance, sol: Solution, move: SwapMove) -> Solution:
    chosen = (set(sol.chosen) - set(move.out)) | set(move.into)
    return Solution.of(inst, chosen)


def format_trace(trace) -> str:
    lines = []
    for mv in trace:
        lines.append(f"out={','.join(map(str, mv.out))} into={','.join(map(str, mv.into))} gain={mv.gain}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_trace(text: str):
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        fields = dict(part.split("=", 1) for part in line.split())
        out.append(
            SwapMove(
                tuple(int(x) for x in fields["out"].split(",") if x),
                tuple(int(x) for x in fields["into"].split(",") if x),
                int(fields["gain"]),
            )
        )
    return out
