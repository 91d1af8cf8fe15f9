"""Maximum Coverage instances as bitmask families, plus the graph reductions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from ..errors import InvalidInstance
from ..graph import Graph


@dataclass(frozen=True)
class CoverageInstance:
    """Universe 0..universe_size-1, sets as int bitmasks, budget k.

    ``labels`` keeps the original element names when the instance was read
    from a file with non-integer or non-contiguous elements.
    """

    universe_size: int
    family: tuple
    budget: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.universe_size < 0:
            raise InvalidInstance("negative universe size")
        if not (0 <= self.budget <= len(self.family)):
            raise InvalidInstance(f"budget {self.budget} outside [0, {len(self.family)}]")
        limit = 1 << self.universe_size
        for i, s in enumerate(self.family):
            if s < 0 or s >= limit:
                raise InvalidInstance(f"set {i} leaves the universe")

    @property
    def m(self):
        return len(self.family)

    def union(self, chosen):
        mask = 0
        for i in chosen:
            mask |= self.family[i]
        return mask

    def coverage(self, chosen):
        return self.union(chosen).bit_count()

    def elements(self, i):
        s = self.family[i]
        out = []
        while s:
            low = s & -s
            out.append(low.bit_length() - 1)
            s ^= low
        return out

    @classmethod
    def from_sets(cls, universe_size, sets, budget):
        fam = []
        for s in sets:
            mask = 0
            for e in s:
                if not (0 <= e < universe_size):
                    raise InvalidInstance(f"element {e} outside universe of size {universe_size}")
                mask |= 1 << e
            fam.append(mask)
        return cls(universe_size, tuple(fam), budget)


@dataclass(frozen=True)
class Solution:
    chosen: tuple
    coverage: int

    @classmethod
    def of(cls, inst: CoverageInstance, chosen):
        chosen = tuple(sorted(set(chosen)))
        return cls(chosen, inst.coverage(chosen))


def check_solution(inst: CoverageInstance, sol: Solution):
    """Violations of the Solution invariants (empty list when valid)."""
    out = []
    if len(sol.chosen) > inst.budget:
        out.append(("over-budget", len(sol.chosen), inst.budget))
    if len(set(sol.chosen)) != len(sol.chosen):
        out.append(("duplicate-index",))
    if any(not (0 <= i < inst.m) for i in sol.chosen):
        out.append(("index-out-of-range",))
        return out
    real = inst.coverage(sol.chosen)
    if real != sol.coverage:
        out.append(("coverage-mismatch", sol.coverage, real))
    return out


# ---------------------------------------------------------------------------
# reductions


def reduce_mvc(g: Graph, k: int) -> CoverageInstance:
    """Elements are the edges of g (in ``g.edges()`` order); set v holds the edges at v."""
    index = {e: j for j, e in enumerate(g.edges())}
    fam = [0] * g.n
    for (u, v), j in index.items():
        fam[u] |= 1 << j
        fam[v] |= 1 << j
    return CoverageInstance(len(index), tuple(fam), k)


def reduce_md(g: Graph, k: int) -> CoverageInstance:
    """Elements are the vertices; set v is the closed neighborhood N[v]."""
    fam = []
    for v in range(g.n):
        mask = 1 << v
        for u in g.adjacency[v]:
            mask |= 1 << u
        fam.append(mask)
    return CoverageInstance(g.n, tuple(fam), k)


def reduce_mh(ranges, points, k: int) -> CoverageInstance:
    """Elements are the ranges; set p holds the ranges that contain point p."""
    fam = []
    for p in points:
        mask = 0
        for j, rng in enumerate(ranges):
            if p in rng:
                mask |= 1 << j
        fam.append(mask)
    return CoverageInstance(len(ranges), tuple(fam), k)


def random_instance(universe_size, family_size, k, rng, density=0.3) -> CoverageInstance:
    from ..generators import random_family

    return CoverageInstance(universe_size, tuple(random_family(universe_size, family_size, rng, density)), k)


# ---------------------------------------------------------------------------
# JSON formats


def format_instance(inst: CoverageInstance) -> str:
    sets = [inst.elements(i) for i in range(inst.m)]
    if inst.labels is not None:
        sets = [[inst.labels[e] for e in s] for s in sets]
    doc = {"universe_size": inst.universe_size, "budget": inst.budget, "sets": sets}
    if inst.labels is not None:
        doc["labels"] = list(inst.labels)
    return json.dumps(doc, sort_keys=True) + "\n"


def parse_instance(text: str) -> CoverageInstance:
    """Read the JSON instance format.  Elements may be arbitrary labels when a
    ``labels`` list is given; they are normalized to 0..|U|-1 in list order."""
    try:
        doc = json.loads(text)
        sets = doc["sets"]
        budget = int(doc["budget"])
    except (ValueError, KeyError, TypeError) as exc:
        raise InvalidInstance(f"malformed instance: {exc}") from exc
    labels = doc.get("labels")
    if labels is not None:
        pos = {lab: j for j, lab in enumerate(labels)}
        if len(pos) != len(labels):
            raise InvalidInstance("duplicate labels")
        try:
            sets = [[pos[e] for e in s] for s in sets]
        except KeyError as exc:
            raise InvalidInstance(f"unknown element label {exc}") from exc
        size = len(labels)
    else:
        size = int(doc.get("universe_size", 0))
    inst = CoverageInstance.from_sets(size, sets, budget)
    if labels is not None:
        inst = CoverageInstance(inst.universe_size, inst.family, inst.budget, tuple(labels))
    return inst


def format_solution(sol: Solution) -> str:
    return json.dumps({"chosen": list(sol.chosen), "coverage": sol.coverage}, sort_keys=True) + "\n"


def parse_solution(text: str) -> Solution:
    try:
        doc = json.loads(text)
        return Solution(tuple(sorted(int(i) for i in doc["chosen"])), int(doc["coverage"]))
    except (ValueError, KeyError, TypeError) as exc:
        raise InvalidInstance(f"malformed solution: {exc}") from exc
