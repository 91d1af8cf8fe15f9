"""Benchmark harness: greedy and b-swap local search against the exact optimum."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import astuple, dataclass, fields
from fractions import Fraction
from typing import Optional

from .coverage.instance import random_instance
from .coverage.solvers import brute_force_mc, greedy_mc, local_search_mc
from .generators import make_rng


@dataclass(frozen=True)
class BenchmarkRecord:
    instance: int
    method: str
    coverage: int
    exact: Optional[int]
    ratio: Optional[str]  # exact fraction coverage/exact, e.g. "7/8"
    swaps: int
    ms: float
    seed: int


TIMING_FIELDS = ("ms",)


def _ratio(cov, exact):
    if exact is None:
        return None
    if exact == 0:
        return "1"
    return str(Fraction(cov, exact))


def run_bench(count, universe_size, family_size, k, bs, seed, density=0.3, exact=True):
    """One greedy row and one local-b row per b for each of ``count`` instances.

    Instance i is drawn from the child stream (seed, i), so the rows do not
    depend on how many instances are requested.
    """
    records = []
    for i in range(count):
        inst = random_instance(universe_size, family_size, k, make_rng(seed, i), density)
        opt = brute_force_mc(inst).coverage if exact else None
        t0 = time.perf_counter()
        g = greedy_mc(inst)
        ms = (time.perf_counter() - t0) * 1000
        records.append(BenchmarkRecord(i, "greedy", g.coverage, opt, _ratio(g.coverage, opt), 0, ms, seed))
        for b in bs:
            t0 = time.perf_counter()
            res = local_search_mc(inst, b)
            ms = (time.perf_counter() - t0) * 1000
            cov = res.solution.coverage
            records.append(BenchmarkRecord(i, f"local-{b}", cov, opt, _ratio(cov, opt), len(res.trace), ms, seed))
    return records


def format_csv(records, timing=True) -> str:
    names = [f.name for f in fields(BenchmarkRecord) if timing or f.name not in TIMING_FIELDS]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for rec in records:
        row = dict(zip([f.name for f in fields(BenchmarkRecord)], astuple(rec)))
        out = []
        for n in names:
            v = row[n]
            if v is None:
                out.append("")
            elif n == "ms":
                out.append(f"{v:.3f}")
            else:
                out.append(v)
        w.writerow(out)
    return buf.getvalue()


def summary(records) -> str:
    """Mean and minimum ratio per method, in first-seen method order."""
    methods = []
    by = {}
    for rec in records:
        if rec.method not in by:
            methods.append(rec.method)
            by[rec.method] = []
        if rec.ratio is not None:
            by[rec.method].append(Fraction(rec.ratio))
    lines = ["method runs mean_ratio min_ratio"]
    for m in methods:
        rs = by[m]
        if rs:
            lines.append(f"{m} {len(rs)} {float(sum(rs) / len(rs)):.6f} {float(min(rs)):.6f}")
        else:
            lines.append(f"{m} 0 - -")
    return "\n".join(lines) + "\n"
