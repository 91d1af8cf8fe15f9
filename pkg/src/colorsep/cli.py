"""Command-line entry points.

Exit codes: 0 ok, 1 bad input or usage, 2 invariant violation, 3 parameter
outside the feasible window, 4 size or enumeration budget exceeded.  Errors
are printed as ``error: <category>: <message>`` on stderr.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import bench as bench_mod
from .balancing import (
    WeightedVectorSet,
    balance_permutation,
    chunk_discrepancy,
    chunk_permutation,
    chunk_sizes,
    format_partition,
    parse_partition,
    prefix_sums,
    vector_partition_steinitz,
)
from .colored import (
    d_color_division,
    recheck_d_color,
    recheck_two_color,
    two_color_division,
    verify_d_color,
    verify_two_color,
)
from .coverage.exchange import MDProvider, MVCProvider
from .coverage.instance import (
    check_solution,
    format_instance,
    format_solution,
    parse_instance,
    parse_solution,
    random_instance,
    reduce_md,
    reduce_mvc,
)
from .coverage.replay import analysis_replay, format_replay
from .coverage.solvers import (
    brute_force_mc,
    format_trace,
    greedy_mc,
    local_search_mc,
    verify_local_optimum,
)
from .divisions import format_division, parse_division, rf_division, uniform_division, verify_division
from .errors import ColorsepError
from .generators import (
    checkerboard_colors,
    grid,
    grid_subgraph,
    make_rng,
    random_colors,
    striped_colors,
    triangulated_grid,
)
from .graph import format_graph, parse_graph, validate_graph
from .separators import ORACLES

EXIT_CODES = {"parameter-window": 3, "size-limit": 4}
VIOLATION = 2


class Violations(Exception):
    """Raised by verify commands; carries the listing to print."""

    def __init__(self, items):
        super().__init__(f"{len(items)} violation(s)")
        self.items = items


def _read(path):
    return Path(path).read_text()


def _emit(text, out):
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _oracle(name):
    return ORACLES[name]


def _parse_vectors(text):
    vecs = []
    for line in text.splitlines():
        if line.strip():
            vecs.append(tuple(Fraction(x) for x in line.split()))
    return vecs


def _report(fmt, data):
    if fmt == "json":
        return json.dumps(data, sort_keys=True, default=str) + "\n"
    return "".join(f"{k}: {data[k]}\n" for k in data)


@click.group()
@click.version_option(package_name="colorsep")
def cli():
    """Divisions of planar graphs and swap local search for Maximum Coverage."""


# ---------------------------------------------------------------------------
# generate


@cli.command()
@click.argument(
    "kind",
    type=click.Choice(["grid", "triangulated-grid", "grid-subgraph", "mvc-instance", "md-instance", "mc-random"]),
)
@click.option("--width", default=8, show_default=True)
@click.option("--height", default=None, type=int, help="Defaults to --width.")
@click.option("--keep", default=0.8, show_default=True, help="Vertex keep probability for grid-subgraph.")
@click.option("--triangulated", is_flag=True, help="Add cell diagonals (grid-subgraph and instances).")
@click.option("--random-diagonals", is_flag=True, help="Draw each cell diagonal at random.")
@click.option("--colors", default=None, help="checkerboard | striped:D | random:W1,W2,...")
@click.option("--k", "k", default=3, show_default=True, help="Budget for instances.")
@click.option("--universe", default=20, show_default=True, help="|U| for mc-random.")
@click.option("--family", default=10, show_default=True, help="|F| for mc-random.")
@click.option("--density", default=0.3, show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "-o", default=None, type=click.Path(dir_okay=False))
@click.option("--graph-out", default=None, type=click.Path(dir_okay=False), help="Also write the underlying graph.")
def generate(
    kind, width, height, keep, triangulated, random_diagonals, colors, k, universe, family, density, seed, out, graph_out
):
    """Write a graph file or a coverage instance (JSON)."""
    rng = make_rng(seed)
    h = width if height is None else height
    if kind == "mc-random":
        _emit(format_instance(random_instance(universe, family, k, rng, density)), out)
        return
    if kind == "grid":
        g = grid(width, h)
    elif kind == "triangulated-grid":
        g = triangulated_grid(width, h, rng if random_diagonals else None)
    elif kind == "grid-subgraph":
        g = grid_subgraph(width, h, keep, rng, triangulated=triangulated)
    elif triangulated:
        g = triangulated_grid(width, h, rng if random_diagonals else None)
    else:
        g = grid(width, h)
    if colors:
        g = _apply_colors(g, colors, width, rng)
    if kind in ("mvc-instance", "md-instance"):
        inst = (reduce_mvc if kind == "mvc-instance" else reduce_md)(g, min(k, g.n))
        _emit(format_instance(inst), out)
        if graph_out:
            Path(graph_out).write_text(format_graph(g))
        return
    _emit(format_graph(g), out)


def _apply_colors(g, spec, width, rng):
    name, _, arg = spec.partition(":")
    if name == "checkerboard":
        return checkerboard_colors(g, width)
    if name == "striped":
        return striped_colors(g, width, int(arg or 2))
    if name == "random":
        weights = [float(x) for x in arg.split(",")] if arg else [1.0, 1.0]
        return random_colors(g, weights, rng)
    raise click.BadParameter(f"unknown coloring {spec!r}", param_hint="--colors")


# ---------------------------------------------------------------------------
# divide / balance


@cli.command()
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(["uniform", "rf", "two-color", "d-color"]), default="uniform", show_default=True)
@click.option("--r", "r", default=16, show_default=True)
@click.option("--q", "q", default=4, show_default=True, help="Chunk parameter for two-color.")
@click.option("--mode", type=click.Choice(["closed", "interior"]), default="closed", show_default=True)
@click.option("--oracle", type=click.Choice(sorted(ORACLES)), default="lipton-tarjan", show_default=True)
@click.option("--out", "-o", default=None, type=click.Path(dir_okay=False), help="Division file.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def divide(graph_file, kind, r, q, mode, oracle, out, fmt):
    """Compute a division and print its report."""
    g = parse_graph(_read(graph_file))
    orc = _oracle(oracle)
    data = {"kind": kind}
    if kind == "rf":
        d = rf_division(g, orc, r, mode)
        rep = verify_division(g, d, mode=mode)
    elif kind == "uniform":
        d = uniform_division(g, orc, r)
        rep = verify_division(g, d, uniform=True)
    elif kind == "two-color":
        cd = two_color_division(g, orc, r, q)
        d = cd.division
        rep = verify_two_color(g, cd)
        data.update(alpha=str(cd.alpha), q_prime=cd.partition.q_prime, max_discrepancy=str(rep.max_discrepancy))
    else:
        dd = d_color_division(g, orc, r)
        d = dd.division
        rep = verify_d_color(g, dd)
        data.update(colors=dd.d, max_deviation=str(rep.max_deviation))
    data.update(
        n=g.n,
        r=r,
        t=d.t,
        boundary=len(d.boundary),
        min_part_size=rep.min_part_size,
        max_part_size=rep.max_part_size,
        max_part_boundary=rep.max_part_boundary,
        measured_c1=f"{rep.measured_c1:.6f}",
        violations=len(rep.violations),
    )
    if out:
        Path(out).write_text(format_division(d))
    click.echo(_report(fmt, data), nl=False)
    if rep.violations:
        raise Violations(rep.violations)


@cli.command()
@click.argument("vectors_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--q", "q", default=None, type=int, help="Chunk size for 2-vectors (prefix balancing).")
@click.option("--k", "k", default=None, type=int, help="Number of Steinitz segments for d-vectors.")
@click.option("--out", "-o", default=None, type=click.Path(dir_okay=False))
def balance(vectors_file, q, k, out):
    """Balance nonnegative rational vectors (one per line) into chunks."""
    vecs = _parse_vectors(_read(vectors_file))
    if (q is None) == (k is None):
        raise click.UsageError("give exactly one of --q and --k")
    if q is not None:
        ws = WeightedVectorSet.from_pairs(vecs)
        part = chunk_permutation(balance_permutation(ws), q, ws)
    else:
        part = vector_partition_steinitz(vecs, k)
    _emit(format_partition(part), out)


# ---------------------------------------------------------------------------
# verify


@cli.group()
def verify():
    """Recompute invariants from files; exit 2 on any violation."""


def _finish(items):
    if items:
        raise Violations(items)
    click.echo("ok")


@verify.command("graph")
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
def verify_graph(graph_file):
    rep = validate_graph(parse_graph(_read(graph_file)))
    items = list(rep.violations)
    if rep.euler_ok is False:
        items.append(("euler", rep.faces))
    _finish(items)


@verify.command("division")
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("division_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(["uniform", "rf", "two-color", "d-color"]), default="uniform", show_default=True)
@click.option("--mode", type=click.Choice(["closed", "interior"]), default="closed", show_default=True)
def verify_division_cmd(graph_file, division_file, kind, mode):
    g = parse_graph(_read(graph_file))
    d = parse_division(_read(division_file), g)
    if kind in ("uniform", "rf"):
        rep = verify_division(g, d, uniform=kind == "uniform", mode=mode)
        _finish(rep.violations)
        return
    rep = verify_division(g, d, check_sizes=False)
    items = list(rep.violations)
    if not items:
        worst, bound, bad = (recheck_two_color if kind == "two-color" else recheck_d_color)(g, d)
        items.extend(bad)
        click.echo(f"max={worst} bound={bound}")
    _finish(items)


@verify.command("partition")
@click.argument("vectors_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("partition_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--q", "q", default=None, type=int, help="Check 2-vector chunk sizes against q.")
def verify_partition(vectors_file, partition_file, q):
    vecs = _parse_vectors(_read(vectors_file))
    part = parse_partition(_read(partition_file))
    n = len(vecs)
    items = []
    if sorted(part.permutation) != list(range(n)):
        items.append(("not-a-permutation",))
    flat = tuple(i for ch in part.chunks for i in ch)
    if flat != part.permutation:
        items.append(("chunks-not-consecutive",))
    if items:
        _finish(items)
        return
    d = len(vecs[0]) if vecs else 0
    if q is not None:
        ws = WeightedVectorSet.from_pairs(vecs)
        ds = [a - ws.alpha * b for a, b in ws.vectors]
        pre = prefix_sums(ds, part.permutation)
        c = ws.c_high
        if max(pre) - min(pre) > 2 * c:
            items.append(("segment-discrepancy", max(pre) - min(pre), 2 * c))
        sizes, q_prime = chunk_sizes(n, q)
        lens = [len(ch) for ch in part.chunks]
        if sorted(lens) != sorted(sizes) or not (q <= q_prime <= max(q, 2 * q - 1)):
            items.append(("chunk-sizes", lens, q_prime))
    else:
        k = len(part.chunks)
        mu = [sum(v[j] for v in vecs) / k for j in range(d)]
        for i, ch in enumerate(part.chunks):
            cert = tuple(mu[j] - sum(vecs[x][j] for x in ch) for j in range(d))
            if chunk_discrepancy(cert) >= 2 * (3 * d // 2) + 1:
                items.append(("chunk-discrepancy", i, chunk_discrepancy(cert)))
        lens = [len(ch) for ch in part.chunks]
        if lens and max(lens) - min(lens) > 1:
            items.append(("segment-sizes", lens))
    _finish(items)


@verify.command("solution")
@click.argument("instance_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("solution_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--b", "b", default=None, type=int, help="Also certify b-local optimality.")
def verify_solution(instance_file, solution_file, b):
    inst = parse_instance(_read(instance_file))
    sol = parse_solution(_read(solution_file))
    items = check_solution(inst, sol)
    if not items and b is not None:
        ok, move = verify_local_optimum(inst, sol, b)
        if not ok:
            items.append(("improving-swap", move.out, move.into, move.gain))
    _finish(items)


# ---------------------------------------------------------------------------
# solvers


@cli.command()
@click.argument("instance_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--b", "b", default=1, show_default=True)
@click.option("--init", type=click.Choice(["greedy", "empty", "random"]), default="greedy", show_default=True)
@click.option("--init-file", default=None, type=click.Path(exists=True, dir_okay=False), help="Start from this solution.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--max-evals", default=5 * 10**6, show_default=True)
@click.option("--out", "-o", default=None, type=click.Path(dir_okay=False), help="Solution file.")
@click.option("--trace", "trace_out", default=None, type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def solve(instance_file, b, init, init_file, seed, max_evals, out, trace_out, fmt):
    """b-swap local search."""
    inst = parse_instance(_read(instance_file))
    start = parse_solution(_read(init_file)) if init_file else init
    res = local_search_mc(inst, b, init=start, rng=make_rng(seed), max_evaluations=max_evals)
    if out:
        Path(out).write_text(format_solution(res.solution))
    if trace_out:
        Path(trace_out).write_text(format_trace(res.trace))
    for w in res.warnings:
        click.echo(f"warning: {w}", err=True)
    data = {
        "chosen": " ".join(map(str, res.solution.chosen)),
        "coverage": res.solution.coverage,
        "swaps": len(res.trace),
        "certified": res.certified,
    }
    if not trace_out and fmt == "text":
        click.echo(format_trace(res.trace), nl=False)
    click.echo(_report(fmt, data), nl=False)


@cli.command()
@click.argument("instance_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["brute-force", "greedy"]), default="brute-force", show_default=True)
@click.option("--out", "-o", default=None, type=click.Path(dir_okay=False))
def exact(instance_file, method, out):
    """Optimum by enumeration (or the greedy baseline)."""
    inst = parse_instance(_read(instance_file))
    sol = brute_force_mc(inst) if method == "brute-force" else greedy_mc(inst)
    _emit(format_solution(sol), out)


@cli.command()
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--problem", type=click.Choice(["mvc", "md"]), required=True)
@click.option("--k", "k", required=True, type=int)
@click.option("--a", "a_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Solution A.")
@click.option("--o", "o_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Reference solution.")
@click.option("--b", "b", default=8, show_default=True)
@click.option("--r", "r", default=None, type=int, help="Defaults to b.")
@click.option("--q", "q", default=None, type=int, help="Defaults to b.")
@click.option("--oracle", type=click.Choice(sorted(ORACLES)), default="lipton-tarjan", show_default=True)
def replay(graph_file, problem, k, a_file, o_file, b, r, q, oracle):
    """Rebuild the swap argument for solution A against a reference solution O."""
    g = parse_graph(_read(graph_file))
    inst = (reduce_mvc if problem == "mvc" else reduce_md)(g, k)
    provider = (MVCProvider if problem == "mvc" else MDProvider)(g)
    A = parse_solution(_read(a_file)).chosen
    O = parse_solution(_read(o_file)).chosen
    rep = analysis_replay(inst, A, O, provider, b, r=r, q=q, oracle=_oracle(oracle))
    click.echo(format_replay(rep), nl=False)
    if not rep.ok:
        raise Violations([("replay-claim",)])


@cli.command()
@click.option("--instances", default=50, show_default=True)
@click.option("--universe", default=20, show_default=True)
@click.option("--family", default=14, show_default=True)
@click.option("--k", "k", default=4, show_default=True)
@click.option("--b", "bs", default="1,2,3", show_default=True, help="Comma-separated b values.")
@click.option("--density", default=0.3, show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--no-exact", is_flag=True, help="Skip the brute-force column.")
@click.option("--no-timing", is_flag=True, help="Drop the wall-clock column.")
@click.option("--out", "-o", default=None, type=click.Path(dir_okay=False), help="CSV file.")
def bench(instances, universe, family, k, bs, density, seed, no_exact, no_timing, out):
    """CSV of greedy and local-b runs on seeded random instances, plus a summary."""
    b_values = [int(x) for x in bs.split(",") if x]
    recs = bench_mod.run_bench(instances, universe, family, k, b_values, seed, density, exact=not no_exact)
    text = bench_mod.format_csv(recs, timing=not no_timing)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    click.echo(bench_mod.summary(recs), nl=False, err=out is None)


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="colorsep", standalone_mode=False)
    except Violations as exc:
        for item in exc.items[:50]:
            click.echo(f"violation: {item}", err=True)
        click.echo(f"error: invariant-violation: {exc}", err=True)
        sys.exit(VIOLATION)
    except ColorsepError as exc:
        click.echo(f"error: {exc.category}: {exc}", err=True)
        sys.exit(EXIT_CODES.get(exc.category, 1))
    except click.exceptions.Abort:
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: io: {exc}", err=True)
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    main()
