"""Exit-criteria suite.

Each test prints one ``criterion N: PASS|FAIL ...`` line at the pinned
tolerance and then asserts it.
"""

import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from colorsep.balancing import (
    WeightedVectorSet,
    balance_permutation,
    chunk_discrepancy,
    chunk_permutation,
    differences,
    max_prefix_norm,
    steinitz_order,
    vector_partition_steinitz,
)
from colorsep.cli import main
from colorsep.colored import d_color_division, two_color_division, verify_d_color, verify_two_color
from colorsep.coverage.exchange import MDProvider, MVCProvider, exchange_graph_md, exchange_graph_mvc, exchange_violations
from colorsep.coverage.instance import random_instance, reduce_md, reduce_mvc
from colorsep.coverage.replay import analysis_replay
from colorsep.coverage.solvers import brute_force_mc, greedy_mc, local_search_mc, verify_local_optimum
from colorsep.divisions import uniform_division, verify_division
from colorsep.errors import ParameterOutOfWindow
from colorsep.generators import (
    grid,
    grid_subgraph,
    make_rng,
    random_colors,
    striped_colors,
    triangulated_grid,
)

pytestmark = pytest.mark.acceptance

SEED = 20240601


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")

    return emit


def _side(n):
    return round(math.sqrt(n))


# ---------------------------------------------------------------------------
# 1. division invariants


def test_criterion_1_uniform_division_invariants(report):
    t0 = time.perf_counter()
    failures = []
    runs = 0
    for n in (10**3, 10**4, 10**5):
        w = _side(n)
        for tri in (False, True):
            g = triangulated_grid(w) if tri else grid(w)
            for r in (16, 32, 64):
                d = uniform_division(g, r=r)
                rep = verify_division(g, d, uniform=True)
                runs += 1
                sizes = [len(p) for p in d.parts]
                if not rep.valid or not all(2 * s >= r and s <= 2 * r for s in sizes):
                    failures.append((n, tri, r, rep.violations[:3]))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed <= 60
    report(1, ok, f"runs={runs} failures={len(failures)} time={elapsed:.1f}s (limit 60s)")
    assert not failures, failures
    assert elapsed <= 60


# ---------------------------------------------------------------------------
# 2. two-color balance


def test_criterion_2_two_color_discrepancy(report):
    t0 = time.perf_counter()
    worst = F(0)
    failures = []
    ratios = [(1, 1), (3, 7), (1, 9)]
    for i in range(100):
        rng = make_rng(SEED, 2, i)
        w = int(rng.integers(20, 101))
        tri = bool(i % 2)
        g = triangulated_grid(w, rng=rng) if tri else grid(w)
        g = random_colors(g, ratios[i % 3], rng)
        r = int(rng.choice([16, 24, 32]))
        q = int(rng.integers(1, 5))
        cd = two_color_division(g, r=r, q=q)
        rep = verify_two_color(g, cd)
        worst = max(worst, rep.max_discrepancy / (2 * r))
        if not rep.valid:
            failures.append((i, rep.violations[:3]))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed <= 60
    report(
        2, ok, f"instances=100 failures={len(failures)} worst disc/2r={float(worst):.3f} time={elapsed:.1f}s (limit 60s)"
    )
    assert not failures, failures
    assert elapsed <= 60


# ---------------------------------------------------------------------------
# 3. vector-balancing certificates


def _random_rational_pairs(rng, n):
    den = int(rng.integers(1, 61))
    out = []
    for _ in range(n):
        total = F(int(rng.integers(den, 2 * den + 1)), den)
        a = total * F(int(rng.integers(0, den + 1)), den)
        out.append((a, total - a))
    if sum(a for a, _ in out) > sum(b for _, b in out):
        out = [(b, a) for a, b in out]
    return out


def _max_segment_exhaustive(ds, perm):
    """max |sum of d over perm[i:j]| over every pair i <= j, exact integers."""
    den = math.lcm(*(x.denominator for x in ds))
    vals = np.array([int(ds[k] * den) for k in perm], dtype=np.int64)
    pre = np.concatenate(([0], np.cumsum(vals)))
    best = 0
    for start in range(0, len(pre), 512):
        block = pre[start : start + 512]
        best = max(best, int(np.abs(np.subtract.outer(block, pre)).max()))
    return F(best, den)


def test_criterion_3_segment_certificates(report):
    failures = []
    worst = F(0)
    rng0 = make_rng(SEED, 3)
    done = 0
    while done < 1000:
        rng = make_rng(SEED, 3, done)
        n = int(math.exp(rng.uniform(0, math.log(2000))))
        pairs = _random_rational_pairs(rng, n)
        if sum(b for _, b in pairs) == 0:
            continue
        v = WeightedVectorSet.from_pairs(pairs)
        perm = balance_permutation(v)
        seg = _max_segment_exhaustive(differences(v), perm)
        worst = max(worst, seg / v.c_high)
        q = int(rng0.integers(1, n + 1))
        part = chunk_permutation(perm, q, v)
        sizes = {len(c) for c in part.chunks}
        if seg > 2 * v.c_high:
            failures.append((done, "segment", seg, v.c_high))
        if not sizes <= {part.q_prime, part.q_prime + 1} or not (q <= part.q_prime <= 2 * q - 1):
            failures.append((done, "chunk-size", q, part.q_prime, sorted(sizes)))
        if any(abs(x) > 2 * v.c_high for x in part.discrepancy_certificates):
            failures.append((done, "chunk-certificate"))
        done += 1
    report(3, not failures, f"sets=1000 failures={len(failures)} worst segment/c={float(worst):.3f} (limit 2)")
    assert not failures, failures[:5]


# ---------------------------------------------------------------------------
# 4. Steinitz suite


def _zero_sum_vectors(rng, n, d):
    den = int(rng.integers(1, 13))
    vs = [tuple(F(int(x), den) for x in rng.integers(-den, den + 1, size=d)) for _ in range(n)]
    s = [sum(v[j] for v in vs) for j in range(d)]
    while any(s):
        fix = tuple(max(-1, min(1, -x)) for x in s)
        vs.append(fix)
        s = [x + y for x, y in zip(s, fix)]
    return vs


def test_criterion_4_steinitz(report):
    prefix_fail, chunk_fail = [], []
    worst_prefix = {d: F(0) for d in range(1, 6)}
    worst_chunk = {d: F(0) for d in range(1, 6)}
    runs = 0
    for d in range(1, 6):
        for seed in range(200):
            rng = make_rng(SEED, 4, d, seed)
            vs = _zero_sum_vectors(rng, int(rng.integers(1, 401)), d)
            assert len(vs) <= 500
            perm = steinitz_order(vs)
            p = max_prefix_norm(vs, perm)
            worst_prefix[d] = max(worst_prefix[d], p)
            if sorted(perm) != list(range(len(vs))) or p > (3 * d) // 2:
                prefix_fail.append((d, seed, p))
            # chunking of [0,1]^d vectors on the same corpus, shifted into the cube
            cube = [tuple((x + 1) / 2 for x in v) for v in vs]
            k = int(rng.integers(1, len(cube) + 1))
            part = vector_partition_steinitz(cube, k)
            c = max((chunk_discrepancy(x) for x in part.discrepancy_certificates), default=F(0))
            worst_chunk[d] = max(worst_chunk[d], c)
            if not c < 3 * d + 1:
                chunk_fail.append((d, seed, c))
            runs += 1
    ok = not prefix_fail and not chunk_fail
    detail = " ".join(f"d={d}:prefix={float(worst_prefix[d]):.2f}/{3 * d // 2},chunk={float(worst_chunk[d]):.2f}/<{3 * d + 1}" for d in range(1, 6))
    report(4, ok, f"runs={runs} prefix_failures={len(prefix_fail)} chunk_failures={len(chunk_fail)} {detail}")
    assert not prefix_fail, prefix_fail[:5]
    assert not chunk_fail, chunk_fail[:5]


# ---------------------------------------------------------------------------
# 5. d-color division


def test_criterion_5_d_color_deviation(report):
    failures = []
    worst = F(0)
    runs = 0
    for d in (2, 3, 4):
        for kind in ("striped", "random"):
            for r, w in ((16, 60), (16, 100), (32, 100)):
                rng = make_rng(SEED, 5, d, r, w)
                g = grid(w)
                if kind == "striped":
                    g = striped_colors(g, w, d)
                else:
                    g = random_colors(g, [1 + int(x) for x in rng.integers(0, 5, size=d)], rng)
                dd = d_color_division(g, r=r)
                rep = verify_d_color(g, dd)
                worst = max(worst, rep.max_deviation / (4 * r * d))
                runs += 1
                if not rep.valid:
                    failures.append((d, kind, r, w, rep.violations[:3]))
    report(5, not failures, f"runs={runs} failures={len(failures)} worst dev/4rd={float(worst):.3f} (limit 1)")
    assert not failures, failures


# ---------------------------------------------------------------------------
# 6. exchange property


def test_criterion_6_exchange_property(report):
    counts = {"mvc": 0, "md": 0}
    violations = 0
    for i in range(500):
        rng = make_rng(SEED, 6, i)
        w, h = int(rng.integers(3, 13)), int(rng.integers(3, 13))
        g = grid_subgraph(w, h, 0.85, rng, triangulated=bool(rng.integers(0, 2)))
        perm = rng.permutation(g.n)
        ka = int(rng.integers(0, g.n // 2 + 1))
        ko = int(rng.integers(0, g.n - ka + 1))
        A = sorted(int(x) for x in perm[:ka])
        O = sorted(int(x) for x in perm[ka : ka + ko])
        if i % 2 == 0:
            ex, inst, kind = exchange_graph_mvc(g, A, O), reduce_mvc(g, 0), "mvc"
        else:
            ex, inst, kind = exchange_graph_md(g, A, O), reduce_md(g, 0), "md"
        counts[kind] += 1
        violations += len(exchange_violations(inst, A, O, ex))
    report(6, violations == 0, f"pairs=500 (mvc={counts['mvc']} md={counts['md']}) violations={violations}")
    assert violations == 0


# ---------------------------------------------------------------------------
# 7-9. small-instance corpus


def _small_corpus():
    for i in range(200):
        rng = make_rng(SEED, 7, i)
        u = int(rng.integers(4, 25))
        m = int(rng.integers(2, 17))
        k = int(rng.integers(1, m + 1))
        yield i, random_instance(u, m, k, rng, float(rng.uniform(0.1, 0.5)))


def test_criterion_7_saturated_local_search_is_exact(report):
    t0 = time.perf_counter()
    mismatches = []
    for i, inst in _small_corpus():
        res = local_search_mc(inst, inst.m)
        opt = brute_force_mc(inst).coverage
        if res.solution.coverage != opt:
            mismatches.append((i, res.solution.coverage, opt))
    elapsed = time.perf_counter() - t0
    report(7, not mismatches, f"instances=200 mismatches={len(mismatches)} time={elapsed:.1f}s")
    assert not mismatches, mismatches


def test_criterion_8_local_optimum_certified(report):
    runs = failed = 0
    for i, inst in _small_corpus():
        for b in (1, 2, 3, inst.m):
            res = local_search_mc(inst, b)
            ok, move = verify_local_optimum(inst, res.solution, b)
            runs += 1
            if not (ok and res.certified):
                failed += 1
    report(8, failed == 0, f"runs={runs} certified={runs - failed} ({100 * (runs - failed) / runs:.1f}%)")
    assert failed == 0


def test_criterion_9_half_opt_floor(report):
    below = []
    ratios = {b: [] for b in (1, 2, 3)}
    at_least_greedy = {b: 0 for b in (1, 2, 3)}
    n = 0
    for i, inst in _small_corpus():
        opt = brute_force_mc(inst).coverage
        g = greedy_mc(inst).coverage
        n += 1
        for b in (1, 2, 3):
            cov = local_search_mc(inst, b).solution.coverage
            if 2 * cov < opt:
                below.append((i, b, cov, opt))
            ratios[b].append(F(cov, opt) if opt else F(1))
            at_least_greedy[b] += cov >= g
    stats = " ".join(
        f"b={b}:mean={float(sum(rs) / len(rs)):.4f},min={float(min(rs)):.4f},>=greedy={at_least_greedy[b] / n:.0%}"
        for b, rs in ratios.items()
    )
    report(9, not below, f"instances={n} below_half={len(below)} {stats}")
    assert not below, below


# ---------------------------------------------------------------------------
# 10. replay counting claims


def test_criterion_10_replay_counting_claims(report):
    done = skipped = 0
    failures = []
    i = 0
    while done < 100:
        rng = make_rng(SEED, 10, i)
        i += 1
        w = int(rng.integers(14, 21))
        md = bool(i % 2)
        g = grid_subgraph(w, w, 0.9, rng, triangulated=bool(rng.integers(0, 2)))
        k = max(2, g.n // (6 if md else 3))
        inst = (reduce_md if md else reduce_mvc)(g, k)
        provider = (MDProvider if md else MVCProvider)(g)
        A = local_search_mc(inst, 1, init="random", rng=rng).solution.chosen if i % 3 else greedy_mc(inst).chosen
        O = sorted(int(x) for x in rng.choice(g.n, size=k, replace=False))
        try:
            rep = analysis_replay(inst, A, O, provider, 8, q=2)
        except ParameterOutOfWindow:
            skipped += 1
            continue
        done += 1
        if not rep.ok:
            failures.append(
                (i, rep.lost_claim, rep.won_claim, rep.eq3_ok, rep.order_ok, len(rep.exchange_violations))
            )
    report(10, not failures, f"runs={done} failures={len(failures)} skipped_out_of_window={skipped}")
    assert not failures, failures


# ---------------------------------------------------------------------------
# 11. determinism


def _run(capsys, args):
    with pytest.raises(SystemExit) as exc:
        main([str(a) for a in args])
    out, err = capsys.readouterr()
    return exc.value.code, out, err


def test_criterion_11_determinism(capsys, tmp_path):
    g = tmp_path / "g.txt"
    gc = tmp_path / "gc.txt"
    inst = tmp_path / "i.json"
    mvc = tmp_path / "mvc.json"
    vec = tmp_path / "v.txt"
    a = tmp_path / "a.json"
    o = tmp_path / "o.json"
    div = tmp_path / "d.txt"
    part = tmp_path / "p.txt"
    _run(capsys, ["generate", "triangulated-grid", "--width", 30, "--random-diagonals", "--seed", 5, "-o", g])
    _run(capsys, ["generate", "grid", "--width", 40, "--colors", "random:3,7", "--seed", 5, "-o", gc])
    _run(capsys, ["generate", "mc-random", "--universe", 20, "--family", 12, "--k", 4, "--seed", 5, "-o", inst])
    _run(capsys, ["generate", "mvc-instance", "--width", 10, "--k", 30, "-o", mvc])
    vec.write_text("".join(f"{i % 5}/7 {(i * 3) % 7}/7\n" for i in range(40)))
    cov = reduce_mvc(grid(10), 30).coverage(range(30))
    a.write_text(f'{{"chosen": {list(range(30))}, "coverage": {cov}}}\n')
    _run(capsys, ["solve", mvc, "--b", 1, "-o", o])
    _run(capsys, ["divide", g, "--r", 16, "-o", div])
    _run(capsys, ["balance", vec, "--q", 3, "-o", part])
    commands = [
        ["generate", "grid", "--width", 12],
        ["generate", "triangulated-grid", "--width", 12, "--random-diagonals", "--seed", 3],
        ["generate", "grid-subgraph", "--width", 15, "--keep", "0.8", "--seed", 3],
        ["generate", "grid", "--width", 12, "--colors", "striped:3"],
        ["generate", "grid", "--width", 12, "--colors", "random:1,9", "--seed", 3],
        ["generate", "mc-random", "--universe", 20, "--family", 10, "--k", 3, "--seed", 3],
        ["divide", g, "--r", 16],
        ["divide", g, "--kind", "rf", "--r", 32],
        ["divide", gc, "--kind", "two-color", "--r", 16, "--q", 3],
        ["divide", gc, "--kind", "d-color", "--r", 16],
        ["balance", vec, "--q", 3],
        ["balance", vec, "--k", 4],
        ["verify", "graph", g],
        ["verify", "division", g, div],
        ["verify", "partition", vec, part, "--q", 3],
        ["solve", inst, "--b", 2, "--init", "random", "--seed", 3],
        ["exact", inst],
        ["exact", inst, "--method", "greedy"],
        ["replay", mvc.parent / "grid10.txt", "--problem", "mvc", "--k", 30, "--a", a, "--o", o, "--q", 1],
        ["bench", "--instances", 10, "--seed", 3, "--no-timing"],
    ]
    _run(capsys, ["generate", "grid", "--width", 10, "-o", tmp_path / "grid10.txt"])
    differing = []
    for cmd in commands:
        first = _run(capsys, cmd)
        second = _run(capsys, cmd)
        if first != second or first[0] != 0:
            differing.append((" ".join(map(str, cmd[:2])), first[0], second[0]))
    with capsys.disabled():
        print(f"\ncriterion 11: {'PASS' if not differing else 'FAIL'} commands={len(commands)} differing={len(differing)}")
    assert not differing, differing
