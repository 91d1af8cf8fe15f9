from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from colorsep.balancing import (
    WeightedVectorSet,
    balance_permutation,
    chunk_discrepancy,
    chunk_permutation,
    chunk_sizes,
    differences,
    format_partition,
    max_prefix_norm,
    parse_partition,
    prefix_sums,
    steinitz_order,
    vector_partition_steinitz,
)
from colorsep.errors import InvalidParameter, NormViolation, UnbalancedInput
from colorsep.generators import make_rng


def max_segment(ds, perm):
    """Largest |sum| over all consecutive segments, by brute force."""
    pre = prefix_sums(ds, perm)
    return max((abs(pre[j] - pre[i]) for i in range(len(pre)) for j in range(i, len(pre))), default=0)


def random_pairs(rng, n, den=12):
    out = []
    for _ in range(n):
        total = F(int(rng.integers(den // 2, den + 1)), den)
        a = total * F(int(rng.integers(0, den + 1)), den)
        out.append((a, total - a))
    # keep alpha <= 1 so that |d_i| <= a_i + b_i <= c
    if sum(a for a, _ in out) > sum(b for _, b in out):
        out = [(b, a) for a, b in out]
    return out


def zero_sum_vectors(rng, n, d, den=7):
    vs = [tuple(F(int(x), den) for x in rng.integers(-den, den + 1, size=d)) for _ in range(n)]
    s = [sum(v[j] for v in vs) for j in range(d)]
    while any(s):
        fix = tuple(max(-1, min(1, -x)) for x in s)
        vs.append(fix)
        s = [x + y for x, y in zip(s, fix)]
    return vs


def test_alternating_unit_vectors():
    v = WeightedVectorSet.from_pairs([(1, 0), (0, 1), (1, 0), (0, 1)], alpha=1)
    perm = balance_permutation(v)
    ds = differences(v)
    assert [ds[i] for i in perm] in ([1, -1, 1, -1], [-1, 1, -1, 1])
    assert all(abs(x) <= 1 for x in prefix_sums(ds, perm))


def test_single_vector():
    v = WeightedVectorSet.from_pairs([(F(1, 2), F(1, 2))], alpha=1)
    perm = balance_permutation(v)
    assert perm == [0]
    assert prefix_sums(differences(v), perm) == [0, 0]


def test_unbalanced_rejected():
    v = WeightedVectorSet.from_pairs([(1, 0), (0, 1)], alpha=2, c_low=1, c_high=1)
    with pytest.raises(UnbalancedInput):
        balance_permutation(v)


def test_random_200_segments_within_2c():
    rng = make_rng(4)
    v = WeightedVectorSet.from_pairs(random_pairs(rng, 200))
    perm = balance_permutation(v)
    assert sorted(perm) == list(range(200))
    assert max_segment(differences(v), perm) <= 2 * v.c_high


@pytest.mark.parametrize(
    "n,q,sizes,q_prime",
    [(10, 3, [4, 3, 3], 3), (25, 4, [5, 4, 4, 4, 4, 4], 4), (7, 7, [7], 7), (17, 5, [6, 6, 5], 5)],
)
def test_chunk_sizes(n, q, sizes, q_prime):
    assert chunk_sizes(n, q) == (sizes, q_prime)


def test_chunk_errors():
    with pytest.raises(InvalidParameter):
        chunk_sizes(5, 0)
    with pytest.raises(InvalidParameter):
        chunk_sizes(3, 4)
    with pytest.raises(InvalidParameter):
        chunk_permutation([0, 0, 1], 1)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 60), st.integers(1, 3000))
def test_chunk_sizes_in_range(q, n):
    if n < q:
        return
    sizes, qp = chunk_sizes(n, q)
    assert sum(sizes) == n and len(sizes) == n // q
    assert q <= qp <= 2 * q - 1 or q == 1 and qp == 1
    assert set(sizes) <= {qp, qp + 1}


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 80), st.integers(1, 8), st.integers(0, 10**6))
def test_chunks_inherit_2c(n, q, seed):
    if n < q:
        return
    pairs = random_pairs(make_rng(seed), n)
    if sum(b for _, b in pairs) == 0:
        return
    v = WeightedVectorSet.from_pairs(pairs)
    perm = balance_permutation(v)
    part = chunk_permutation(perm, q, v)
    flat = [i for ch in part.chunks for i in ch]
    assert tuple(flat) == part.permutation
    assert all(abs(c) <= 2 * v.c_high for c in part.discrepancy_certificates)
    assert all(abs(x) <= v.c_high for x in part.prefix_certificates)


def test_steinitz_examples():
    v = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    assert max_prefix_norm(v, steinitz_order(v)) <= 1
    w = [1, 1, -1, -1]
    w = [(x,) for x in w]
    perm = steinitz_order(w)
    assert max_prefix_norm(w, perm) == 1
    rng = make_rng(60)
    vs = zero_sum_vectors(rng, 60, 3)
    assert max_prefix_norm(vs, steinitz_order(vs)) <= 4


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_backward_construction_reaches_d(d):
    # improve=False forces the exact construction, whose prefix bound is d
    rng = make_rng(7, d)
    vs = zero_sum_vectors(rng, 40, d)
    perm = steinitz_order(vs, improve=False)
    assert sorted(perm) == list(range(len(vs)))
    assert max_prefix_norm(vs, perm) <= d


def test_backward_construction_on_adversarial_order():
    # all +1 then all -1 in one coordinate: the input order has prefix n/2
    vs = [(1, 0)] * 10 + [(-1, 0)] * 10 + [(0, 1)] * 5 + [(0, -1)] * 5
    perm = steinitz_order(vs, improve=False)
    assert max_prefix_norm(vs, perm) <= 2


def test_steinitz_errors():
    with pytest.raises(UnbalancedInput):
        steinitz_order([(1,), (0,)])
    with pytest.raises(NormViolation):
        steinitz_order([(2,), (-2,)])
    assert steinitz_order([]) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 120), st.integers(0, 10**6))
def test_steinitz_prefix_bound(d, n, seed):
    vs = zero_sum_vectors(make_rng(seed), n, d)
    perm = steinitz_order(vs)
    assert sorted(perm) == list(range(len(vs)))
    assert max_prefix_norm(vs, perm) <= 3 * d // 2


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3), st.integers(1, 25), st.integers(0, 10**6))
def test_backward_construction_property(d, n, seed):
    vs = zero_sum_vectors(make_rng(seed), n, d)
    assert max_prefix_norm(vs, steinitz_order(vs, improve=False)) <= d


def test_vector_partition_examples():
    vs = [(F(1, 3), F(2, 3)), (1, 0), (0, 1)]
    p = vector_partition_steinitz(vs, 1)
    assert chunk_discrepancy(p.discrepancy_certificates[0]) == 0
    p = vector_partition_steinitz([(1,), (0,), (1,), (0,)], 2)
    assert all(chunk_discrepancy(c) <= 1 for c in p.discrepancy_certificates)
    rng = make_rng(100)
    vs = [tuple(F(int(x), 9) for x in rng.integers(0, 10, size=2)) for _ in range(100)]
    p = vector_partition_steinitz(vs, 7)
    sizes = sorted(len(c) for c in p.chunks)
    assert sizes[-1] - sizes[0] <= 1 and sum(sizes) == 100
    assert all(chunk_discrepancy(c) < 7 for c in p.discrepancy_certificates)


def test_vector_partition_errors():
    with pytest.raises(InvalidParameter):
        vector_partition_steinitz([(0,)], 2)
    with pytest.raises(NormViolation):
        vector_partition_steinitz([(2,), (0,)], 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 150), st.integers(1, 20), st.integers(0, 10**6))
def test_vector_partition_bound(d, n, k, seed):
    if k > n:
        return
    rng = make_rng(seed)
    vs = [tuple(F(int(x), 5) for x in rng.integers(0, 6, size=d)) for _ in range(n)]
    p = vector_partition_steinitz(vs, k)
    mu = [sum(v[j] for v in vs) / k for j in range(d)]
    for ch, cert in zip(p.chunks, p.discrepancy_certificates):
        direct = tuple(mu[j] - sum(vs[i][j] for i in ch) for j in range(d))
        assert direct == cert
        assert chunk_discrepancy(cert) < 2 * (3 * d // 2) + 1


def test_partition_roundtrip():
    v = WeightedVectorSet.from_pairs(random_pairs(make_rng(1), 30))
    part = chunk_permutation(balance_permutation(v), 4)
    back = parse_partition(format_partition(part))
    assert back.permutation == part.permutation and back.chunks == part.chunks
    assert back.q_prime == part.q_prime


def test_deterministic():
    v = WeightedVectorSet.from_pairs(random_pairs(make_rng(2), 50))
    assert balance_permutation(v) == balance_permutation(v)
    vs = zero_sum_vectors(make_rng(3), 50, 3)
    assert steinitz_order(vs) == steinitz_order(vs)


def test_weighted_vector_set_violations():
    v = WeightedVectorSet(((F(1), F(-1)),), F(1), F(0), F(1))
    kinds = {x[0] for x in v.violations()}
    assert "negative" in kinds
