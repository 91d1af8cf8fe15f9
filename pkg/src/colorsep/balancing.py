"""Vector balancing: prefix-balanced permutations, chunkings and Steinitz orders.

All certificates are exact.  Rational inputs are brought to a common
denominator once and the hot loops then run on Python integers.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

import numpy as np

from .errors import InvalidParameter, NormViolation, UnbalancedInput


@dataclass(frozen=True)
class WeightedVectorSet:
    """Nonnegative rational vectors; for d = 2 also alpha and the total range [c_low, c_high]."""

    vectors: tuple
    alpha: Optional[Fraction] = None
    c_low: Optional[Fraction] = None
    c_high: Optional[Fraction] = None

    @property
    def dim(self):
        return len(self.vectors[0]) if self.vectors else 0

    @property
    def n(self):
        return len(self.vectors)

    @classmethod
    def from_pairs(cls, pairs, alpha=None, c_low=None, c_high=None):
        """Build a 2-dimensional set; alpha defaults to sum(a) / sum(b)."""
        vecs = tuple((Fraction(a), Fraction(b)) for a, b in pairs)
        sa = sum((v[0] for v in vecs), Fraction(0))
        sb = sum((v[1] for v in vecs), Fraction(0))
        if alpha is None:
            if sb == 0:
                raise UnbalancedInput("sum of second coordinates is zero; alpha undefined")
            alpha = sa / sb
        totals = [a + b for a, b in vecs]
        if c_low is None:
            c_low = min(totals, default=Fraction(0))
        if c_high is None:
            c_high = max(totals, default=Fraction(0))
        return cls(vecs, Fraction(alpha), Fraction(c_low), Fraction(c_high))

    def violations(self):
        out = []
        for i, v in enumerate(self.vectors):
            if len(v) != self.dim:
                out.append(("dimension", i))
            if any(x < 0 for x in v):
                out.append(("negative", i))
        if self.dim == 2 and self.alpha is not None:
            sa = sum((v[0] for v in self.vectors), Fraction(0))
            sb = sum((v[1] for v in self.vectors), Fraction(0))
            if sa != self.alpha * sb:
                out.append(("alpha-identity", sa, sb, self.alpha))
            for i, (a, b) in enumerate(self.vectors):
                if not (self.c_low <= a + b <= self.c_high):
                    out.append(("total-range", i, a + b))
        return out


@dataclass(frozen=True)
class BalancedPartition:
    permutation: tuple
    chunks: tuple
    q_prime: int
    # per chunk: signed sum of a - alpha*b (d = 2) or mu - sum(a) (vector case)
    discrepancy_certificates: tuple = ()
    # running sums before each position (d = 2 only)
    prefix_certificates: tuple = ()

    @property
    def k(self):
        return len(self.chunks)


def differences(v: WeightedVectorSet):
    """d_i = a_i - alpha * b_i, exact."""
    return [a - v.alpha * b for a, b in v.vectors]


def _common_denominator(values):
    den = 1
    for x in values:
        den = lcm(den, Fraction(x).denominator)
    return den


def balance_permutation(v: WeightedVectorSet):
    """Permutation whose running sums of d_i stay within [-c, c].

    Three buckets by the sign of d_i: a negative running sum draws from the
    positive bucket, a positive one from the negative bucket, zero from any.
    Inside the allowed bucket the element that brings the running sum
    closest to zero is taken, ties to the lowest index.
    """
    if v.dim != 2 or v.alpha is None:
        raise InvalidParameter("balance_permutation needs 2-dimensional vectors with alpha")
    bad = v.violations()
    if bad:
        raise UnbalancedInput(f"input violates its invariants: {bad[:3]}")
    ds = differences(v)
    if sum(ds, Fraction(0)) != 0:
        raise UnbalancedInput("sum of a_i - alpha*b_i is not zero")
    den = _common_denominator(ds)
    di = [int(x * den) for x in ds]
    pos = sorted((x, i) for i, x in enumerate(di) if x > 0)
    neg = sorted((-x, i) for i, x in enumerate(di) if x < 0)
    zero = [i for i, x in enumerate(di) if x == 0]
    zero.reverse()

    def take_closest(bucket, target):
        # entry (value, index) with value nearest target; ties: smaller value... then lowest index
        j = bisect.bisect_left(bucket, (target, -1))
        best = None
        for cand in (j - 1, j):
            if 0 <= cand < len(bucket):
                val = bucket[cand][0]
                first = bisect.bisect_left(bucket, (val, -1))
                key = (abs(val - target), bucket[first][1])
                if best is None or key < best[0]:
                    best = (key, first)
        return bucket.pop(best[1])

    perm = []
    delta = 0
    while len(perm) < len(di):
        if delta < 0:
            val, i = take_closest(pos, -delta)
            delta += val
        elif delta > 0:
            val, i = take_closest(neg, delta)
            delta -= val
        elif zero:
            i = zero.pop()
        else:
            # running sum is zero: take the smallest |d_i| from either side
            cands = []
            if pos:
                cands.append((pos[0][0], pos[0][1], "p"))
            if neg:
                cands.append((neg[0][0], neg[0][1], "n"))
            val, i, side = min(cands)
            if side == "p":
                pos.pop(0)
                delta += val
            else:
                neg.pop(0)
                delta -= val
        perm.append(i)
    return perm


def prefix_sums(values, perm):
    """delta_{<j} for j = 1..n+1 as exact Fractions."""
    out = [Fraction(0)]
    for i in perm:
        out.append(out[-1] + values[i])
    return out


def chunk_sizes(n, q):
    """Sizes of the consecutive chunks: k = n // q chunks, the first p of size q' + 1."""
    if q < 1:
        raise InvalidParameter(f"q must be >= 1, got {q}")
    if n < q:
        raise InvalidParameter(f"need n >= q, got n={n}, q={q}")
    k = n // q
    z = n % q
    w = z // k
    p = n - (q + w) * k
    return [q + w + 1] * p + [q + w] * (k - p), q + w


def chunk_permutation(perm, q: int, vectors: WeightedVectorSet = None) -> BalancedPartition:
    """Split a permutation into k = n // q consecutive chunks of size q' or q'+1."""
    perm = tuple(perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise InvalidParameter("not a permutation of 0..n-1")
    sizes, q_prime = chunk_sizes(n, q)
    chunks = []
    start = 0
    for s in sizes:
        chunks.append(perm[start : start + s])
        start += s
    certs = ()
    prefixes = ()
    if vectors is not None:
        ds = differences(vectors)
        certs = tuple(sum((ds[i] for i in ch), Fraction(0)) for ch in chunks)
        prefixes = tuple(prefix_sums(ds, perm))
    return BalancedPartition(perm, tuple(chunks), q_prime, certs, prefixes)


# ---------------------------------------------------------------------------
# Steinitz orderings


def _as_vectors(vectors):
    vecs = [tuple(Fraction(x) for x in v) for v in vectors]
    if not vecs:
        return vecs, 0
    d = len(vecs[0])
    if any(len(v) != d for v in vecs):
        raise InvalidParameter("vectors of mixed dimension")
    return vecs, d


def max_prefix_norm(vectors, perm):
    """max over l of the infinity norm of the first l vectors in ``perm`` order."""
    vecs, d = _as_vectors(vectors)
    run = [Fraction(0)] * d
    best = Fraction(0)
    for i in perm:
        run = [r + x for r, x in zip(run, vecs[i])]
        best = max(best, max((abs(r) for r in run), default=Fraction(0)))
    return best


def _null_vector(rows):
    """Nonzero rational vector y with rows @ y = 0 (rows has fewer rows than columns)."""
    m = [list(r) for r in rows]
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / Fraction(m[r][c])
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = next(c for c in range(ncols) if c not in pivots)
    y = [Fraction(0)] * ncols
    y[free] = Fraction(1)
    for row, c in enumerate(pivots):
        y[c] = -m[row][free]
    return y


def _grinberg_sevastyanov(ints, d):
    """Backward construction: keep lambda in [0,1]^V_m with sum(lambda_i b_i) = 0 and
    sum(lambda) = m - d; then the first m vectors sum to sum((1 - lambda_i) b_i),
    whose norm is at most d.  Each step rescales lambda and pivots on d + 2
    fractional coordinates until one reaches 0, which is dropped."""
    n = len(ints)
    arr = np.asarray(ints, dtype=np.int64) if n else np.zeros((0, d), dtype=np.int64)
    active = np.ones(n, dtype=bool)
    is_zero = np.zeros(n, dtype=bool)
    mu = [Fraction(1)] * n
    mu_f = np.ones(n)
    s = Fraction(n - d, n) if n > d else Fraction(0)
    S = arr.sum(axis=0) if n else np.zeros(d, dtype=np.int64)
    backwards = []
    m = n

    def drop(candidates):
        nonlocal S, m
        idx = np.flatnonzero(candidates)
        norms = np.abs(S[None, :] - arr[idx]).max(axis=1) if d else np.zeros(len(idx))
        i = int(idx[int(np.argmin(norms))])
        active[i] = False
        S = S - arr[i]
        backwards.append(i)
        m -= 1

    while m > d + 1:
        theta = Fraction(m - 1 - d, m - d)
        s = s * theta
        is_one = np.zeros(n, dtype=bool)
        while not (active & is_zero).any():
            frac = np.flatnonzero(active & ~is_zero & ~is_one)
            if len(frac) < d + 2:
                raise AssertionError("Steinitz pivot ran out of fractional coordinates")
            pick = frac[np.argsort(mu_f[frac], kind="stable")[: d + 2]]
            pick = [int(i) for i in pick]
            rows = [[int(ints[i][j]) for i in pick] for j in range(d)] + [[1] * len(pick)]
            y = _null_vector(rows)
            lam = [s * mu[i] for i in pick]
            best = None
            for sgn in (1, -1):
                hits = []
                for lam_i, y_i in zip(lam, y):
                    step = sgn * y_i
                    if step > 0:
                        hits.append(((1 - lam_i) / step, False))
                    elif step < 0:
                        hits.append((lam_i / -step, True))
                if not hits:
                    continue
                t_hit = min(t for t, _ in hits)
                hits_zero = any(z for t, z in hits if t == t_hit)
                key = (not hits_zero, sgn == -1)
                if best is None or key < best[0]:
                    best = (key, sgn, t_hit)
            _, sgn, t_hit = best
            for i, lam_i, y_i in zip(pick, lam, y):
                new = lam_i + sgn * t_hit * y_i
                if new == 0:
                    is_zero[i] = True
                    mu[i] = Fraction(0)
                elif new == 1:
                    is_one[i] = True
                    mu[i] = new / s
                else:
                    mu[i] = new / s
                mu_f[i] = float(mu[i])
        drop(active & is_zero)
    while m > 0:
        drop(active)
    backwards.reverse()
    return backwards


def _greedy_order(arr):
    n = len(arr)
    remaining = np.ones(n, dtype=bool)
    run = np.zeros(arr.shape[1], dtype=np.int64)
    out = []
    for _ in range(n):
        idx = np.flatnonzero(remaining)
        norms = np.abs(run[None, :] + arr[idx]).max(axis=1)
        i = int(idx[int(np.argmin(norms))])
        out.append(i)
        remaining[i] = False
        run = run + arr[i]
    return out


def _integer_max_prefix(arr, perm):
    if not len(perm):
        return 0
    return int(np.abs(np.cumsum(arr[list(perm)], axis=0)).max())


def steinitz_order(vectors, improve: bool = True):
    """Order zero-sum vectors of infinity norm <= 1 so that every prefix sum has
    infinity norm at most floor(3d/2).

    With ``improve`` the greedy order is tried first and kept when its exact
    maximum prefix norm already meets the bound; otherwise the backward
    construction (prefix norm <= d) runs and the better of the two is returned.
    """
    vecs, d = _as_vectors(vectors)
    n = len(vecs)
    if n == 0:
        return []
    for i, v in enumerate(vecs):
        if any(abs(x) > 1 for x in v):
            raise NormViolation(f"vector {i} has infinity norm above 1")
    for j in range(d):
        if sum(v[j] for v in vecs) != 0:
            raise UnbalancedInput("vectors do not sum to zero")
    den = _common_denominator(x for v in vecs for x in v)
    ints = [[int(x * den) for x in v] for v in vecs]
    if den * (n + 1) >= 2**62:
        raise InvalidParameter("common denominator too large for exact integer prefix arithmetic")
    arr = np.asarray(ints, dtype=np.int64)
    if improve:
        alt = _greedy_order(arr)
        best = _integer_max_prefix(arr, alt)
        if best <= (3 * d // 2) * den:
            return alt
    perm = _grinberg_sevastyanov(ints, d)
    if improve and best < _integer_max_prefix(arr, perm):
        perm = alt
    return perm


def segment_sizes(n, k):
    """k consecutive segment sizes differing by at most one, larger ones first."""
    base, extra = divmod(n, k)
    return [base + 1] * extra + [base] * (k - extra)


def vector_partition_steinitz(vectors, k: int) -> BalancedPartition:
    """Partition [0,1]^d vectors into k consecutive segments of a Steinitz order
    of b_i = (k/n) mu - a_i; every chunk sum is within 2*floor(3d/2) + 1 of mu."""
    vecs, d = _as_vectors(vectors)
    n = len(vecs)
    if not (1 <= k <= n):
        raise InvalidParameter(f"need 1 <= k <= n, got k={k}, n={n}")
    for i, v in enumerate(vecs):
        if any(x < 0 or x > 1 for x in v):
            raise NormViolation(f"vector {i} leaves [0,1]^d")
    total = [sum((v[j] for v in vecs), Fraction(0)) for j in range(d)]
    mu = [x / k for x in total]
    bs = [[total[j] / n - v[j] for j in range(d)] for v in vecs]
    perm = steinitz_order(bs)
    chunks = []
    start = 0
    for s in segment_sizes(n, k):
        chunks.append(tuple(perm[start : start + s]))
        start += s
    certs = tuple(tuple(mu[j] - sum((vecs[i][j] for i in ch), Fraction(0)) for j in range(d)) for ch in chunks)
    return BalancedPartition(tuple(perm), tuple(chunks), n // k, certs)


def chunk_discrepancy(cert):
    """Infinity norm of a vector certificate, or |x| of a scalar one."""
    if isinstance(cert, tuple):
        return max((abs(x) for x in cert), default=Fraction(0))
    return abs(cert)


# ---------------------------------------------------------------------------
# text format: permutation line, then one line per chunk


def format_partition(p: BalancedPartition) -> str:
    lines = [" ".join(map(str, p.permutation))]
    lines += [" ".join(map(str, ch)) for ch in p.chunks]
    return "\n".join(lines) + "\n"


def parse_partition(text: str) -> BalancedPartition:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise InvalidParameter("empty partition file")
    perm = tuple(int(x) for x in lines[0].split())
    chunks = tuple(tuple(int(x) for x in ln.split()) for ln in lines[1:])
    q_prime = min((len(c) for c in chunks), default=0)
    return BalancedPartition(perm, chunks, q_prime)
