"""Seeded instance generators: planar graphs with rotation systems, colorings,
and coverage instances.

All randomness comes from ``make_rng(seed)``; child generators are derived with
``spawn`` so that adding a consumer never shifts another consumer's stream.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidParameter
from .graph import Graph, connected_components, induced_subgraph


def make_rng(seed, *spawn_key):
    """PCG64 generator for ``seed``; extra ints select an independent child stream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in spawn_key))
    return np.random.Generator(np.random.PCG64(ss))


def spawn(seed, count):
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(int(seed)).spawn(count)]


def _angle_rotation(n, coords, adj):
    rot = []
    for v in range(n):
        x, y = coords[v]
        rot.append(tuple(sorted(adj[v], key=lambda u: math.atan2(coords[u][1] - y, coords[u][0] - x) % (2 * math.pi))))
    return rot


def grid(width, height=None):
    """width x height grid; vertex (x, y) has id y*width + x."""
    height = width if height is None else height
    if width < 1 or height < 1:
        raise InvalidParameter("grid dimensions must be positive")
    n = width * height
    edges = []
    rot = []
    for y in range(height):
        for x in range(width):
            v = y * width + x
            if x + 1 < width:
                edges.append((v, v + 1))
            if y + 1 < height:
                edges.append((v, v + width))
            r = []
            if x + 1 < width:
                r.append(v + 1)
            if y + 1 < height:
                r.append(v + width)
            if x > 0:
                r.append(v - 1)
            if y > 0:
                r.append(v - width)
            rot.append(r)
    return Graph.from_edges(n, edges, rotation=rot)


def triangulated_grid(width, height=None, rng=None):
    """Grid with one diagonal per cell.

    Without ``rng`` every cell gets the diagonal (x, y)-(x+1, y+1); with an
    ``rng`` each cell picks one of its two diagonals at random.
    """
    height = width if height is None else height
    if width < 1 or height < 1:
        raise InvalidParameter("grid dimensions must be positive")
    n = width * height
    coords = [(v % width, v // width) for v in range(n)]
    edges = []
    for y in range(height):
        for x in range(width):
            v = y * width + x
            if x + 1 < width:
                edges.append((v, v + 1))
            if y + 1 < height:
                edges.append((v, v + width))
            if x + 1 < width and y + 1 < height:
                if rng is None or rng.random() < 0.5:
                    edges.append((v, v + width + 1))
                else:
                    edges.append((v + 1, v + width))
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return Graph.from_edges(n, edges, rotation=_angle_rotation(n, coords, adj))


def grid_subgraph(width, height, keep, rng, triangulated=False, connected=True):
    """Induced subgraph of a (triangulated) grid on a random vertex subset.

    With ``connected`` only the largest component is returned.
    """
    base = triangulated_grid(width, height, rng) if triangulated else grid(width, height)
    kept = [v for v in range(base.n) if rng.random() < keep]
    sub, _ = induced_subgraph(base, kept)
    if connected and sub.n:
        comps = connected_components(sub)
        big = max(comps, key=lambda c: (len(c), -c[0]))
        sub, _ = induced_subgraph(sub, big)
    return sub


def striped_colors(g: Graph, width, d):
    """Color vertex (x, y) of a width-wide grid by x mod d."""
    return g.with_colors([(v % width) % d for v in range(g.n)], d)


def checkerboard_colors(g: Graph, width):
    return g.with_colors([((v % width) + (v // width)) % 2 for v in range(g.n)], 2)


def random_colors(g: Graph, weights, rng):
    """Independent colors drawn with probabilities proportional to ``weights``."""
    p = np.asarray(weights, dtype=float)
    p = p / p.sum()
    cols = rng.choice(len(p), size=g.n, p=p)
    return g.with_colors([int(c) for c in cols], len(p))


def random_family(universe_size, family_size, rng, density=0.3):
    """Random set family as int bitmasks; every set is nonempty."""
    fam = []
    for _ in range(family_size):
        bits = rng.random(universe_size) < density
        if universe_size and not bits.any():
            bits[int(rng.integers(universe_size))] = True
        mask = 0
        for e in np.flatnonzero(bits):
            mask |= 1 << int(e)
        fam.append(mask)
    return fam
