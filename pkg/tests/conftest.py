import pytest

from colorsep.graph import Graph


def wheel(k):
    """Hub 0 joined to a k-cycle 1..k, embedded counter-clockwise."""
    edges = [(0, i) for i in range(1, k + 1)] + [(i, i % k + 1) for i in range(1, k + 1)]
    rot = [list(range(1, k + 1))]
    for i in range(1, k + 1):
        prev = k if i == 1 else i - 1
        nxt = 1 if i == k else i + 1
        rot.append([nxt, 0, prev])
    return Graph.from_edges(k + 1, edges, rotation=rot)


def path(n):
    edges = [(i, i + 1) for i in range(n - 1)]
    rot = [[u for u in (i - 1, i + 1) if 0 <= u < n] for i in range(n)]
    return Graph.from_edges(n, edges, rotation=rot)


def star(leaves):
    edges = [(0, i) for i in range(1, leaves + 1)]
    rot = [list(range(1, leaves + 1))] + [[0] for _ in range(leaves)]
    return Graph.from_edges(leaves + 1, edges, rotation=rot)


def complete4():
    # K4 drawn as a triangle 1,2,3 around a centre 0
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (1, 3)]
    rot = [[1, 2, 3], [2, 0, 3], [3, 0, 1], [1, 0, 2]]
    return Graph.from_edges(4, edges, rotation=rot)


@pytest.fixture
def make_wheel():
    return wheel
