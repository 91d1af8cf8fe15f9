"""Undirected simple graphs with an optional rotation system and vertex colors.

A rotation system lists, for every vertex, its neighbours in cyclic
(counter-clockwise) order.  Faces are traced with the rule

    next(u -> v) = v -> succ_v(u)

where ``succ_v`` is the cyclic successor in the rotation of ``v``; the face of
a half-edge is the one on its right.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import InvalidGraph


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    adjacency: tuple
    rotation: Optional[tuple] = None
    colors: Optional[tuple] = None
    num_colors: int = 0

    @classmethod
    def from_edges(cls, n, edges, rotation=None, colors=None, num_colors=None):
        """Build a graph from an edge list; duplicate edges and loops are rejected."""
        adj = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraph(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InvalidGraph(f"self-loop at {u}")
            if v in adj[u]:
                raise InvalidGraph(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        adjacency = tuple(tuple(sorted(a)) for a in adj)
        rot = None if rotation is None else tuple(tuple(r) for r in rotation)
        cols = None
        if colors is not None:
            cols = tuple(int(c) for c in colors)
            if num_colors is None:
                num_colors = (max(cols) + 1) if cols else 0
        return cls(n, adjacency, rot, cols, num_colors or 0)

    @property
    def n(self):
        return self.vertex_count

    @property
    def edge_count(self):
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self):
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def neighbors(self, v):
        return self.adjacency[v]

    def with_colors(self, colors, num_colors=None):
        cols = tuple(int(c) for c in colors)
        if len(cols) != self.vertex_count:
            raise InvalidGraph("one color per vertex required")
        if num_colors is None:
            num_colors = (max(cols) + 1) if cols else 0
        return Graph(self.vertex_count, self.adjacency, self.rotation, cols, num_colors)

    def without_rotation(self):
        return Graph(self.vertex_count, self.adjacency, None, self.colors, self.num_colors)


def induced_subgraph(g: Graph, vertices: Iterable[int]):
    """Return (subgraph, mapping) with vertices relabelled 0..k-1 in sorted order.

    ``mapping[i]`` is the original id of new vertex ``i``.  Rotation and
    colors are restricted.
    """
    mapping = sorted(set(vertices))
    local = {v: i for i, v in enumerate(mapping)}
    adjacency = tuple(tuple(sorted(local[u] for u in g.adjacency[v] if u in local)) for v in mapping)
    rotation = None
    if g.rotation is not None:
        rotation = tuple(tuple(local[u] for u in g.rotation[v] if u in local) for v in mapping)
    colors = None if g.colors is None else tuple(g.colors[v] for v in mapping)
    return Graph(len(mapping), adjacency, rotation, colors, g.num_colors), mapping


def connected_components(g: Graph, vertices: Optional[Iterable[int]] = None):
    """Components of the subgraph induced by ``vertices`` (all by default).

    Each component is a sorted list; components are ordered by smallest vertex.
    """
    if vertices is None:
        allowed = None
        order = range(g.vertex_count)
    else:
        allowed = set(vertices)
        order = sorted(allowed)
    seen = set()
    comps = []
    for s in order:
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.adjacency[x]:
                if y not in seen and (allowed is None or y in allowed):
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        comp.sort()
        comps.append(comp)
    return comps


def neighborhood(g: Graph, vertices: Iterable[int]):
    """Open neighbourhood N(S): vertices outside S adjacent to some vertex of S."""
    s = set(vertices)
    out = set()
    for v in s:
        out.update(g.adjacency[v])
    return out - s


def trace_faces(rotation: Sequence[Sequence[int]]):
    """Trace the faces of a rotation system.

    Returns a list of faces, each a list of half-edges ``(u, v)``.  Isolated
    vertices contribute no half-edges (callers count them separately).
    """
    n = len(rotation)
    off = [0] * (n + 1)
    for v in range(n):
        off[v + 1] = off[v] + len(rotation[v])
    pos = [{u: i for i, u in enumerate(r)} for r in rotation]
    tail = [0] * off[n]
    for v in range(n):
        for i in range(off[v], off[v + 1]):
            tail[i] = v
    heads = [u for r in rotation for u in r]
    seen = [False] * off[n]
    faces = []
    for h0 in range(off[n]):
        if seen[h0]:
            continue
        face = []
        h = h0
        while not seen[h]:
            seen[h] = True
            a, b = tail[h], heads[h]
            face.append((a, b))
            deg = off[b + 1] - off[b]
            h = off[b] + (pos[b][a] + 1) % deg
        faces.append(face)
    return faces


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    components: int = 0
    faces: Optional[int] = None
    euler_ok: Optional[bool] = None

    @property
    def valid(self):
        return not self.violations


def validate_graph(g: Graph) -> ValidationReport:
    """Check symmetry, loops, duplicates, rotation consistency and Euler's formula.

    Never raises; every defect is reported as a tuple in ``violations``.
    """
    report = ValidationReport()
    n = g.vertex_count
    if len(g.adjacency) != n:
        report.violations.append(("adjacency-length", len(g.adjacency), n))
        return report
    for u, nbrs in enumerate(g.adjacency):
        if len(set(nbrs)) != len(nbrs):
            report.violations.append(("duplicate", u))
        for v in nbrs:
            if v == u:
                report.violations.append(("self-loop", u))
            elif not (0 <= v < n):
                report.violations.append(("out-of-range", u, v))
            elif u not in g.adjacency[v]:
                report.violations.append(("symmetry", u, v))
    if g.colors is not None:
        if len(g.colors) != n:
            report.violations.append(("colors-length", len(g.colors), n))
        else:
            for v, c in enumerate(g.colors):
                if not (0 <= c < max(g.num_colors, 1)):
                    report.violations.append(("color-range", v, c))
    if report.violations:
        return report

    comps = connected_components(g)
    report.components = len(comps)
    if g.rotation is None:
        return report
    if len(g.rotation) != n:
        report.violations.append(("rotation-length", len(g.rotation), n))
        return report
    for v in range(n):
        if sorted(g.rotation[v]) != list(g.adjacency[v]):
            report.violations.append(("rotation-mismatch", v))
    if report.violations:
        return report

    faces = trace_faces(g.rotation)
    comp_of = [0] * n
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    face_count = [0] * len(comps)
    for face in faces:
        face_count[comp_of[face[0][0]]] += 1
    edge_count = [0] * len(comps)
    for u, v in g.edges():
        edge_count[comp_of[u]] += 1
    euler_ok = True
    total_faces = 0
    for ci, comp in enumerate(comps):
        f = face_count[ci] if edge_count[ci] else 1
        total_faces += f
        if len(comp) - edge_count[ci] + f != 2:
            euler_ok = False
            report.violations.append(("euler", ci, len(comp), edge_count[ci], f))
    # faces of a disconnected embedding share the outer face
    report.faces = total_faces - max(len(comps) - 1, 0) if comps else 0
    report.euler_ok = euler_ok
    return report


def is_planar_embedding(g: Graph) -> bool:
    if g.rotation is None:
        return False
    rep = validate_graph(g)
    return rep.valid and bool(rep.euler_ok or g.vertex_count == 0)


# ---------------------------------------------------------------------------
# text format
#
#   n m [rot] [colors d]
#   m lines "u v"
#   n rotation lines (if rot)
#   n color lines (if colors)


def format_graph(g: Graph) -> str:
    header = [str(g.vertex_count), str(g.edge_count)]
    if g.rotation is not None:
        header.append("rot")
    if g.colors is not None:
        header += ["colors", str(g.num_colors)]
    lines = [" ".join(header)]
    lines += [f"{u} {v}" for u, v in g.edges()]
    if g.rotation is not None:
        lines += [" ".join(map(str, r)) for r in g.rotation]
    if g.colors is not None:
        lines += [str(c) for c in g.colors]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise InvalidGraph("empty graph file")
    head = lines[0].split()
    try:
        n, m = int(head[0]), int(head[1])
    except (IndexError, ValueError):
        raise InvalidGraph(f"bad header line: {lines[0]!r}") from None
    has_rot = "rot" in head
    num_colors = None
    if "colors" in head:
        num_colors = int(head[head.index("colors") + 1])
    cursor = 1
    edges = []
    for _ in range(m):
        u, v = lines[cursor].split()
        edges.append((int(u), int(v)))
        cursor += 1
    rotation = None
    if has_rot:
        rotation = [tuple(int(x) for x in lines[cursor + i].split()) for i in range(n)]
        cursor += n
    colors = None
    if num_colors is not None:
        colors = [int(lines[cursor + i]) for i in range(n)]
        cursor += n
    g = Graph.from_edges(n, edges, rotation=rotation, colors=colors, num_colors=num_colors)
    return g


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))
