"""Exchange graphs between two disjoint solutions, and an exhaustive checker."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import OverlappingSolutions
from ..graph import Graph
from .instance import CoverageInstance


@dataclass(frozen=True)
class ExchangeGraph:
    """Graph on the disjoint union of two solutions.

    Local vertex j stands for family index ``nodes[j]``; ``side[j]`` is "A"
    or "O".  The graph keeps a rotation system whenever the provider could
    derive one from the input embedding.
    """

    graph: Graph
    nodes: tuple
    side: tuple
    provenance: str

    def local_ids(self, which):
        return [j for j, s in enumerate(self.side) if s == which]

    def family_edges(self):
        return sorted((self.nodes[u], self.nodes[v]) for u, v in self.graph.edges())


def _check_disjoint(D, D2):
    both = set(D) & set(D2)
    if both:
        raise OverlappingSolutions(f"solutions share {sorted(both)[:5]}")


def _build(g, D, D2, keep_edges, provenance):
    """Exchange graph on D u D2 with the given g-edges, rotation restricted from g."""
    nodes = sorted(set(D) | set(D2))
    local = {v: j for j, v in enumerate(nodes)}
    dset = set(D)
    adj = {v: set() for v in nodes}
    for u, v in keep_edges:
        adj[u].add(v)
        adj[v].add(u)
    edges = sorted({(min(local[u], local[v]), max(local[u], local[v])) for u in nodes for v in adj[u]})
    rot = None
    if g.rotation is not None:
        rot = [[local[u] for u in g.rotation[v] if u in adj[v]] for v in nodes]
    graph = Graph.from_edges(len(nodes), edges, rotation=rot)
    side = tuple("A" if v in dset else "O" for v in nodes)
    return ExchangeGraph(graph, tuple(nodes), side, provenance)


def exchange_graph_mvc(g: Graph, D, D2) -> ExchangeGraph:
    """Edges of g with one end in D and the other in D2: exactly the doubly covered edges."""
    _check_disjoint(D, D2)
    dset, d2set = set(D), set(D2)
    keep = [(u, v) for u, v in g.edges() if (u in dset and v in d2set) or (u in d2set and v in dset)]
    return _build(g, D, D2, keep, "mvc")


def exchange_graph_md(g: Graph, D, D2) -> ExchangeGraph:
    """Minor of g witnessing every doubly dominated vertex.

    u in D dominated by D2: edge to its lowest D2 neighbour.  u in D2
    dominated by D: edge to its lowest D neighbour.  u in neither: an
    auxiliary node joined to its lowest D and lowest D2 neighbours, then
    contracted into the D side, which leaves the edge between those two.
    Suppressing a degree-two node keeps the rotation system planar.
    """
    _check_disjoint(D, D2)
    dset, d2set = set(D), set(D2)
    nodes = sorted(dset | d2set)
    # adjacency among D u D2; auxiliary nodes wait in ``aux`` until contracted
    adj = {v: set() for v in nodes}
    aux = {}

    def dominated(u, side):
        return u in side or any(w in side for w in g.adjacency[u])

    for u in range(g.n):
        if not (dominated(u, dset) and dominated(u, d2set)):
            continue
        if u in dset:
            w = min(w for w in g.adjacency[u] if w in d2set)
            adj[u].add(w)
            adj[w].add(u)
        elif u in d2set:
            w = min(w for w in g.adjacency[u] if w in dset)
            adj[u].add(w)
            adj[w].add(u)
        else:
            a = min(w for w in g.adjacency[u] if w in dset)
            o = min(w for w in g.adjacency[u] if w in d2set)
            aux[u] = (a, o)

    rot = None
    if g.rotation is not None:
        rot = {}
        for v in nodes:
            rot[v] = [u for u in g.rotation[v] if u in adj[v] or (u in aux and v in aux[u])]
    for c, (a, o) in sorted(aux.items()):
        fresh = o not in adj[a]
        adj[a].add(o)
        adj[o].add(a)
        if rot is not None:
            for x, y in ((a, o), (o, a)):
                r = rot[x]
                pos = r.index(c)
                if fresh:
                    r[pos] = y
                else:
                    del r[pos]
    local = {v: j for j, v in enumerate(nodes)}
    edges = sorted({(min(local[u], local[v]), max(local[u], local[v])) for u in nodes for v in adj[u]})
    lrot = None if rot is None else [[local[u] for u in rot[v]] for v in nodes]
    graph = Graph.from_edges(len(nodes), edges, rotation=lrot)
    side = tuple("A" if v in dset else "O" for v in nodes)
    return ExchangeGraph(graph, tuple(nodes), side, "md")


def exchange_violations(inst: CoverageInstance, A, O, h: ExchangeGraph):
    """Elements covered by both solutions that no A-O edge of h witnesses.

    Pure recomputation: for every edge (S, S') with S in A and S' in O mark
    S n S', then compare against (union A) n (union O).
    """
    aset, oset = set(A), set(O)
    witnessed = 0
    for u, v in h.graph.edges():
        s, t = h.nodes[u], h.nodes[v]
        if (s in aset and t in oset) or (s in oset and t in aset):
            witnessed |= inst.family[s] & inst.family[t]
    both = inst.union(aset) & inst.union(oset)
    missing = both & ~witnessed
    out = []
    j = 0
    while missing:
        if missing & 1:
            out.append(j)
        missing >>= 1
        j += 1
    return out


class MVCProvider:
    """Exchange graphs for Maximum Vertex Cover instances built by reduce_mvc(g)."""

    name = "mvc"

    def __init__(self, g: Graph):
        self.g = g

    def __call__(self, A, O) -> ExchangeGraph:
        return exchange_graph_mvc(self.g, A, O)


class MDProvider:
    """Exchange graphs for Maximum Dominating Set instances built by reduce_md(g)."""

    name = "md"

    def __init__(self, g: Graph):
        self.g = g

    def __call__(self, A, O) -> ExchangeGraph:
        return exchange_graph_md(self.g, A, O)
