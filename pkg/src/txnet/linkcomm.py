"""Link communities: hierarchical clustering of edges cut at maximum partition density.

Two edges ``(i, k)`` and ``(j, k)`` that share node ``k`` are compared by the
Jaccard index of the inclusive neighbourhoods of ``i`` and ``j``. Edges are
merged by single linkage, one similarity level at a time (all pairs at the
same similarity merge together), and the level whose partition has the
highest partition density is returned. On equal density the coarser level
wins, so a graph whose every cut scores zero comes back as one community.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import EmptyGraph, InvalidPartition, NotAdjacent
from .graph import TxGraph, simple_projection


@dataclass
class CommunityPartition:
    communities: list[list[tuple[int, int]]]
    node_membership: dict[int, set[int]]
    partition_density: float


@dataclass
class CommunityProfile:
    index: int
    edge_count: int
    node_count: int
    degrees: dict[int, tuple[int, int]] = field(default_factory=dict)  # node -> (in, out)


def _undirected_edges(g: TxGraph) -> list[tuple[int, int]]:
    """Lexicographically sorted ``(u, v)``, ``u < v``, of the simple undirected graph."""
    return sorted(set(zip(*(np.minimum(g.src, g.dst).tolist(), np.maximum(g.src, g.dst).tolist()))))


def _neighbourhoods(n: int, edges) -> list[set[int]]:
    nb = [set() for _ in range(n)]
    for u, v in edges:
        nb[u].add(v)
        nb[v].add(u)
    return nb


def edge_similarity(g: TxGraph, e1: tuple[int, int], e2: tuple[int, int]) -> float:
    """Jaccard index of the inclusive neighbourhoods of the unshared endpoints."""
    shared = set(e1) & set(e2)
    if len(shared) != 1 or len(set(e1)) != 2 or len(set(e2)) != 2:
        raise NotAdjacent(f"edges {e1} and {e2} do not share exactly one endpoint")
    nb = _neighbourhoods(g.n_nodes, _undirected_edges(g))
    (k,) = shared
    i = e1[0] if e1[1] == k else e1[1]
    j = e2[0] if e2[1] == k else e2[1]
    a, b = nb[i] | {i}, nb[j] | {j}
    return len(a & b) / len(a | b)


def _density_term(m: int, n: int) -> Fraction:
    if n <= 2:
        return Fraction(0)
    return Fraction(m * (m - (n - 1)), (n - 2) * (n - 1))


def partition_density(g: TxGraph, partition) -> float:
    """``(2/M) * sum_c m_c (m_c - n_c + 1) / ((n_c - 2)(n_c - 1))`` over communities."""
    communities = partition.communities if isinstance(partition, CommunityPartition) else partition
    edges = _undirected_edges(g)
    _check_cover(edges, communities)
    if not edges:
        return 0.0
    total = Fraction(0)
    for comm in communities:
        nodes = {u for e in comm for u in e}
        total += _density_term(len(comm), len(nodes))
    return float(2 * total / len(edges))


def _check_cover(edges, communities) -> None:
    seen: set[tuple[int, int]] = set()
    for comm in communities:
        for u, v in comm:
            e = (min(u, v), max(u, v))
            if e in seen:
                raise InvalidPartition(f"edge {e} appears twice")
            seen.add(e)
    if seen != set(edges):
        missing = sorted(set(edges) - seen)
        raise InvalidPartition(f"edges not covered: {missing[:5]}" if missing
                               else "partition contains edges not in the graph")


class _UnionFind:
    def __init__(self, edges):
        self.parent = list(range(len(edges)))
        self.m = [1] * len(edges)
        self.nodes = [set(e) for e in edges]

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        """Merge the roots ``a`` and ``b``; the smaller-id root survives."""
        if a > b:
            a, b = b, a
        self.parent[b] = a
        self.m[a] += self.m[b]
        if len(self.nodes[a]) < len(self.nodes[b]):
            self.nodes[a], self.nodes[b] = self.nodes[b], self.nodes[a]
        self.nodes[a] |= self.nodes[b]
        self.nodes[b] = set()
        return a


def similarity_pairs(g: TxGraph):
    """Sorted edge list plus ``(first, second, sim)`` for all adjacent edge pairs."""
    edges = _undirected_edges(g)
    n = g.n_nodes
    if not edges:
        z = np.zeros(0, dtype=np.int64)
        return edges, z, z, np.zeros(0)
    eu = np.array([e[0] for e in edges], dtype=np.int64)
    ev = np.array([e[1] for e in edges], dtype=np.int64)
    # symmetric CSR whose entries remember which edge they came from
    rows = np.concatenate([eu, ev])
    cols = np.concatenate([ev, eu])
    eid = np.concatenate([np.arange(len(edges)), np.arange(len(edges))])
    order = np.lexsort((cols, rows))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    first, second, sim = _kernels.edge_pair_similarities(indptr, cols[order], eid[order])
    return edges, first, second, sim


def dendrogram_levels(g: TxGraph):
    """Yield ``(similarity, merges, density)`` per level, starting with the
    all-singletons cut at similarity ``inf``. ``merges`` lists the edge-index
    pairs joined at that level."""
    edges, first, second, sim = similarity_pairs(g)
    M = len(edges)
    order = np.lexsort((second, first, -sim))
    first, second, sim = first[order], second[order], sim[order]
    uf = _UnionFind(edges)
    total = Fraction(0)
    yield float("inf"), [], 0.0
    start = 0
    while start < len(sim):
        stop = start
        level = sim[start]
        while stop < len(sim) and sim[stop] == level:
            stop += 1
        merges = []
        for a, b in zip(first[start:stop].tolist(), second[start:stop].tolist()):
            ra, rb = uf.find(a), uf.find(b)
            if ra == rb:
                continue
            total -= _density_term(uf.m[ra], len(uf.nodes[ra]))
            total -= _density_term(uf.m[rb], len(uf.nodes[rb]))
            r = uf.union(ra, rb)
            total += _density_term(uf.m[r], len(uf.nodes[r]))
            merges.append((a, b))
        start = stop
        if merges:
            yield float(level), merges, float(2 * total / M)


def _partition_from(edges, merges_upto) -> CommunityPartition:
    uf = _UnionFind(edges)
    for a, b in merges_upto:
        ra, rb = uf.find(a), uf.find(b)
        if ra != rb:
            uf.union(ra, rb)
    groups: dict[int, list[int]] = {}
    for k in range(len(edges)):
        groups.setdefault(uf.find(k), []).append(k)
    ordered = sorted(groups.values(), key=lambda ks: (-len(ks), ks[0]))
    communities = [[edges[k] for k in ks] for ks in ordered]
    membership: dict[int, set[int]] = {}
    for c, comm in enumerate(communities):
        for u, v in comm:
            membership.setdefault(u, set()).add(c)
            membership.setdefault(v, set()).add(c)
    return CommunityPartition(communities, membership, 0.0)


def detect_link_communities(g: TxGraph) -> CommunityPartition:
    """Partition the edges of ``g``'s undirected simple projection.

    Communities are listed largest first (then by smallest edge); each edge
    is a ``(u, v)`` node-id pair with ``u < v``.
    """
    if g.n_arcs == 0:
        raise EmptyGraph("link communities of a graph without edges")
    edges = _undirected_edges(g)
    best_density, best_level = -1.0, 0
    history = []
    for i, (_, merges, density) in enumerate(dendrogram_levels(g)):
        history.extend(merges)
        if density >= best_density:
            best_density, best_level = density, len(history)
    part = _partition_from(edges, history[:best_level])
    part.partition_density = best_density
    return part


def community_profiles(g: TxGraph, partition: CommunityPartition) -> list[CommunityProfile]:
    """Per community, each node's in/out degree over the community's edges.

    Directions come from the directed simple projection of ``g``; a pair
    joined in both directions adds one to each endpoint's in and out degree.
    """
    edges = _undirected_edges(g)
    _check_cover(edges, partition.communities)
    arcs = set(simple_projection(g, "directed").arcs()) if g.directed else None
    profiles = []
    for c, comm in enumerate(partition.communities):
        deg: dict[int, list[int]] = {}
        for u, v in comm:
            for s, t in ((u, v), (v, u)):
                if arcs is None or (s, t) in arcs:
                    deg.setdefault(s, [0, 0])[1] += 1
                    deg.setdefault(t, [0, 0])[0] += 1
            deg.setdefault(u, [0, 0])
            deg.setdefault(v, [0, 0])
        profiles.append(CommunityProfile(
            c, len(comm), len(deg), {k: (d[0], d[1]) for k, d in sorted(deg.items())}))
    return profiles


def partition_to_json(g: TxGraph, partition: CommunityPartition,
                      profiles: list[CommunityProfile] | None = None) -> str:
    a = g.addresses
    if profiles is None:
        profiles = community_profiles(g, partition)
    doc = {
        "partition_density": partition.partition_density,
        "communities": [[[a[u], a[v]] for u, v in comm] for comm in partition.communities],
        "profiles": [
            {
                "community": p.index,
                "edge_count": p.edge_count,
                "node_count": p.node_count,
                "nodes": [{"address": a[k], "in_degree": i, "out_degree": o}
                          for k, (i, o) in p.degrees.items()],
            }
            for p in profiles
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def partition_from_json(g: TxGraph, text: str) -> CommunityPartition:
    doc = json.loads(text)
    idx = g.index
    communities = []
    for comm in doc["communities"]:
        pairs = []
        for s, t in comm:
            u, v = idx[s], idx[t]
            pairs.append((min(u, v), max(u, v)))
        communities.append(pairs)
    membership: dict[int, set[int]] = {}
    for c, comm in enumerate(communities):
        for u, v in comm:
            membership.setdefault(u, set()).add(c)
            membership.setdefault(v, set()).add(c)
    return CommunityPartition(communities, membership, float(doc["partition_density"]))
