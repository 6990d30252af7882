"""Snapshot metric battery (counts, census, transitivity, distances, cliques).

Mean degree and degree sequences are taken on the raw multigraph; everything
else runs on a simple projection, directed for the census, reciprocity and
distances, undirected for triangles, transitivity and cliques.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import CliqueBudgetExceeded, EmptyGraph, NoReachablePairs
from .graph import TxGraph

DEFAULT_CLIQUE_CAP = 10**7


@dataclass
class MetricsReport:
    nodes: int
    edges: int
    diameter: int | None
    max_clique_size: int
    dyads_connected: int
    triangles: int
    reciprocity: float
    transitivity_global: float
    transitivity_avg_local: float
    mean_degree: float
    mean_distance: float | None

    def to_json(self, snapshot_label: str = "", generated_at_ms: int = 0) -> str:
        doc = asdict(self)
        doc["snapshot_label"] = snapshot_label
        doc["generated_at_ms"] = generated_at_ms
        return json.dumps(doc, indent=2) + "\n"


def degree_sequence(g: TxGraph, mode: str = "total") -> np.ndarray:
    """Per-node degree in id order, parallel arcs counted."""
    n = g.n_nodes
    out = np.bincount(g.src, minlength=n)
    inn = np.bincount(g.dst, minlength=n)
    if mode == "out":
        return out
    if mode == "in":
        return inn
    if mode == "total":
        return out + inn
    raise ValueError(f"unknown degree mode {mode!r}")


def mean_degree_exact(nodes: int, edges: int) -> Fraction:
    if nodes <= 0:
        raise EmptyGraph("mean degree of a graph without nodes")
    return Fraction(2 * edges, nodes)


def mean_degree(g: TxGraph) -> float:
    return float(mean_degree_exact(g.n_nodes, g.n_arcs))


def _directed_keys(g: TxGraph) -> np.ndarray:
    n = max(g.n_nodes, 1)
    if g.directed:
        keys = g.src * n + g.dst
    else:
        keys = np.concatenate([g.src * n + g.dst, g.dst * n + g.src])
    return np.unique(keys)


def dyad_census(g: TxGraph) -> tuple[int, int, int]:
    """``(mutual, asymmetric, null)`` over all unordered node pairs."""
    n = g.n_nodes
    keys = _directed_keys(g)
    reverse = (keys % max(n, 1)) * max(n, 1) + keys // max(n, 1)
    reciprocated = int(np.isin(reverse, keys).sum())
    mutual = reciprocated // 2
    asymmetric = len(keys) - reciprocated
    null = n * (n - 1) // 2 - mutual - asymmetric
    return mutual, asymmetric, null


def reciprocity(g: TxGraph) -> float:
    """Fraction of simple directed arcs whose reverse arc also exists."""
    keys = _directed_keys(g)
    if len(keys) == 0:
        return 0.0
    mutual, _, _ = dyad_census(g)
    return 2 * mutual / len(keys)


def _undirected_csr(g: TxGraph):
    return g.csr(symmetric=True)


def triangles_per_node(g: TxGraph) -> np.ndarray:
    return _kernels.triangles_per_node(*_undirected_csr(g))


def triangle_count(g: TxGraph) -> int:
    return int(triangles_per_node(g).sum()) // 3


def _triangles_and_degrees(g: TxGraph):
    indptr, indices = _undirected_csr(g)
    return _kernels.triangles_per_node(indptr, indices), np.diff(indptr)


def transitivity_global(g: TxGraph) -> float:
    tri, deg = _triangles_and_degrees(g)
    triples = int((deg * (deg - 1) // 2).sum())
    if triples == 0:
        return 0.0
    return int(tri.sum()) / triples


def transitivity_avg_local(g: TxGraph) -> float:
    """Mean local clustering over nodes of undirected degree >= 2."""
    tri, deg = _triangles_and_degrees(g)
    eligible = deg >= 2
    if not eligible.any():
        return 0.0
    ratios = (int(t) / (int(d) * (int(d) - 1) // 2) for t, d in zip(tri[eligible], deg[eligible]))
    return math.fsum(ratios) / int(eligible.sum())


def distance_stats(g: TxGraph, directed: bool = True) -> tuple[int, int, int]:
    """``(sum of shortest-path lengths, reachable ordered pairs, diameter)``."""
    indptr, indices = g.csr(symmetric=not (directed and g.directed))
    return _kernels.bfs_distance_stats(indptr, indices)


def mean_distance(g: TxGraph, directed: bool = True) -> float:
    total, pairs, _ = distance_stats(g, directed)
    if pairs == 0:
        raise NoReachablePairs("no pair of distinct nodes is connected")
    return total / pairs


def diameter(g: TxGraph, directed: bool = True) -> int:
    _, pairs, longest = distance_stats(g, directed)
    if pairs == 0:
        raise NoReachablePairs("no pair of distinct nodes is connected")
    return longest


def _neighbour_sets(g: TxGraph) -> list[set[int]]:
    indptr, indices = _undirected_csr(g)
    idx = indices.tolist()
    ptr = indptr.tolist()
    return [set(idx[ptr[u]:ptr[u + 1]]) for u in range(g.n_nodes)]


def _degeneracy_order(adj: list[set[int]]) -> list[int]:
    """Repeatedly remove a minimum-degree node (smallest id among equals)."""
    deg = [len(a) for a in adj]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * len(adj)
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        for w in adj[v]:
            if not removed[w]:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    return order


def iter_maximal_cliques(g: TxGraph, cap: int = DEFAULT_CLIQUE_CAP) -> Iterator[frozenset[int]]:
    """Bron-Kerbosch with pivoting over a degeneracy ordering.

    Yields every maximal clique with at least two nodes. Raises
    :class:`CliqueBudgetExceeded` once more than ``cap`` have been produced.
    """
    adj = _neighbour_sets(g)
    found = 0

    def expand(r: list[int], p: set[int], x: set[int]):
        nonlocal found
        if not p and not x:
            if len(r) >= 2:
                found += 1
                if found > cap:
                    raise CliqueBudgetExceeded(f"more than {cap} maximal cliques")
                yield frozenset(r)
            return
        pivot = max(sorted(p | x), key=lambda u: len(adj[u] & p))
        for v in sorted(p - adj[pivot]):
            yield from expand(r + [v], p & adj[v], x & adj[v])
            p.discard(v)
            x.add(v)

    position = {v: i for i, v in enumerate(_degeneracy_order(adj))}
    for v in sorted(position, key=position.get):
        later = {w for w in adj[v] if position[w] > position[v]}
        earlier = adj[v] - later
        yield from expand([v], later, earlier)


def maximal_cliques(g: TxGraph, cap: int = DEFAULT_CLIQUE_CAP) -> list[frozenset[int]]:
    return list(iter_maximal_cliques(g, cap))


def max_clique_size(g: TxGraph, cap: int = DEFAULT_CLIQUE_CAP) -> int:
    if g.n_nodes == 0:
        return 0
    return max((len(c) for c in iter_maximal_cliques(g, cap)), default=1)


def snapshot_report(g: TxGraph, directed_distances: bool = True,
                    clique_cap: int = DEFAULT_CLIQUE_CAP) -> MetricsReport:
    """Assemble the full metric record for one snapshot graph.

    Reciprocity is rounded to 4 decimals. Distances are ``None`` when no
    ordered pair is reachable.
    """
    mutual, asymmetric, _ = dyad_census(g)
    total, pairs, longest = distance_stats(g, directed_distances)
    return MetricsReport(
        nodes=g.n_nodes,
        edges=g.n_arcs,
        diameter=longest if pairs else None,
        max_clique_size=max_clique_size(g, clique_cap),
        dyads_connected=mutual + asymmetric,
        triangles=triangle_count(g),
        reciprocity=round(reciprocity(g), 4),
        transitivity_global=transitivity_global(g),
        transitivity_avg_local=transitivity_avg_local(g),
        mean_degree=mean_degree(g) if g.n_nodes else 0.0,
        mean_distance=total / pairs if pairs else None,
    )
