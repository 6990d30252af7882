"""Pure-Python reference versions of the graph kernels.

All adjacency arguments are CSR pairs ``(indptr, indices)`` with sorted,
duplicate-free neighbour lists. Results must match ``_ckernels`` exactly.
"""
from collections import deque

import numpy as np


def _lists(indptr, indices):
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    return [indices[indptr[u]:indptr[u + 1]] for u in range(len(indptr) - 1)]


def bfs_distance_stats(indptr, indices):
    """Return ``(sum of lengths, reachable ordered pairs, max length)``."""
    adj = _lists(indptr, indices)
    n = len(adj)
    total = pairs = longest = 0
    dist = [-1] * n
    for s in range(n):
        if not adj[s]:
            continue
        seen = [s]
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = du
                    seen.append(v)
                    queue.append(v)
                    total += du
                    pairs += 1
                    if du > longest:
                        longest = du
        for v in seen:
            dist[v] = -1
    return total, pairs, longest


def triangles_per_node(indptr, indices):
    adj = _lists(indptr, indices)
    sets = [set(a) for a in adj]
    out = np.zeros(len(adj), dtype=np.int64)
    for u, nbrs in enumerate(adj):
        for v in nbrs:
            if v <= u:
                continue
            for w in adj[v]:
                if w > v and w in sets[u]:
                    out[u] += 1
                    out[v] += 1
                    out[w] += 1
    return out


def edge_pair_similarities(indptr, indices, edge_of):
    """Jaccard similarity of inclusive neighbourhoods for every pair of edges
    sharing a node. Returns ``(first, second, sim)`` with ``first < second``."""
    adj = _lists(indptr, indices)
    sets = [set(a) for a in adj]
    indptr = np.asarray(indptr).tolist()
    edge_of = np.asarray(edge_of).tolist()
    first, second, sim = [], [], []
    for k, nbrs in enumerate(adj):
        base = indptr[k]
        d = len(nbrs)
        for a in range(d):
            i = nbrs[a]
            ea = edge_of[base + a]
            for b in range(a + 1, d):
                j = nbrs[b]
                eb = edge_of[base + b]
                inter = len(sets[i] & sets[j])
                if j in sets[i]:
                    inter += 2
                union = len(adj[i]) + len(adj[j]) + 2 - inter
                if ea < eb:
                    first.append(ea)
                    second.append(eb)
                else:
                    first.append(eb)
                    second.append(ea)
                sim.append(inter / union)
    return (np.asarray(first, dtype=np.int64), np.asarray(second, dtype=np.int64),
            np.asarray(sim, dtype=np.float64))


def weak_components(n, src, dst):
    """Label every node with the smallest node id of its weak component."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in zip(np.asarray(src).tolist(), np.asarray(dst).tolist()):
        ru, rv = find(u), find(v)
        if ru != rv:
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
    return np.asarray([find(x) for x in range(n)], dtype=np.int64)
