"""Independent reference computations used to check the package.

Brute-force versions enumerate pairs, triples and node subsets directly and
are meant for graphs of a dozen nodes. The ``nx_*`` versions lean on
networkx for the larger fixture graphs.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import networkx as nx


def arc_set(n, arcs):
    return {(u, v) for u, v in arcs if u != v}


def undirected_adj(n, arcs):
    adj = [[False] * n for _ in range(n)]
    for u, v in arcs:
        adj[u][v] = adj[v][u] = True
    return adj


def brute_dyads(n, arcs):
    s = arc_set(n, arcs)
    mutual = asym = null = 0
    for i, j in itertools.combinations(range(n), 2):
        a, b = (i, j) in s, (j, i) in s
        if a and b:
            mutual += 1
        elif a or b:
            asym += 1
        else:
            null += 1
    return mutual, asym, null


def brute_reciprocity(n, arcs):
    s = arc_set(n, arcs)
    if not s:
        return 0.0
    return sum((v, u) in s for u, v in s) / len(s)


def brute_triangles(n, arcs):
    adj = undirected_adj(n, arcs)
    return sum(adj[a][b] and adj[b][c] and adj[a][c]
               for a, b, c in itertools.combinations(range(n), 3))


def brute_triples(n, arcs):
    """Per centre node: (closed triples, connected triples)."""
    adj = undirected_adj(n, arcs)
    out = []
    for v in range(n):
        closed = connected = 0
        others = [u for u in range(n) if u != v]
        for x, y in itertools.combinations(others, 2):
            if adj[v][x] and adj[v][y]:
                connected += 1
                closed += adj[x][y]
        out.append((closed, connected))
    return out


def brute_transitivity(n, arcs):
    per = brute_triples(n, arcs)
    closed = sum(c for c, _ in per)
    connected = sum(t for _, t in per)
    glob = closed / connected if connected else 0.0
    ratios = [c / t for c, t in per if t > 0]
    local = math.fsum(ratios) / len(ratios) if ratios else 0.0
    return glob, local


def floyd_warshall(n, arcs, directed=True):
    inf = float("inf")
    d = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for u, v in arcs:
        d[u][v] = 1
        if not directed:
            d[v][u] = 1
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def brute_distances(n, arcs, directed=True):
    """(mean as Fraction, diameter) over reachable ordered pairs, or None."""
    d = floyd_warshall(n, arcs, directed)
    finite = [d[i][j] for i in range(n) for j in range(n) if i != j and d[i][j] != float("inf")]
    if not finite:
        return None
    return Fraction(sum(finite), len(finite)), max(finite)


def brute_maximal_cliques(n, arcs):
    adj = undirected_adj(n, arcs)

    def is_clique(s):
        return all(adj[a][b] for a, b in itertools.combinations(s, 2))

    cliques = [frozenset(s) for r in range(2, n + 1)
               for s in itertools.combinations(range(n), r) if is_clique(s)]
    cset = set(cliques)
    maximal = []
    for c in cliques:
        if not any(c | {v} in cset for v in range(n) if v not in c):
            maximal.append(c)
    return maximal


def brute_max_clique_size(n, arcs):
    if n == 0:
        return 0
    return max((len(c) for c in brute_maximal_cliques(n, arcs)), default=1)


def brute_giant(n, arcs):
    adj = undirected_adj(n, arcs)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], set()
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.add(u)
            for v in range(n):
                if adj[u][v] and not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(comp)
    return max(comps, key=lambda c: (len(c), -min(c)))


# ---------------------------------------------------------------------------
# networkx references for the larger fixture graphs

def nx_digraph(g):
    d = nx.DiGraph()
    d.add_nodes_from(range(g.n_nodes))
    d.add_edges_from(zip(g.src.tolist(), g.dst.tolist()))
    return d


def nx_report(g, directed=True):
    """Reference values for the fields of MetricsReport."""
    d = nx_digraph(g)
    u = d.to_undirected()
    arcs = set(d.edges())
    mutual = sum((b, a) in arcs for a, b in arcs) // 2
    dyads_connected = len(arcs) - mutual
    triangles = sum(nx.triangles(u).values()) // 3
    clustering = nx.clustering(u)
    eligible = [clustering[v] for v in u if u.degree(v) >= 2]
    per = {v: (t, u.degree(v) * (u.degree(v) - 1) // 2) for v, t in nx.triangles(u).items()}
    local = (math.fsum(t / c for t, c in per.values() if c) / len(eligible)) if eligible else 0.0
    total = pairs = longest = 0
    dist_graph = d if directed else u
    for _, lengths in nx.all_pairs_shortest_path_length(dist_graph):
        for _, ln in lengths.items():
            if ln > 0:
                total += ln
                pairs += 1
                longest = max(longest, ln)
    cliques = list(nx.find_cliques(u))
    return {
        "nodes": g.n_nodes,
        "edges": g.n_arcs,
        "diameter": longest if pairs else None,
        "max_clique_size": max((len(c) for c in cliques), default=0) if g.n_nodes else 0,
        "dyads_connected": dyads_connected,
        "triangles": triangles,
        "reciprocity": round(nx.overall_reciprocity(d), 4) if arcs else 0.0,
        "transitivity_global": nx.transitivity(u),
        "transitivity_avg_local": local,
        "mean_degree": 2 * g.n_arcs / g.n_nodes if g.n_nodes else 0.0,
        "mean_distance": total / pairs if pairs else None,
    }


# ---------------------------------------------------------------------------
# power-law fit by root-finding on the score equation (mpmath precision)

def mp_alpha(tail, xmin):
    import mpmath

    mean_log = mpmath.mpf(sum(math.log(v) for v in tail)) / len(tail)

    def score(a):
        return mpmath.zeta(a, xmin, 1) / mpmath.zeta(a, xmin) + mean_log

    return float(mpmath.findroot(score, (1.0001, 30.0), solver="anderson"))


def mp_power_law_ks(tail, alpha, xmin):
    """Sup gap between the empirical tail CDF and the model CDF, by enumeration."""
    import mpmath

    tail = sorted(tail)
    n = len(tail)
    z = mpmath.zeta(alpha, xmin)
    worst = 0.0
    below = 0
    for x in range(xmin, tail[-1] + 1):
        model_before = 1 - float(mpmath.zeta(alpha, x) / z)   # P(X <= x - 1)
        model_at = 1 - float(mpmath.zeta(alpha, x + 1) / z)   # P(X <= x)
        emp_before = below / n
        while below < n and tail[below] == x:
            below += 1
        worst = max(worst, abs(emp_before - model_before), abs(below / n - model_at))
    return worst


# ---------------------------------------------------------------------------
# link communities by naive single linkage

def naive_link_communities(n, arcs):
    """Returns (communities as sorted edge lists, best density as Fraction)."""
    edges = sorted({(min(u, v), max(u, v)) for u, v in arcs if u != v})
    nb = [set() for _ in range(n)]
    for u, v in edges:
        nb[u].add(v)
        nb[v].add(u)
    sims = {}
    for a, b in itertools.combinations(range(len(edges)), 2):
        shared = set(edges[a]) & set(edges[b])
        if len(shared) != 1:
            continue
        (k,) = shared
        i = edges[a][0] + edges[a][1] - k
        j = edges[b][0] + edges[b][1] - k
        ni, nj = nb[i] | {i}, nb[j] | {j}
        sims[(a, b)] = Fraction(len(ni & nj), len(ni | nj))
    label = list(range(len(edges)))

    def density():
        groups = {}
        for e, lab in enumerate(label):
            groups.setdefault(lab, []).append(edges[e])
        total = Fraction(0)
        for comm in groups.values():
            m, nc = len(comm), len({x for e in comm for x in e})
            if nc > 2:
                total += Fraction(m * (m - nc + 1), (nc - 2) * (nc - 1))
        return 2 * total / len(edges), groups

    best, best_groups = density()
    for level in sorted(set(sims.values()), reverse=True):
        for (a, b), s in sims.items():
            if s == level and label[a] != label[b]:
                old, new = max(label[a], label[b]), min(label[a], label[b])
                label = [new if x == old else x for x in label]
        d, groups = density()
        if d >= best:
            best, best_groups = d, groups
    comms = sorted((sorted(c) for c in best_groups.values()), key=lambda c: (-len(c), c[0]))
    return comms, best
