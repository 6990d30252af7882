import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from txnet.errors import EmptyGraph, InvalidPartition, NotAdjacent
from txnet.graph import empty_graph, graph_from_pairs
from txnet.linkcomm import (_partition_from, _undirected_edges, community_profiles,
                            dendrogram_levels, detect_link_communities, edge_similarity,
                            partition_density, partition_from_json, partition_to_json)


def G(*pairs, n=None):
    return graph_from_pairs(list(pairs), n_nodes=n)


def cliques(sizes):
    pairs, base = [], 0
    for k in sizes:
        pairs += [(base + i, base + j) for i, j in itertools.combinations(range(k), 2)]
        base += k
    return G(*pairs)


def test_similarity_examples():
    path = G((0, 1), (1, 2))  # i=0, k=1, j=2
    assert edge_similarity(path, (0, 1), (1, 2)) == pytest.approx(1 / 3)
    tri = G((0, 1), (1, 2), (0, 2))
    assert edge_similarity(tri, (0, 1), (0, 2)) == 1.0
    with pytest.raises(NotAdjacent):
        edge_similarity(G((0, 1), (2, 3)), (0, 1), (2, 3))
    with pytest.raises(NotAdjacent):
        edge_similarity(tri, (0, 1), (1, 0))


def test_kernel_similarities_match_definition():
    rng = random.Random(4)
    pairs = {(rng.randrange(25), rng.randrange(25)) for _ in range(70)}
    g = G(*[p for p in pairs if p[0] != p[1]], n=25)
    from txnet.linkcomm import similarity_pairs

    edges, first, second, sim = similarity_pairs(g)
    assert len(first) == sum(len(set(a) & set(b)) == 1 for a, b in itertools.combinations(edges, 2))
    for a, b, s in zip(first.tolist(), second.tolist(), sim.tolist()):
        assert a < b
        assert s == edge_similarity(g, edges[a], edges[b])


def test_density_examples():
    tri = G((0, 1), (1, 2), (0, 2))
    assert partition_density(tri, [[(0, 1), (1, 2), (0, 2)]]) == 1.0
    tree = G((0, 1), (1, 2), (1, 3))
    assert partition_density(tree, [[(0, 1), (1, 2), (1, 3)]]) == 0.0
    two = cliques([3, 3])
    assert partition_density(two, [[(0, 1), (0, 2), (1, 2)], [(3, 4), (3, 5), (4, 5)]]) == 1.0


def test_density_invalid():
    tri = G((0, 1), (1, 2), (0, 2))
    with pytest.raises(InvalidPartition):
        partition_density(tri, [[(0, 1), (1, 2)]])
    with pytest.raises(InvalidPartition):
        partition_density(tri, [[(0, 1), (1, 2), (0, 2)], [(1, 0)]])


def test_two_triangles_sharing_node():
    g = G((0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4))
    part = detect_link_communities(g)
    assert sorted(map(sorted, part.communities)) == [[(0, 1), (0, 2), (1, 2)],
                                                     [(2, 3), (2, 4), (3, 4)]]
    assert part.node_membership[2] == {0, 1}
    assert part.partition_density == 1.0


def test_single_triangle():
    part = detect_link_communities(G((0, 1), (1, 2), (0, 2)))
    assert len(part.communities) == 1 and part.partition_density == 1.0


def test_star_is_one_community():
    part = detect_link_communities(G(*[(0, k) for k in range(1, 6)]))
    assert len(part.communities) == 1 and len(part.communities[0]) == 5
    assert part.partition_density == 0.0


@pytest.mark.parametrize("sizes", [(3, 4), (3, 5, 6), (3, 3, 4, 5, 6), (6, 6)])
def test_disjoint_cliques(sizes):
    part = detect_link_communities(cliques(sizes))
    assert len(part.communities) == len(sizes) and part.partition_density == 1.0


def test_empty():
    with pytest.raises(EmptyGraph):
        detect_link_communities(empty_graph())


def test_profiles():
    star = G((0, 1), (0, 2), (0, 3))
    (p,) = community_profiles(star, detect_link_communities(star))
    assert p.degrees == {0: (0, 3), 1: (1, 0), 2: (1, 0), 3: (1, 0)}
    cyc = G((0, 1), (1, 2), (2, 0))
    (p,) = community_profiles(cyc, detect_link_communities(cyc))
    assert set(p.degrees.values()) == {(1, 1)} and (p.edge_count, p.node_count) == (3, 3)


def test_profiles_invalid_partition():
    g = G((0, 1), (1, 2))
    part = _partition_from([(0, 1)], [])
    with pytest.raises(InvalidPartition):
        community_profiles(g, part)


def test_json_roundtrip():
    g = G((0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4), (4, 0))
    part = detect_link_communities(g)
    text = partition_to_json(g, part)
    back = partition_from_json(g, text)
    assert back.communities == part.communities
    assert back.partition_density == part.partition_density
    assert back.node_membership == part.node_membership


random_graphs = st.integers(2, 16).flatmap(lambda n: st.lists(
    st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1]),
    min_size=1, max_size=60))


@settings(max_examples=150, deadline=None)
@given(random_graphs)
def test_partition_and_best_cut(pairs):
    g = G(*pairs)
    part = detect_link_communities(g)
    edges = _undirected_edges(g)
    flat = [e for c in part.communities for e in c]
    assert sorted(flat) == edges and len(flat) == len(set(flat))
    # membership is exactly the incident communities
    for node in range(g.n_nodes):
        incident = {c for c, comm in enumerate(part.communities) for e in comm if node in e}
        assert part.node_membership.get(node, set()) == incident
    # the chosen cut scores at least as well as every cut of the dendrogram
    assert part.partition_density == partition_density(g, part)
    history = []
    for _, merges, density in dendrogram_levels(g):
        history.extend(merges)
        cut = _partition_from(edges, history)
        assert density == pytest.approx(partition_density(g, cut), abs=1e-12)
        assert part.partition_density >= partition_density(g, cut)
    assert detect_link_communities(g) == part
