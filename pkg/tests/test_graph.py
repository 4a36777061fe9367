import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktree.graph import (
    Graph,
    GraphError,
    assign_weights,
    build_clique_tree,
    enumerate_cliques,
    gen_kpath,
    gen_ktree,
    orient_acyclic,
    orient_random,
    underlying,
    validate_ktree,
)
from ktree.oracles import dag_extremal_path, topological_order


def complete(n, k=None):
    return Graph(n, k or n, False, {(a, b): 1 for a, b in itertools.combinations(range(n), 2)})


def test_k2_n3_is_triangle():
    for seed in range(5):
        g = gen_ktree(2, 3, seed)
        assert g.undirected_edges() == {(0, 1), (0, 2), (1, 2)}


def test_1tree_is_a_tree():
    g = gen_ktree(1, 5, 3)
    assert len(g.edges) == 4
    seen, stack = {0}, [0]
    while stack:
        for y in g.neighbors(stack.pop()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    assert seen == set(range(5))


def test_edge_count_and_replay():
    g = gen_ktree(3, 10, 7)
    assert len(g.edges) == 3 + 3 * 7
    assert g.construction.replay() == g.undirected_edges()


def test_gen_rejects_bad_parameters():
    with pytest.raises(GraphError):
        gen_ktree(3, 2, 0)
    with pytest.raises(GraphError):
        gen_kpath(2, 0, 0, 0)
    with pytest.raises(GraphError):
        gen_kpath(2, 3, -1, 0)


def test_kpath_single_clique():
    g = gen_kpath(2, 1, 0, 0)
    assert g.n == 2 and g.undirected_edges() == {(0, 1)}
    assert g.kpath.cliques == ((0, 1),)


def test_kpath_invariants_example():
    g = gen_kpath(2, 3, 2, 1)
    d = g.kpath
    assert not d.problems(g)
    for i in range(2):
        assert len(set(d.cliques[i]) & set(d.cliques[i + 1])) == 1
    assert len(d.spikes) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 20), st.integers(0, 10), st.integers(0, 10**6))
def test_kpath_generator_properties(k, m, spikes, seed):
    g = gen_kpath(k, m, spikes, seed)
    assert not g.kpath.problems(g)
    assert g.construction.replay() == g.undirected_edges()
    assert validate_ktree(g)
    spike_set = set(g.kpath.spike_at())
    assert all(not (g.neighbors(w) & spike_set) for w in spike_set)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 25), st.integers(0, 10**6))
def test_ktree_generator_properties(k, extra, seed):
    g = gen_ktree(k, k + extra, seed)
    assert validate_ktree(g)
    assert len(g.edges) == k * (k - 1) // 2 + k * extra
    ct = build_clique_tree(g)
    assert ct.is_tree()
    for a, b in ct.edges:
        assert ct.nodes[a] < ct.nodes[b]
    for c in ct.nodes:
        assert all(g.adjacent(x, y) for x, y in itertools.combinations(c, 2))


def test_clique_tree_small_cases():
    ct = build_clique_tree(complete(3), 3)
    assert len(ct.nodes) == 1 and not ct.edges
    ct = build_clique_tree(complete(3, 2), 2)
    assert sorted(len(c) for c in ct.nodes) == [2, 2, 2, 3]
    assert len(ct.edges) == 3 and ct.is_tree()
    path = Graph(3, 1, False, {(0, 1): 1, (1, 2): 1})
    ct = build_clique_tree(path)
    assert set(ct.nodes) == {frozenset(s) for s in ({0}, {1}, {2}, {0, 1}, {1, 2})}
    assert len(ct.edges) == 4


def test_clique_tree_rejects_non_ktree():
    cycle = Graph(4, 2, False, {(0, 1): 1, (1, 2): 1, (2, 3): 1, (0, 3): 1})
    with pytest.raises(GraphError):
        build_clique_tree(cycle)


def test_validate_ktree_examples():
    assert validate_ktree(complete(3, 2), 2)
    cycle = Graph(4, 2, False, {(0, 1): 1, (1, 2): 1, (2, 3): 1, (0, 3): 1})
    assert not validate_ktree(cycle, 2)


def test_enumerate_cliques_matches_brute_force():
    for seed in range(20):
        g = gen_ktree(1 + seed % 3, 9, seed)
        for size in (1, 2, 3, 4):
            brute = [
                c for c in itertools.combinations(range(g.n), size)
                if all(g.adjacent(a, b) for a, b in itertools.combinations(c, 2))
            ]
            assert enumerate_cliques(g, size) == brute


def test_orient_acyclic_examples():
    tri = complete(3, 2)
    d = orient_acyclic(tri, order=[0, 1, 2])
    assert set(d.edges) == {(0, 1), (0, 2), (1, 2)}
    k4 = orient_acyclic(complete(4, 3), 5)
    order = topological_order(k4)
    assert dag_extremal_path(k4, order[0], order[-1]) == 3


def test_orientations_keep_underlying_graph():
    g = gen_ktree(3, 15, 2)
    for d in (orient_acyclic(g, 1), orient_random(g, 1)):
        assert d.directed
        assert d.undirected_edges() == g.undirected_edges()
    assert underlying(orient_random(g, 4)).undirected_edges() == g.undirected_edges()


def test_assign_weights_respects_cap():
    g = orient_acyclic(gen_ktree(3, 40, 9), 9)
    w = assign_weights(g, 9, 1, 5, 256)
    assert w.total_weight() <= 256
    assert all(1 <= x <= 5 for x in w.edges.values())
    with pytest.raises(GraphError):
        assign_weights(g, 9, 1, 5, 10)


def test_graph_rejects_bad_edges():
    with pytest.raises(GraphError):
        Graph(2, 1, False, {(0, 0): 1})
    with pytest.raises(GraphError):
        Graph(2, 1, False, {(0, 2): 1})
    with pytest.raises(GraphError):
        Graph(2, 1, False, {(1, 0): 1})
    with pytest.raises(GraphError):
        Graph(2, 1, True, {(0, 1): 0})
