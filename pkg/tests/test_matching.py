import random

import pytest

from ktree.graph import Graph, build_clique_tree, gen_ktree
from ktree.matching import (
    MatchingSolver,
    MatchingVector,
    compose_k1_node,
    compose_k_node,
    extend_k1,
    find_perfect_matching,
    has_perfect_matching,
    leaf_vector,
)
from ktree.oracles import brute_matching, is_perfect_matching


def complete(n, k=None):
    return Graph(n, n - 1 if k is None else k, False, {(a, b): 1 for a in range(n) for b in range(a + 1, n)})


def small_ktree(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    return gen_ktree(k, rng.randint(k, 14), seed)


def test_leaf_vector_examples():
    g = Graph(2, 1, False, {(0, 1): 1})
    assert leaf_vector([0], g).bits == (False, True)
    v = leaf_vector([0, 1], g)
    assert v[set()] and v[{0, 1}]
    assert not v[{0}] and not v[{1}]


def test_leaf_vector_matches_exhaustive_search():
    for seed in range(40):
        g = small_ktree(seed)
        ct = build_clique_tree(g)
        for c in ct.nodes:
            v = leaf_vector(c, g)
            for mask in range(len(v.bits)):
                s = v.subset(mask)
                assert v.bits[mask] == (brute_matching(g, c - s) is not None)


def test_extend_k1_example():
    g = Graph(2, 1, False, {(0, 1): 1})
    child = MatchingVector((0,), (False, True))
    w = extend_k1(child, [0, 1], g)
    assert w[{0, 1}] and w[set()]
    assert not w[{0}] and not w[{1}]


def test_extend_k1_without_usable_edge():
    # vertex 1 is absent from the child, but no edge 0-1 is available
    g = Graph(2, 1, False, {})
    child = MatchingVector((0,), (True, True))
    w = extend_k1(child, [0, 1], g)
    assert not w[set()] and not w[{0}]
    assert w[{1}] and w[{0, 1}]


def test_compose_k1_node_on_a_triangle():
    g = complete(3, 2)
    v = compose_k1_node([0, 1, 2], [0, 1], [], g)
    assert v.boundary == (0, 1)
    assert v[{0}] and v[{1}]
    assert not v[set()] and not v[{0, 1}]


def test_compose_k_node_identity_and_errors():
    g = complete(3, 2)
    child = leaf_vector([0, 1], g)
    assert compose_k_node([0, 1], [child]) == child
    # no inputs: nothing is matched
    empty = compose_k_node([0, 1], [])
    assert empty.true_sets() == [frozenset({0, 1})]
    with pytest.raises(ValueError):
        compose_k_node([0, 1], [leaf_vector([1, 2], g)])


def test_decision_examples():
    assert has_perfect_matching(Graph(2, 1, False, {(0, 1): 1}))
    assert find_perfect_matching(Graph(2, 1, False, {(0, 1): 1})) == [(0, 1)]
    assert not has_perfect_matching(Graph(3, 1, False, {(0, 1): 1, (1, 2): 1}))
    assert find_perfect_matching(Graph(3, 1, False, {(0, 1): 1, (1, 2): 1})) is None


def check_vectors(solver):
    g = solver.g
    for x, v in solver.vectors.items():
        h = solver.subtree_vertices(x)
        for mask in range(len(v.bits)):
            s = v.subset(mask)
            assert v.bits[mask] == (brute_matching(g, h - s) is not None), (x, sorted(s))


@pytest.mark.parametrize("pseudo_child", [True, False])
def test_vectors_decision_and_search_match_exhaustive(pseudo_child):
    for seed in range(150):
        g = small_ktree(seed)
        solver = MatchingSolver(g, pseudo_child=pseudo_child)
        check_vectors(solver)
        truth = brute_matching(g) is not None
        assert solver.has_perfect_matching() == truth
        found = solver.find()
        assert (found is not None) == truth
        if found is not None:
            assert is_perfect_matching(g, found)
        if g.n % 2:
            assert not truth


def test_child_order_does_not_change_vectors():
    for seed in range(40):
        g = small_ktree(seed)
        a = MatchingSolver(g)
        b = MatchingSolver(g)
        rng = random.Random(seed)
        for kids in b.children:
            rng.shuffle(kids)
        b.vectors.clear()
        b._inputs.clear()
        for x in reversed(b.order):
            b._compute(x)
        assert a.vectors == b.vectors
        found = b.find()
        assert found is None or is_perfect_matching(g, found)


def paired_ktree(k, pairs, seed):
    """A k-tree whose vertices are added two at a time as adjacent pairs, so it has a perfect matching."""
    rng = random.Random(seed)
    edges = {(a, b): 1 for a in range(k) for b in range(a + 1, k)}
    cliques = [tuple(range(k))]
    n = k

    def attach(c):
        nonlocal n
        v = n
        n += 1
        for u in c:
            edges[(min(u, v), max(u, v))] = 1
        new = [tuple(sorted(c[:i] + c[i + 1:] + (v,))) for i in range(k)]
        cliques.extend(new)
        return v, new

    if k % 2:
        attach(cliques[0])
    for _ in range(pairs):
        u, new = attach(rng.choice(cliques))
        attach(rng.choice(new))
    return Graph(n, k, False, edges)


def test_larger_instances_built_with_perfect_matchings():
    # beyond the exhaustive oracle's reach: weaker evidence, only positives are known
    for seed in range(60):
        k = 1 + seed % 3
        g = paired_ktree(k, 8 + seed % 10, seed)
        assert g.n > 14
        found = find_perfect_matching(g)
        assert found is not None and is_perfect_matching(g, found)
