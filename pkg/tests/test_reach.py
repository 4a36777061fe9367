import math
import random

import pytest

from corpus import directed_kpath, directed_ktree
from ktree.graph import Graph, KPathDecomposition, build_clique_tree, gen_ktree, orient_acyclic, orient_random
from ktree.oracles import bfs_reach, reachable_set
from ktree.preprocess import preprocess_kpath
from ktree.reach import (
    IsReach,
    KPathReach,
    KTreeReach,
    SubtreeReach,
    closure,
    reach_kpath,
    reach_ktree,
    shortest_spine,
    spine,
    subtree_reach_matrix,
)


def test_same_label_and_same_vertex():
    g = directed_kpath(3)
    assert reach_kpath(g, 0, 0)
    assert reach_ktree(directed_ktree(3), 1, 1)


def test_k1_chain_left_to_right():
    d = KPathDecomposition(((0,), (1,), (2,)))
    g = Graph(3, 1, True, {(0, 1): 1, (1, 2): 1}, kpath=d)
    assert reach_kpath(g, 0, 2)
    assert not reach_kpath(g, 2, 0)


def test_spike_without_out_neighbours():
    d = KPathDecomposition(((0, 1),), ((2, 0),))
    g = Graph(3, 2, True, {(0, 1): 1, (0, 2): 1, (1, 2): 1}, kpath=d)
    assert not reach_kpath(g, 2, 0)
    assert reach_kpath(g, 0, 2)


def test_is_reach_rejects_bad_endpoints():
    g = directed_kpath(11)
    r = preprocess_kpath(g)
    solver = IsReach(r)
    if r.m >= 3:
        inner = r.cliques[1][0]
        with pytest.raises(ValueError):
            solver.is_reach(inner, r.cliques[-1][0], 0, r.m - 1)
    with pytest.raises(ValueError):
        solver.is_reach(r.cliques[0][0], r.cliques[0][0], 0, 0)


@pytest.mark.parametrize("memo", [True, False])
def test_kpath_all_pairs_against_bfs(memo):
    for seed in range(60 if memo else 15):
        g = directed_kpath(seed, mmax=16 if memo else 8)
        kr = KPathReach(g, memo)
        for s in range(g.n):
            for t in range(g.n):
                assert kr.reach(s, t) == bfs_reach(g, s, t), (seed, s, t)
        assert not kr.depth_violations()


def test_strict_recursion_depth_profile():
    g = directed_kpath(5, mmax=16)
    r = preprocess_kpath(g)
    solver = IsReach(r, memo=False)
    for a in r.cliques[0]:
        for b in r.cliques[-1]:
            if r.m > 1:
                solver.query(a, b, 0, r.m - 1)
                assert solver.last_root_depth <= math.ceil(math.log2(r.m - 1)) + 1
    assert not solver.depth_violations


def test_k1_trees_match_bfs():
    for seed in range(30):
        g = orient_random(gen_ktree(1, 15, seed), seed)
        kr = KTreeReach(g)
        for s in range(g.n):
            for t in range(g.n):
                assert kr.reach(s, t) == bfs_reach(g, s, t)


@pytest.mark.parametrize("memo", [True, False])
def test_ktree_all_pairs_against_bfs(memo):
    for seed in range(40 if memo else 10):
        g = directed_ktree(seed, nmax=25 if memo else 12)
        kr = KTreeReach(g, memo=memo)
        for s in range(g.n):
            for t in range(g.n):
                assert kr.reach(s, t) == bfs_reach(g, s, t), (seed, s, t)
        assert not kr.depth_violations


def test_spine_examples():
    tri = Graph(3, 2, False, {(0, 1): 1, (0, 2): 1, (1, 2): 1})
    ct = build_clique_tree(tri)
    assert spine(ct, 0, 0) == [0]
    leaves = [x for x, c in enumerate(ct.nodes) if len(c) == 2]
    p = spine(ct, leaves[0], leaves[1])
    assert len(p) == 3 and len(ct.nodes[p[1]]) == 3


def test_spines_are_tree_paths():
    for seed in range(20):
        ct = build_clique_tree(gen_ktree(1 + seed % 3, 20, seed))
        rng = random.Random(seed)
        for _ in range(10):
            a, b = rng.randrange(len(ct.nodes)), rng.randrange(len(ct.nodes))
            p = spine(ct, a, b)
            assert p[0] == a and p[-1] == b and len(set(p)) == len(p)
            assert all(y in ct.adj[x] for x, y in zip(p, p[1:]))
        s, t = rng.randrange(20), rng.randrange(20)
        sp = shortest_spine(ct, s, t)
        assert s in ct.nodes[sp[0]] and t in ct.nodes[sp[-1]]


def test_closure_is_reflexive_and_transitive():
    pairs = closure([1, 2, 3], [(1, 2), (2, 3)])
    assert {(1, 1), (2, 2), (3, 3), (1, 2), (2, 3), (1, 3)} == pairs


def off_spine_vertices(ct, l, path):
    pos = path.index(l)
    banned = {path[p] for p in (pos - 1, pos + 1) if 0 <= p < len(path)}
    seen, stack = {l}, [l]
    while stack:
        for y in ct.adj[stack.pop()]:
            if y not in seen and y not in banned:
                seen.add(y)
                stack.append(y)
    return set().union(*(ct.nodes[x] for x in seen))


def test_subtree_matrix_matches_restricted_bfs():
    for seed in range(40):
        g = directed_ktree(seed, nmax=20)
        ct = build_clique_tree(g)
        cache = SubtreeReach(g, ct)
        rng = random.Random(seed)
        path = spine(ct, rng.randrange(len(ct.nodes)), rng.randrange(len(ct.nodes)))
        for l in path:
            m = subtree_reach_matrix(ct, g, l, path, cache)
            allowed = off_spine_vertices(ct, l, path)
            for a in ct.nodes[l]:
                got = reachable_set(g, a, allowed)
                for b in ct.nodes[l]:
                    assert m[a, b] == (b in got)
            assert all(m[a, a] for a in ct.nodes[l])


def test_matrix_follows_edge_directions():
    g = orient_acyclic(Graph(3, 2, False, {(0, 1): 1, (0, 2): 1, (1, 2): 1}), order=[0, 1, 2])
    ct = build_clique_tree(g)
    big = next(x for x, c in enumerate(ct.nodes) if len(c) == 3)
    m = subtree_reach_matrix(ct, g, big, [x for x in ct.adj[big]][:1] + [big])
    assert m[0, 2] and not m[2, 0]
