"""Seeded instance families shared by the test modules."""

from __future__ import annotations

import math
import random

from ktree.graph import Graph, assign_weights, gen_kpath, gen_ktree, orient_acyclic, orient_random


def directed_kpath(seed: int, kmax: int = 3, mmax: int = 32) -> Graph:
    rng = random.Random(seed)
    k = rng.randint(1, kmax)
    m = rng.randint(1, mmax)
    return orient_random(gen_kpath(k, m, rng.randint(0, m), seed), seed)


def directed_ktree(seed: int, kmax: int = 4, nmax: int = 60) -> Graph:
    rng = random.Random(seed)
    k = rng.randint(1, kmax)
    return orient_random(gen_ktree(k, rng.randint(k, nmax), seed), seed)


def undirected_ktree(seed: int, kmax: int = 4, nmax: int = 60) -> Graph:
    rng = random.Random(seed)
    k = rng.randint(1, kmax)
    return gen_ktree(k, rng.randint(k, nmax), seed)


def weighted_dag_kpath(seed: int, kmax: int = 3, mmax: int = 32) -> Graph:
    """Weights 1..5, total weight at most 256."""
    rng = random.Random(seed)
    k = rng.randint(1, kmax)
    m = rng.randint(1, mmax)
    g = gen_kpath(k, m, rng.randint(0, m), seed)
    return assign_weights(orient_acyclic(g, seed), seed, 1, 5, 256)


def weighted_dag_ktree(seed: int, kmax: int = 3, nmax: int = 40) -> Graph:
    rng = random.Random(seed)
    k = rng.randint(1, kmax)
    g = gen_ktree(k, rng.randint(k, nmax), seed)
    return assign_weights(orient_acyclic(g, seed), seed, 1, 5, 256)


def query_pairs(g: Graph, seed: int, extra: int = 2) -> list[tuple[int, int]]:
    """A source-to-sink pair of a topological order plus a few random pairs."""
    from ktree.oracles import topological_order

    order = topological_order(g)
    rng = random.Random(seed + 7919)
    pairs = [(order[0], order[-1])]
    pairs += [(rng.randrange(g.n), rng.randrange(g.n)) for _ in range(extra)]
    return pairs


def random_tree(seed: int, max_leaves: int = 2000) -> tuple[dict[int, list[int]], int]:
    """Children map of a random rooted tree; the shape family varies with the seed."""
    rng = random.Random(seed)
    n = int(math.exp(rng.uniform(0, math.log(max_leaves))))
    n = max(n, 1)
    shape = seed % 4
    children: dict[int, list[int]] = {v: [] for v in range(n)}
    for v in range(1, n):
        if shape == 0:  # uniform attachment
            p = rng.randrange(v)
        elif shape == 1:  # long paths
            p = v - 1 if rng.random() < 0.9 else rng.randrange(v)
        elif shape == 2:  # caterpillar
            spine = max(1, n // 4)
            p = v - 1 if v < spine else rng.randrange(spine)
        else:  # bushy: recent nodes preferred
            p = rng.randrange(max(0, v - 5), v)
        children[p].append(v)
    return children, 0


def leaf_count(children: dict[int, list[int]], root: int) -> int:
    """Nodes of degree at most one in the unrooted tree."""
    n = len(children)
    if n == 1:
        return 1
    deg = {v: len(cs) for v, cs in children.items()}
    for cs in children.values():
        for c in cs:
            deg[c] += 1
    return sum(1 for d in deg.values() if d <= 1)
