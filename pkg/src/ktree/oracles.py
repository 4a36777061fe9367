"""Decomposition-free reference implementations.

Nothing here may import the decomposition modules; these functions only see
the raw Graph so that cross-checks stay independent.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import Iterable

from .graph import Graph

EXHAUSTIVE_LIMIT = 14


def bfs_reach(g: Graph, s: int, t: int) -> bool:
    if s == t:
        return True
    seen = {s}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y in g.successors(x):
            if y == t:
                return True
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return False


def reachable_set(g: Graph, s: int, allowed: set[int] | None = None) -> set[int]:
    seen = {s}
    stack = [s]
    while stack:
        x = stack.pop()
        for y in g.successors(x):
            if y not in seen and (allowed is None or y in allowed):
                seen.add(y)
                stack.append(y)
    return seen


def bfs_distance(g: Graph, s: int, t: int) -> int | None:
    """Unweighted hop distance; None when t is unreachable."""
    dist = {s: 0}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if x == t:
            return dist[x]
        for y in g.successors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return None


def topological_order(g: Graph) -> list[int]:
    indeg = [0] * g.n
    for _, b, _ in g.arcs():
        indeg[b] += 1
    order = [v for v in range(g.n) if indeg[v] == 0]
    for x in order:
        for y in g.successors(x):
            indeg[y] -= 1
            if indeg[y] == 0:
                order.append(y)
    if len(order) != g.n:
        raise ValueError("graph has a directed cycle")
    return order


def dag_extremal_path(g: Graph, s: int, t: int, mode: str = "max") -> int | None:
    """Longest (mode='max') or shortest (mode='min') s-t path weight in a DAG."""
    if mode not in ("max", "min"):
        raise ValueError(f"unknown mode {mode!r}")
    if not g.directed:
        raise ValueError("dag_extremal_path needs a directed graph")
    better = max if mode == "max" else min
    best: dict[int, int] = {s: 0}
    for x in topological_order(g):
        if x not in best:
            continue
        for y, w in g.successors(x).items():
            cand = best[x] + w
            best[y] = better(best[y], cand) if y in best else cand
    return best.get(t)


def brute_matching(
    g: Graph, vertices: Iterable[int] | None = None, limit: int | None = EXHAUSTIVE_LIMIT
) -> list[tuple[int, int]] | None:
    """A perfect matching of the (undirected) subgraph induced on ``vertices``, or None.

    Exhaustive: always branches on the lowest-id unmatched vertex.
    """
    vs = sorted(range(g.n) if vertices is None else set(vertices))
    if limit is not None and len(vs) > limit:
        raise ValueError(f"exhaustive matching limited to {limit} vertices, got {len(vs)}")
    if len(vs) % 2:
        return None
    pos = {v: i for i, v in enumerate(vs)}
    nbr = [0] * len(vs)
    for v in vs:
        for u in g.neighbors(v):
            if u in pos:
                nbr[pos[v]] |= 1 << pos[u]

    @lru_cache(maxsize=None)
    def solve(mask: int):
        if mask == 0:
            return ()
        low = mask & -mask
        i = low.bit_length() - 1
        options = nbr[i] & mask & ~low
        while options:
            bit = options & -options
            options ^= bit
            rest = solve(mask & ~low & ~bit)
            if rest is not None:
                return ((vs[i], vs[bit.bit_length() - 1]),) + rest
        return None

    found = solve((1 << len(vs)) - 1)
    return None if found is None else list(found)


def has_perfect_matching_brute(g: Graph, vertices: Iterable[int] | None = None) -> bool:
    return brute_matching(g, vertices) is not None


def is_perfect_matching(g: Graph, pairs: Iterable[tuple[int, int]], vertices: Iterable[int] | None = None) -> bool:
    """Checker: pairs are edges, pairwise disjoint, and cover every vertex."""
    want = set(range(g.n) if vertices is None else vertices)
    covered: set[int] = set()
    for a, b in pairs:
        if a == b or not g.adjacent(a, b):
            return False
        if a in covered or b in covered:
            return False
        covered.update((a, b))
    return covered == want
