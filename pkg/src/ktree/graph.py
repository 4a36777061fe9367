"""Graphs, k-tree / k-path generators and the clique-tree representation.

A k-tree is grown from a k-clique by repeatedly attaching a new vertex to
every vertex of an existing k-clique (its *support*).  A k-path is the
special case where new vertices may only attach to the current clique.
Generators record how they built the graph so downstream code never has to
recognise decompositions from raw edge sets.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator


class GraphError(ValueError):
    """Raised for structurally invalid graphs or generator parameters."""


@dataclass(frozen=True)
class ConstructionSequence:
    base: tuple[int, ...]
    steps: tuple[tuple[int, tuple[int, ...]], ...]

    def replay(self) -> set[tuple[int, int]]:
        """Undirected edge set (canonical pairs) produced by the sequence."""
        edges = {_canon(a, b) for a, b in itertools.combinations(self.base, 2)}
        present = set(self.base)
        for v, support in self.steps:
            if v in present:
                raise GraphError(f"vertex {v} added twice")
            for u in support:
                if u not in present:
                    raise GraphError(f"support vertex {u} not yet present")
                edges.add(_canon(u, v))
            present.add(v)
        return edges


@dataclass(frozen=True)
class KPathDecomposition:
    cliques: tuple[tuple[int, ...], ...]
    spikes: tuple[tuple[int, int], ...] = ()

    @property
    def m(self) -> int:
        return len(self.cliques)

    def spike_at(self) -> dict[int, int]:
        return dict(self.spikes)

    def occurrences(self, v: int) -> list[int]:
        return [i for i, c in enumerate(self.cliques) if v in c]

    def problems(self, g: "Graph") -> list[str]:
        """List every violated decomposition invariant (empty when valid)."""
        out = []
        k = g.k
        for i, c in enumerate(self.cliques):
            if len(set(c)) != k:
                out.append(f"clique {i} does not have {k} vertices")
            for a, b in itertools.combinations(c, 2):
                if not g.adjacent(a, b):
                    out.append(f"clique {i} misses edge {a}-{b}")
        for i in range(len(self.cliques) - 1):
            shared = set(self.cliques[i]) & set(self.cliques[i + 1])
            if len(shared) != k - 1:
                out.append(f"cliques {i},{i + 1} share {len(shared)} vertices")
        clique_vertices = set().union(*map(set, self.cliques)) if self.cliques else set()
        spikes = self.spike_at()
        for w, at in self.spikes:
            if w in clique_vertices:
                out.append(f"spike {w} also lies in a clique")
            if not 0 <= at < len(self.cliques):
                out.append(f"spike {w} attached to missing clique {at}")
                continue
            if g.neighbors(w) != set(self.cliques[at]):
                out.append(f"spike {w} is not adjacent to exactly clique {at}")
        for w in spikes:
            if g.neighbors(w) & spikes.keys():
                out.append(f"spike {w} has a spike neighbour")
        if clique_vertices | spikes.keys() != set(range(g.n)) or (
            clique_vertices & spikes.keys()
        ):
            out.append("cliques and spikes do not partition the vertex set")
        return out


@dataclass
class Graph:
    """Vertex ids are ``0..n-1``; ``edges`` maps ``(tail, head)`` to a weight.

    Undirected graphs store each edge once as ``(min, max)``.  Directed graphs
    may hold both ``(u, v)`` and ``(v, u)``.  Weights are positive except for
    zero-weight copy edges, which only ever appear in derived structures.
    """

    n: int
    k: int
    directed: bool = False
    edges: dict[tuple[int, int], int] = field(default_factory=dict)
    construction: ConstructionSequence | None = None
    kpath: KPathDecomposition | None = None

    def __post_init__(self):
        for (a, b), w in self.edges.items():
            if a == b:
                raise GraphError(f"self-loop at {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise GraphError(f"edge {a}-{b} out of range")
            if w < 1:
                raise GraphError(f"edge {a}-{b} has non-positive weight {w}")
            if not self.directed and a > b:
                raise GraphError(f"undirected edge {a}-{b} not canonical")

    @cached_property
    def _out(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.n)]
        for (a, b), w in self.edges.items():
            out[a][b] = w
            if not self.directed:
                out[b][a] = w
        return out

    @cached_property
    def _in(self) -> list[dict[int, int]]:
        inn: list[dict[int, int]] = [{} for _ in range(self.n)]
        for (a, b), w in self.edges.items():
            inn[b][a] = w
            if not self.directed:
                inn[a][b] = w
        return inn

    @cached_property
    def _und(self) -> list[set[int]]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for a, b in self.edges:
            nb[a].add(b)
            nb[b].add(a)
        return nb

    def successors(self, v: int) -> dict[int, int]:
        return self._out[v]

    def predecessors(self, v: int) -> dict[int, int]:
        return self._in[v]

    def neighbors(self, v: int) -> set[int]:
        """Neighbours in the underlying undirected graph."""
        return self._und[v]

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._und[a]

    def has_arc(self, a: int, b: int) -> bool:
        return b in self._out[a]

    def weight(self, a: int, b: int) -> int:
        return self._out[a][b]

    def undirected_edges(self) -> set[tuple[int, int]]:
        return {_canon(a, b) for a, b in self.edges}

    def arcs(self) -> Iterator[tuple[int, int, int]]:
        """All traversable arcs, both directions for undirected graphs."""
        for (a, b), w in self.edges.items():
            yield a, b, w
            if not self.directed:
                yield b, a, w

    def total_weight(self) -> int:
        return sum(self.edges.values())

    def with_edges(self, edges: dict[tuple[int, int], int], directed: bool) -> "Graph":
        return Graph(self.n, self.k, directed, dict(edges), self.construction, self.kpath)


def _canon(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _check_params(k: int, n: int) -> None:
    if k < 1:
        raise GraphError("k must be at least 1")
    if n < k:
        raise GraphError(f"a k-tree needs at least k={k} vertices, got n={n}")


def gen_ktree(k: int, n: int, seed: int) -> Graph:
    """Random undirected k-tree on ``n`` vertices with its construction recorded."""
    _check_params(k, n)
    rng = random.Random(seed)
    base = tuple(range(k))
    edges = {_canon(a, b): 1 for a, b in itertools.combinations(base, 2)}
    cliques = [base]
    steps = []
    for v in range(k, n):
        support = rng.choice(cliques)
        for u in support:
            edges[_canon(u, v)] = 1
        steps.append((v, support))
        for drop in range(k):
            cliques.append(tuple(sorted(support[:drop] + support[drop + 1:] + (v,))))
    return Graph(n, k, False, edges, ConstructionSequence(base, tuple(steps)))


def gen_kpath(k: int, m: int, spike_count: int, seed: int) -> Graph:
    """Random undirected k-path with ``m`` current cliques and ``spike_count`` spikes.

    Vertex ids follow construction order, so spikes are interleaved with the
    clique vertices that were current when they were attached.
    """
    if k < 1:
        raise GraphError("k must be at least 1")
    if m < 1:
        raise GraphError("a k-path needs at least one clique")
    if spike_count < 0:
        raise GraphError("spike count must be non-negative")
    rng = random.Random(seed)
    spikes_at = sorted(rng.randrange(m) for _ in range(spike_count))
    current = tuple(range(k))
    nxt = k
    edges = {_canon(a, b): 1 for a, b in itertools.combinations(current, 2)}
    cliques = []
    spikes = []
    steps = []
    pending = deque(spikes_at)
    for i in range(m):
        cliques.append(current)
        while pending and pending[0] == i:
            pending.popleft()
            w = nxt
            nxt += 1
            for u in current:
                edges[_canon(u, w)] = 1
            spikes.append((w, i))
            steps.append((w, current))
        if i < m - 1:
            v = nxt
            nxt += 1
            for u in current:
                edges[_canon(u, v)] = 1
            steps.append((v, current))
            drop = rng.randrange(k)
            current = current[:drop] + current[drop + 1:] + (v,)
    return Graph(
        nxt,
        k,
        False,
        edges,
        ConstructionSequence(tuple(range(k)), tuple(steps)),
        KPathDecomposition(tuple(cliques), tuple(spikes)),
    )


def orient_acyclic(g: Graph, seed: int | None = None, order: list[int] | None = None) -> Graph:
    """Orient every edge from lower to higher rank of a vertex permutation."""
    if order is None:
        order = list(range(g.n))
        random.Random(seed).shuffle(order)
    rank = {v: i for i, v in enumerate(order)}
    edges = {}
    for (a, b), w in g.edges.items():
        edges[(a, b) if rank[a] < rank[b] else (b, a)] = w
    return g.with_edges(edges, directed=True)


def orient_random(g: Graph, seed: int, both: float = 0.2) -> Graph:
    """Orient each edge one way at random, or both ways with probability ``both``."""
    rng = random.Random(seed)
    edges = {}
    for (a, b), w in sorted(g.edges.items()):
        x = rng.random()
        if x < both:
            edges[(a, b)] = w
            edges[(b, a)] = w
        elif x < both + (1 - both) / 2:
            edges[(a, b)] = w
        else:
            edges[(b, a)] = w
    return g.with_edges(edges, directed=True)


def assign_weights(g: Graph, seed: int, low: int = 1, high: int = 5, cap: int | None = 256) -> Graph:
    """Random integer weights in ``[low, high]``, trimmed so the total stays within ``cap``."""
    rng = random.Random(seed)
    keys = sorted(g.edges)
    if cap is not None and len(keys) * low > cap:
        raise GraphError(f"{len(keys)} edges cannot fit under weight cap {cap}")
    weights = {e: rng.randint(low, high) for e in keys}
    if cap is not None:
        total = sum(weights.values())
        heavy = [e for e in keys if weights[e] > low]
        while total > cap:
            e = rng.choice(heavy)
            weights[e] -= 1
            total -= 1
            if weights[e] == low:
                heavy.remove(e)
    return g.with_edges(weights, g.directed)


def enumerate_cliques(g: Graph, size: int) -> list[tuple[int, ...]]:
    """All cliques of exactly ``size`` vertices, as sorted tuples."""
    higher = [sorted(u for u in g.neighbors(v) if u > v) for v in range(g.n)]
    out = []

    def extend(clique, candidates):
        if len(clique) == size:
            out.append(tuple(clique))
            return
        for idx, u in enumerate(candidates):
            rest = [x for x in candidates[idx + 1:] if g.adjacent(u, x)]
            if len(clique) + 1 + len(rest) >= size:
                extend(clique + [u], rest)

    if size == 0:
        return [()]
    for v in range(g.n):
        extend([v], higher[v])
    return out


@dataclass(frozen=True)
class CliqueTree:
    """Nodes are the k- and (k+1)-cliques; edges join strictly nested pairs."""

    k: int
    nodes: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]

    @cached_property
    def adj(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.nodes]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for lst in adj:
            lst.sort()
        return adj

    @cached_property
    def index(self) -> dict[frozenset[int], int]:
        return {c: i for i, c in enumerate(self.nodes)}

    @cached_property
    def _containing(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, c in enumerate(self.nodes):
            for v in c:
                out.setdefault(v, []).append(i)
        return out

    def containing(self, v: int) -> list[int]:
        return self._containing.get(v, [])

    def is_tree(self) -> bool:
        if not self.nodes:
            return False
        if len(self.edges) != len(self.nodes) - 1:
            return False
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.nodes)

    def rooted(self, root: int) -> tuple[list[int], list[list[int]], list[int]]:
        """(parent, children, preorder) for the tree rooted at ``root``."""
        parent = [-1] * len(self.nodes)
        children: list[list[int]] = [[] for _ in self.nodes]
        order = [root]
        parent[root] = root
        for x in order:
            for y in self.adj[x]:
                if parent[y] == -1:
                    parent[y] = x
                    children[x].append(y)
                    order.append(y)
        parent[root] = -1
        return parent, children, order


def build_clique_tree(g: Graph, k: int | None = None) -> CliqueTree:
    """Tree representation T(G) of a k-tree.

    Raises GraphError when the nesting graph is not a tree, which means g is
    not a k-tree.
    """
    k = g.k if k is None else k
    small = enumerate_cliques(g, k)
    large = enumerate_cliques(g, k + 1)
    nodes = tuple(frozenset(c) for c in small + large)
    index = {c: i for i, c in enumerate(nodes)}
    edges = []
    for c in large:
        j = index[frozenset(c)]
        for sub in itertools.combinations(c, k):
            edges.append((index[frozenset(sub)], j))
    ct = CliqueTree(k, nodes, tuple(sorted(edges)))
    if not ct.is_tree():
        raise GraphError("clique nesting graph is not a tree; input is not a k-tree")
    return ct


def validate_ktree(g: Graph, k: int | None = None) -> bool:
    """Simplicial peeling: strip degree-k vertices with clique neighbourhoods down to K_k."""
    k = g.k if k is None else k
    if k < 1 or g.n < k:
        return False
    nb = {v: set(g.neighbors(v)) for v in range(g.n)}
    queue = deque(v for v in nb if len(nb[v]) == k)
    while len(nb) > k and queue:
        v = queue.popleft()
        if v not in nb or len(nb[v]) != k:
            continue
        if not all(b in nb[a] for a, b in itertools.combinations(nb[v], 2)):
            continue
        for u in nb.pop(v):
            nb[u].discard(v)
            if len(nb[u]) == k:
                queue.append(u)
        # a vertex rejected earlier may have become simplicial
        queue.extend(u for u in nb if len(nb[u]) == k)
    if len(nb) != k:
        return False
    return all(len(s) == k - 1 for s in nb.values())


def underlying(g: Graph) -> Graph:
    """Undirected version of g (weights of antiparallel arcs keep the first seen)."""
    edges: dict[tuple[int, int], int] = {}
    for (a, b), w in sorted(g.edges.items()):
        edges.setdefault(_canon(a, b), w)
    return Graph(g.n, g.k, False, edges, g.construction, g.kpath)


def induced_edges(g: Graph, vertices: Iterable[int]) -> list[tuple[int, int, int]]:
    vs = set(vertices)
    return [(a, b, w) for a, b, w in g.arcs() if a in vs and b in vs]
