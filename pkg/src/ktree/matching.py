"""Perfect matchings in k-trees via matching vectors over the clique tree.

The clique tree is rooted at a k-clique.  For a node x let H be the subgraph
induced on all vertices in x's subtree.  Its matching vector has one bit per
subset S of a small boundary: set iff H has a matching that leaves exactly S
unmatched.  For a k-node the boundary is the node itself; for a (k+1)-node it
is the k vertices shared with the parent, and the remaining vertex must be
matched.  Vectors of siblings combine by a chain DP over the boundary vertices
each child is responsible for matching.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .graph import CliqueTree, Graph, build_clique_tree


@dataclass(frozen=True)
class MatchingVector:
    """Bit ``mask`` refers to the subset {boundary[p] : bit p of mask set}."""

    boundary: tuple[int, ...]
    bits: tuple[bool, ...]

    def mask(self, subset: Iterable[int]) -> int:
        pos = {v: p for p, v in enumerate(self.boundary)}
        out = 0
        for v in subset:
            if v not in pos:
                raise KeyError(f"{v} is not a boundary vertex")
            out |= 1 << pos[v]
        return out

    def subset(self, mask: int) -> frozenset[int]:
        return frozenset(v for p, v in enumerate(self.boundary) if mask >> p & 1)

    def __getitem__(self, subset: Iterable[int]) -> bool:
        return self.bits[self.mask(subset)]

    def true_sets(self) -> list[frozenset[int]]:
        return [self.subset(x) for x, b in enumerate(self.bits) if b]


def _matchable(g: Graph, vertices: Sequence[int]) -> list[tuple[int, int]] | None:
    """A perfect matching of the few given vertices (all edges are present in g), or None."""
    vs = list(vertices)
    if not vs:
        return []
    if len(vs) % 2:
        return None
    a = vs[0]
    for idx in range(1, len(vs)):
        b = vs[idx]
        if g.adjacent(a, b):
            rest = _matchable(g, vs[1:idx] + vs[idx + 1:])
            if rest is not None:
                return [(a, b)] + rest
    return None


def leaf_vector(vertices: Iterable[int], g: Graph) -> MatchingVector:
    """Exhaustive vector of the subgraph induced on a single clique."""
    boundary = tuple(sorted(vertices))
    bits = []
    for mask in range(1 << len(boundary)):
        matched = [v for p, v in enumerate(boundary) if not mask >> p & 1]
        bits.append(_matchable(g, matched) is not None)
    return MatchingVector(boundary, tuple(bits))


def _chain_tables(size: int, children: Sequence[MatchingVector]) -> list[list[bool]]:
    """dp[j][U]: the first j children can match exactly boundary subset U between them."""
    full = (1 << size) - 1
    dp = [[False] * (1 << size)]
    dp[0][0] = True
    for child in children:
        prev = dp[-1]
        cur = [False] * (1 << size)
        for u in range(1 << size):
            # enumerate U' as the submasks of U
            sub = u
            while True:
                if prev[sub] and child.bits[full & ~(u & ~sub)]:
                    cur[u] = True
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & u
        dp.append(cur)
    return dp


def compose_k_node(boundary: Iterable[int], children: Sequence[MatchingVector]) -> MatchingVector:
    """Chain DP: bit S is set iff the children can jointly match exactly boundary minus S."""
    b = tuple(sorted(boundary))
    for c in children:
        if c.boundary != b:
            raise ValueError(f"child boundary {c.boundary} differs from {b}")
    dp = _chain_tables(len(b), children)
    full = (1 << len(b)) - 1
    last = dp[-1]
    return MatchingVector(b, tuple(last[full & ~s] for s in range(1 << len(b))))


def _reindex(mask: int, src: Sequence[int], dst_pos: dict[int, int]) -> int:
    out = 0
    for p, v in enumerate(src):
        if mask >> p & 1:
            out |= 1 << dst_pos[v]
    return out


def extend_k1(child: MatchingVector, node_vertices: Iterable[int], g: Graph) -> MatchingVector:
    """Lift a child's vector to the k+1 vertices of its parent clique.

    The new vertex y is either left unmatched (bit S+{y} copies bit S) or
    matched to a boundary vertex p through the edge y-p, in which case the
    child must leave p unmatched.
    """
    b = tuple(sorted(node_vertices))
    extra = [v for v in b if v not in child.boundary]
    if len(extra) != 1 or len(b) != len(child.boundary) + 1:
        raise ValueError("child must share all but one of the node's vertices")
    y = extra[0]
    pos = {v: p for p, v in enumerate(b)}
    ybit = 1 << pos[y]
    bits = [False] * (1 << len(b))
    for cm in range(1 << len(child.boundary)):
        if child.bits[cm]:
            bits[_reindex(cm, child.boundary, pos) | ybit] = True
    for mask in range(1 << len(b)):
        if mask & ybit:
            continue
        s = child.subset(0) | {v for v in b if mask >> pos[v] & 1}
        for p in child.boundary:
            if p in s or not g.adjacent(y, p):
                continue
            if child[s | {p}]:
                bits[mask] = True
                break
    return MatchingVector(b, tuple(bits))


def compose_k1_node(
    node_vertices: Iterable[int], shared: Iterable[int], children: Sequence[MatchingVector], g: Graph
) -> MatchingVector:
    """Vector of a (k+1)-node over the vertices it shares with its parent.

    ``children`` are the raw child vectors (over k vertices each); the node's
    own clique is folded in as an extra child.
    """
    b = tuple(sorted(node_vertices))
    shared_b = tuple(sorted(shared))
    top = [v for v in b if v not in shared_b]
    if len(top) != 1:
        raise ValueError("parent must share all but one vertex")
    full = compose_k_node(b, [extend_k1(c, b, g) for c in children] + [leaf_vector(b, g)])
    pos = {v: p for p, v in enumerate(b)}
    bits = tuple(full.bits[_reindex(m, shared_b, pos)] for m in range(1 << len(shared_b)))
    return MatchingVector(shared_b, bits)


class MatchingSolver:
    """Matching vectors for every clique-tree node, plus top-down extraction."""

    def __init__(
        self, g: Graph, ct: CliqueTree | None = None, root: int | None = None, pseudo_child: bool = True
    ):
        if g.directed:
            raise ValueError("matching needs an undirected graph")
        self.g = g
        self.ct = build_clique_tree(g) if ct is None else ct
        k = self.ct.k
        if root is None:
            root = min(x for x, c in enumerate(self.ct.nodes) if len(c) == k)
        self.root = root
        # the node's own clique as an extra input everywhere, or only at leaves
        self.pseudo_child = pseudo_child
        self.parent, self.children, self.order = self.ct.rooted(root)
        self.vectors: dict[int, MatchingVector] = {}
        self._inputs: dict[int, list[MatchingVector]] = {}
        for x in reversed(self.order):
            self._compute(x)

    def is_k_node(self, x: int) -> bool:
        return len(self.ct.nodes[x]) == self.ct.k

    def boundary(self, x: int) -> tuple[int, ...]:
        return self.vectors[x].boundary

    def subtree_vertices(self, x: int) -> set[int]:
        out = set()
        stack = [x]
        while stack:
            y = stack.pop()
            out |= self.ct.nodes[y]
            stack.extend(self.children[y])
        return out

    def _compute(self, x: int) -> None:
        g, nodes = self.g, self.ct.nodes
        kids = [self.vectors[c] for c in self.children[x]]
        b = tuple(sorted(nodes[x]))
        own = [leaf_vector(b, g)] if self.pseudo_child or not kids else []
        if self.is_k_node(x):
            inputs = kids + own
        else:
            inputs = [extend_k1(c, b, g) for c in kids] + own
        self._inputs[x] = inputs
        full = compose_k_node(b, inputs)
        if self.is_k_node(x):
            self.vectors[x] = full
        else:
            shared = tuple(sorted(nodes[self.parent[x]]))
            pos = {v: p for p, v in enumerate(b)}
            self.vectors[x] = MatchingVector(shared, tuple(full.bits[_reindex(m, shared, pos)] for m in range(1 << len(shared))))

    def has_perfect_matching(self) -> bool:
        return self.vectors[self.root].bits[0]

    def find(self) -> list[tuple[int, int]] | None:
        if not self.has_perfect_matching():
            return None
        pairs: list[tuple[int, int]] = []
        stack = [(self.root, frozenset())]
        while stack:
            x, unmatched = stack.pop()
            stack.extend(self._expand(x, unmatched, pairs))
        return sorted(tuple(sorted(p)) for p in pairs)

    def _expand(self, x: int, unmatched: frozenset[int], pairs: list) -> list[tuple[int, frozenset[int]]]:
        """Split node x's demand among its inputs; returns the children's demands."""
        g = self.g
        b = tuple(sorted(self.ct.nodes[x]))
        pos = {v: p for p, v in enumerate(b)}
        size = len(b)
        full = (1 << size) - 1
        inputs = self._inputs[x]
        kids = self.children[x]
        dp = _chain_tables(size, inputs)
        target = full & ~_reindex(self.vectors[x].mask(unmatched), self.vectors[x].boundary, pos)
        if not dp[-1][target]:
            raise AssertionError(f"node {x}: vector promises a matching the tables cannot produce")
        demands = []
        u = target
        for j in range(len(inputs), 0, -1):
            sub = u
            while True:
                if dp[j - 1][sub] and inputs[j - 1].bits[full & ~(u & ~sub)]:
                    break
                if sub == 0:
                    raise AssertionError(f"node {x}: no back-pointer for input {j - 1}")
                sub = (sub - 1) & u
            took = u & ~sub
            demands.append((j - 1, frozenset(v for v in b if not took >> pos[v] & 1)))
            u = sub
        # demands hold (input index, boundary vertices that input leaves unmatched)
        out = []
        for idx, left in demands:
            matched = [v for v in b if v not in left]
            if idx == len(kids):
                local = _matchable(g, matched)
                if local is None:
                    raise AssertionError(f"node {x}: clique cannot match {matched}")
                pairs.extend(local)
                continue
            child = kids[idx]
            if self.is_k_node(x):
                out.append((child, left))
                continue
            cb = self.vectors[child].boundary
            y = next(v for v in b if v not in cb)
            if y in left:
                out.append((child, left - {y}))
                continue
            for p in cb:
                if p not in left and g.adjacent(y, p) and self.vectors[child][(left | {p})]:
                    pairs.append((y, p))
                    out.append((child, left | {p}))
                    break
            else:
                raise AssertionError(f"node {x}: extended child {child} has no partner for {y}")
        return out


def has_perfect_matching(g: Graph, ct: CliqueTree | None = None, pseudo_child: bool = True) -> bool:
    return MatchingSolver(g, ct, pseudo_child=pseudo_child).has_perfect_matching()


def find_perfect_matching(
    g: Graph, ct: CliqueTree | None = None, pseudo_child: bool = True
) -> list[tuple[int, int]] | None:
    return MatchingSolver(g, ct, pseudo_child=pseudo_child).find()


def subsets(vertices: Sequence[int]) -> Iterable[frozenset[int]]:
    for r in range(len(vertices) + 1):
        for c in combinations(vertices, r):
            yield frozenset(c)
