"""Directed reachability in k-paths (halving recursion) and k-trees (spine + subtree matrices)."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .graph import CliqueTree, Graph, build_clique_tree
from .preprocess import RelabeledKPath, build_chain, lift_endpoint, preprocess_kpath


@dataclass(frozen=True)
class ReachMatrix:
    vertex_index: tuple[int, ...]
    pairs: frozenset[tuple[int, int]]

    @property
    def dim(self) -> int:
        return len(self.vertex_index)

    def __getitem__(self, pair: tuple[int, int]) -> bool:
        a, b = pair
        return a == b or (a, b) in self.pairs

    def rows(self) -> list[list[bool]]:
        return [[self[a, b] for b in self.vertex_index] for a in self.vertex_index]


def closure(vertices: Sequence[int], arcs) -> set[tuple[int, int]]:
    """Transitive closure (as pairs, diagonal included) of arcs over a small vertex set."""
    vs = list(vertices)
    reach = {v: {v} for v in vs}
    for a, b in arcs:
        if a in reach and b in reach:
            reach[a].add(b)
    for mid in vs:
        for a in vs:
            if mid in reach[a]:
                reach[a] |= reach[mid]
    return {(a, b) for a in vs for b in reach[a]}


def tuples_by_size(pool: Sequence[int], q: int) -> Iterator[tuple[int, ...]]:
    """Ordered q-tuples of distinct members of ``pool``, lexicographic in pool order."""
    if q == 0:
        yield ()
        return
    for idx, x in enumerate(pool):
        rest = pool[:idx] + pool[idx + 1:]
        for tail in tuples_by_size(rest, q - 1):
            yield (x,) + tail


class IsReach:
    """Halving recursion over a relabelled chain.

    ``is_reach(u, v, i, j)`` decides whether label v is reachable from label u
    inside cliques i..j, with u, v in the end cliques.  The crossing labels in
    the middle clique alternate between the left and right halves, starting on
    u's side and ending on v's.  ``prefix``/``suffix`` closures, when enabled
    for an end clique, add the reachability contributed by the chain beyond it.
    """

    def __init__(self, r: RelabeledKPath, memo: bool = True):
        self.r = r
        self.memo: dict | None = {} if memo else None
        self.calls = 0
        self.max_depth = 0
        self.depth_violations: list[tuple[int, int, int]] = []
        self._root_depth = 0
        self.last_root_depth = 0
        self._prefix: dict[int, set[tuple[int, int]]] = {}
        self._suffix: dict[int, set[tuple[int, int]]] = {}

    # closures of an end clique with respect to the rest of the chain
    def prefix_closure(self, i: int) -> set[tuple[int, int]]:
        if i not in self._prefix:
            labels = self.r.cliques[i]
            self._prefix[i] = {
                (x, y) for x in labels for y in labels if x != y and i > 0 and self.query(x, y, 0, i)
            }
        return self._prefix[i]

    def suffix_closure(self, j: int) -> set[tuple[int, int]]:
        if j not in self._suffix:
            labels = self.r.cliques[j]
            last = self.r.m - 1
            self._suffix[j] = {
                (x, y) for x in labels for y in labels if x != y and j < last and self.query(x, y, j, last)
            }
        return self._suffix[j]

    def query(self, u: int, v: int, i: int, j: int, left: bool = False, right: bool = False) -> bool:
        """Top-level call; checks the depth bound of the whole recursion it triggers."""
        saved, self._root_depth = self._root_depth, 0
        ok = self.is_reach(u, v, i, j, left, right)
        bound = math.ceil(math.log2(j - i)) + 1
        if self._root_depth > bound:
            self.depth_violations.append((i, j, self._root_depth))
        self.last_root_depth = self._root_depth
        self._root_depth = saved
        return ok

    def is_reach(self, u: int, v: int, i: int, j: int, left: bool = False, right: bool = False, depth: int = 1) -> bool:
        r = self.r
        if not i < j:
            raise ValueError(f"need i < j, got {i}, {j}")
        if r.clique_of[u] not in (i, j) or r.clique_of[v] not in (i, j):
            raise ValueError("endpoints must lie in the boundary cliques")
        self.calls += 1
        self.max_depth = max(self.max_depth, depth)
        self._root_depth = max(self._root_depth, depth)
        if u == v:
            return True
        key = (u, v, i, j, left, right)
        if self.memo is not None and key in self.memo:
            return self.memo[key]
        if j - i == 1:
            ans = self._base(u, v, i, j, left, right)
        else:
            ans = self._split(u, v, i, j, left, right, depth)
        if self.memo is not None:
            self.memo[key] = ans
        return ans

    def _base(self, u, v, i, j, left, right) -> bool:
        r = self.r
        inside = set(r.cliques[i]) | set(r.cliques[j])
        extra: dict[int, list[int]] = {}
        if left:
            for a, b in self.prefix_closure(i):
                extra.setdefault(a, []).append(b)
        if right:
            for a, b in self.suffix_closure(j):
                extra.setdefault(a, []).append(b)
        seen = {u}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in list(r.adj[x]) + extra.get(x, []):
                if y in inside and y not in seen:
                    if y == v:
                        return True
                    seen.add(y)
                    queue.append(y)
        return False

    def _split(self, u, v, i, j, left, right, depth) -> bool:
        r = self.r
        l = (i + j) // 2
        halves = {0: (i, l, left, False), 1: (l, j, False, right)}
        start = 0 if r.clique_of[u] == i else 1
        end = 0 if r.clique_of[v] == i else 1
        pool = list(r.cliques[l])
        for q in range(len(pool) + 1):
            if (q % 2 == 0) != (start == end):
                continue
            if self._tuples(u, v, q, pool, start, halves, depth):
                return True
        return False

    def _tuples(self, u, v, q, pool, start, halves, depth) -> bool:
        # depth-first over prefixes; a failing prefix rules out all its extensions,
        # which is the left-to-right short circuit of the conjunction
        def seg(a, b, side):
            lo, hi, lf, rt = halves[side]
            return self.is_reach(a, b, lo, hi, lf, rt, depth + 1)

        def extend(prev, used, side, remaining):
            if remaining == 0:
                return seg(prev, v, side)
            for x in pool:
                if x in used:
                    continue
                if seg(prev, x, side) and extend(x, used | {x}, 1 - side, remaining - 1):
                    return True
            return False

        return extend(u, frozenset(), start, q)


class KPathReach:
    """Reachability queries on one k-path, sharing memo tables across queries."""

    def __init__(self, g: Graph, memo: bool = True):
        if g.kpath is None:
            raise ValueError("graph carries no k-path decomposition")
        self.g = g
        self.d = g.kpath
        self.memo = memo
        self.spikes = self.d.spike_at()
        self.first = {}
        for i, c in enumerate(self.d.cliques):
            for v in c:
                self.first.setdefault(v, i)
        self._plain = IsReach(preprocess_kpath(g, self.d), memo)
        self._dups: dict[int, IsReach] = {}
        self.last_depth = 0

    def solver(self, dup: int | None) -> IsReach:
        if dup is None:
            return self._plain
        if dup not in self._dups:
            self._dups[dup] = IsReach(preprocess_kpath(self.g, self.d, duplicate=dup), self.memo)
        return self._dups[dup]

    def endpoints(self, s: int, t: int) -> tuple[list[int], list[int]]:
        sources = [s] if s not in self.spikes else [x for x, _ in lift_endpoint(s, "source", self.d, self.g)]
        sinks = [t] if t not in self.spikes else [x for x, _ in lift_endpoint(t, "sink", self.d, self.g)]
        return sources, sinks

    def reach_clique_vertices(self, a: int, b: int) -> bool:
        if a == b:
            return True
        i, j = self.first[a], self.first[b]
        dup = None
        if i == j:
            dup = i
            j = i + 1
        solver = self.solver(dup)
        u, v = solver.r.label(i, a), solver.r.label(j, b)
        lo, hi = min(i, j), max(i, j)
        before = solver.max_depth
        solver.max_depth = 0
        ans = solver.query(u, v, lo, hi, left=True, right=True)
        self.last_depth = max(self.last_depth, solver.max_depth)
        solver.max_depth = max(before, solver.max_depth)
        return ans

    def reach(self, s: int, t: int) -> bool:
        if s == t:
            return True
        self.last_depth = 0
        sources, sinks = self.endpoints(s, t)
        return any(self.reach_clique_vertices(a, b) for a in sources for b in sinks)

    def solvers(self) -> list[IsReach]:
        return [self._plain, *self._dups.values()]

    def depth_violations(self) -> list[tuple[int, int, int]]:
        return [v for solver in self.solvers() for v in solver.depth_violations]


def reach_kpath(g: Graph, s: int, t: int, memo: bool = True) -> bool:
    return KPathReach(g, memo).reach(s, t)


def is_reach_kpath(r: RelabeledKPath, u: int, v: int, i: int, j: int, memo: bool = True) -> bool:
    """Single call of the halving recursion on an already relabelled chain."""
    return IsReach(r, memo).query(u, v, i, j)


# --- k-trees -----------------------------------------------------------------


def spine(ct: CliqueTree, a: int, b: int) -> list[int]:
    """Unique tree path between clique-tree nodes a and b."""
    parent = {a: a}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y in ct.adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    return path[::-1]


def shortest_spine(ct: CliqueTree, s: int, t: int) -> list[int]:
    """Spine between the closest pair of nodes containing s and t respectively."""
    starts = ct.containing(s)
    goal = set(ct.containing(t))
    parent = {x: None for x in starts}
    queue = deque(starts)
    while queue:
        x = queue.popleft()
        if x in goal:
            path = [x]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for y in ct.adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    raise ValueError(f"no clique contains both endpoints' regions ({s}, {t})")


class SubtreeReach:
    """Reachability matrices of clique-tree subtrees, memoised per directed tree edge."""

    def __init__(self, g: Graph, ct: CliqueTree):
        self.g = g
        self.ct = ct
        self._down: dict[tuple[int, int], frozenset] = {}

    def _arcs(self, vertices):
        vs = set(vertices)
        for a in vs:
            for b in self.g.successors(a):
                if b in vs:
                    yield a, b

    def fold(self, node: int, acc: set[tuple[int, int]], child: int, child_pairs) -> set[tuple[int, int]]:
        """Merge one child's matrix into the accumulator over ``node``'s vertices."""
        mine = sorted(self.ct.nodes[node])
        both = sorted(self.ct.nodes[node] | self.ct.nodes[child])
        arcs = list(acc) + list(child_pairs) + list(self._arcs(both))
        full = closure(both, arcs)
        return {(a, b) for a, b in full if a in self.ct.nodes[node] and b in self.ct.nodes[node]}

    def down(self, c: int, parent: int) -> frozenset:
        key = (c, parent)
        if key not in self._down:
            # iterative post-order to stay clear of the recursion limit on deep trees
            stack = [(c, parent, False)]
            while stack:
                x, p, done = stack.pop()
                if (x, p) in self._down:
                    continue
                kids = [y for y in self.ct.adj[x] if y != p]
                if not done:
                    stack.append((x, p, True))
                    stack.extend((y, x, False) for y in kids if (y, x) not in self._down)
                    continue
                acc = closure(sorted(self.ct.nodes[x]), self._arcs(self.ct.nodes[x]))
                for y in kids:
                    acc = self.fold(x, acc, y, self._down[(y, x)])
                self._down[(x, p)] = frozenset(acc)
        return self._down[key]

    def matrix(self, l: int, excluded: set[int]) -> ReachMatrix:
        """Matrix over node l's vertices within l plus every neighbour subtree not in ``excluded``."""
        acc = closure(sorted(self.ct.nodes[l]), self._arcs(self.ct.nodes[l]))
        for y in self.ct.adj[l]:
            if y not in excluded:
                acc = self.fold(l, acc, y, self.down(y, l))
        return ReachMatrix(tuple(sorted(self.ct.nodes[l])), frozenset(acc))


def subtree_reach_matrix(ct: CliqueTree, g: Graph, l: int, path: Sequence[int], cache: SubtreeReach | None = None) -> ReachMatrix:
    """Reachability among node l's vertices inside the off-spine subtree rooted at l."""
    cache = cache or SubtreeReach(g, ct)
    pos = path.index(l)
    excluded = {path[p] for p in (pos - 1, pos + 1) if 0 <= p < len(path)}
    return cache.matrix(l, excluded)


class KTreeReach:
    def __init__(self, g: Graph, ct: CliqueTree | None = None, memo: bool = True):
        self.g = g
        self.ct = ct if ct is not None else build_clique_tree(g)
        self.memo = memo
        self.sub = SubtreeReach(g, self.ct)
        self.last_depth = 0
        self.depth_violations: list[tuple[int, int, int]] = []
        # spines recur across queries, so chains and their solvers are kept
        self._solvers: dict[tuple[int, ...], tuple[IsReach, list[int]]] = {}
        self._matrices: dict[tuple[int, frozenset], ReachMatrix] = {}

    def _matrix(self, node: int, path: Sequence[int]) -> ReachMatrix:
        pos = path.index(node)
        excluded = frozenset(path[p] for p in (pos - 1, pos + 1) if 0 <= p < len(path))
        key = (node, excluded)
        if key not in self._matrices:
            self._matrices[key] = self.sub.matrix(node, set(excluded))
        return self._matrices[key]

    def chain_for(self, s: int, t: int) -> tuple[RelabeledKPath, list[int]]:
        return self._chain_of(shortest_spine(self.ct, s, t))

    def _chain_of(self, path: list[int]) -> tuple[RelabeledKPath, list[int]]:
        sets = [self.ct.nodes[x] for x in path]
        if len(path) == 1:
            path = path * 2
            sets = sets * 2
        chain = build_chain(sets, self.g)
        for idx, node in enumerate(path):
            m = self._matrix(node, path if path[0] != path[-1] else path[:1])
            for a, b in m.pairs:
                if a != b:
                    chain.add_arc(chain.label(idx, a), chain.label(idx, b), 1)
        return chain, path

    def reach(self, s: int, t: int) -> bool:
        if s == t:
            return True
        path = tuple(shortest_spine(self.ct, s, t))
        if path not in self._solvers:
            chain, _ = self._chain_of(list(path))
            self._solvers[path] = IsReach(chain, self.memo)
        solver = self._solvers[path]
        chain = solver.r
        before = len(solver.depth_violations)
        solver.max_depth = 0
        ans = solver.query(chain.label(0, s), chain.label(chain.m - 1, t), 0, chain.m - 1)
        self.last_depth = solver.max_depth
        self.depth_violations.extend(solver.depth_violations[before:])
        return ans


def reach_ktree(g: Graph, s: int, t: int, ct: CliqueTree | None = None, memo: bool = True) -> bool:
    return KTreeReach(g, ct, memo).reach(s, t)
