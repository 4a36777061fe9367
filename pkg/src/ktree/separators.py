"""Recursive 3/4-leaf separators of rooted trees via balanced parentheses.

A rooted tree is normalised so that every internal node has an even number
(at least two) of leaf children placed symmetrically around its non-leaf
children.  Labelling the left half of each node's leaf children ``(`` and the
right half ``)`` makes the leaves of every subtree a contiguous balanced
substring.  Cutting a balanced interval out of that string corresponds to
detaching a node together with some of its children, which is how a tree is
split into pieces sharing only the separator nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union


# --- ordered trees and parentheses ------------------------------------------


@dataclass
class OrderedTree:
    root: int
    children: dict[int, list[int]]
    dummy: set[int] = field(default_factory=set)

    def is_leaf(self, x: int) -> bool:
        return not self.children.get(x)

    def leaf_children(self, x: int) -> list[int]:
        return [c for c in self.children.get(x, []) if self.is_leaf(c)]

    def internal_nodes(self) -> list[int]:
        return [x for x in self.preorder() if not self.is_leaf(x)]

    def preorder(self) -> list[int]:
        out = []
        stack = [self.root]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(reversed(self.children.get(x, [])))
        return out


def normalize_ordered_tree(children: Mapping[int, Sequence[int]], root: int) -> OrderedTree:
    """Add dummy leaves and order children as the parenthesisation requires.

    Dummy leaves get negative ids.  Real leaf children sit next to the block of
    non-leaf children and dummies on the outside, so inner pairs prefer real
    leaves.
    """
    kids = {x: list(cs) for x, cs in children.items()}
    out: dict[int, list[int]] = {}
    dummy: set[int] = set()
    next_dummy = -1
    stack = [root]
    while stack:
        x = stack.pop()
        cs = kids.get(x, [])
        if not cs and x != root:
            continue
        leaves = [c for c in cs if not kids.get(c)]
        inner = [c for c in cs if kids.get(c)]
        fill = max(0, 2 - len(leaves))
        if (len(leaves) + fill) % 2:
            fill += 1
        dummies = list(range(next_dummy, next_dummy - fill, -1))
        next_dummy -= fill
        dummy.update(dummies)
        half = (len(leaves) + fill) // 2
        # dummies outermost on both sides, real leaves nearest the middle
        left_d = dummies[: fill // 2]
        right_d = dummies[fill // 2:]
        reals_left = leaves[: half - len(left_d)]
        reals_right = leaves[half - len(left_d):]
        out[x] = left_d + reals_left + inner + reals_right + right_d
        stack.extend(inner)
    return OrderedTree(root, out, dummy)


def parenthesize(t: OrderedTree) -> tuple[str, list[int]]:
    """Leaf labels in left-to-right order, plus the leaf id behind each symbol."""
    symbols: list[str] = []
    leaves: list[int] = []
    stack: list[int] = [t.root]
    while stack:
        x = stack.pop()
        cs = t.children.get(x, [])
        lc = [c for c in cs if t.is_leaf(c)]
        half = len(lc) // 2
        left = set(lc[:half])
        seq = []
        for c in cs:
            if t.is_leaf(c):
                seq.append(("(", c) if c in left else (")", c))
            else:
                seq.append(c)
        # emit in order: push reversed so that the leftmost item pops first
        for item in reversed(seq):
            stack.append(item)
        while stack and isinstance(stack[-1], tuple):
            sym, leaf = stack.pop()
            symbols.append(sym)
            leaves.append(leaf)
    return "".join(symbols), leaves


def is_balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += 1 if ch == "(" else -1
        if depth < 0:
            return False
    return depth == 0


def match_pairs(s: str) -> list[int]:
    if not is_balanced(s):
        raise ValueError("string is not balanced")
    match = [0] * len(s)
    stack = []
    for i, ch in enumerate(s):
        if ch == "(":
            stack.append(i)
        else:
            j = stack.pop()
            match[i], match[j] = j, i
    return match


def _pair_children(s: str, match: list[int], start: int, end: int) -> list[int]:
    """Opening positions of the top-level pairs inside the half-open span [start, end)."""
    out = []
    i = start
    while i < end:
        out.append(i)
        i = match[i] + 1
    return out


def balanced_intervals(s: str, match: list[int] | None = None):
    """Every proper balanced half-open interval: runs of consecutive sibling pairs."""
    match = match_pairs(s) if match is None else match
    n = len(s)
    for i in range(n):
        if s[i] != "(":
            continue
        j = match[i] + 1
        while True:
            if (i, j) != (0, n):
                yield i, j
            if j >= n or s[j] != "(":
                break
            j = match[j] + 1


def split_balanced(s: str) -> list[tuple[int, int]]:
    """Disjoint balanced half-open intervals to cut out of ``s`` (one suffices).

    Picks the shortest balanced interval of length at least a quarter of
    ``s``, ties broken by leftmost start; such an interval never exceeds
    three quarters, so cut and remainder both stay within the bound.
    """
    n = len(s)
    if n < 4:
        raise ValueError("need a balanced string of length at least 4")
    match = match_pairs(s)
    need = -(-n // 4)
    best = None
    for i in range(n):
        if s[i] != "(":
            continue
        j = match[i] + 1
        while j - i < need and j < n and s[j] == "(":
            j = match[j] + 1
        if j - i < need or (i, j) == (0, n):
            continue
        if best is None or j - i < best[1] - best[0]:
            best = (i, j)
    assert best is not None and 4 * (best[1] - best[0]) <= 3 * n + 3
    return [best]


def pieces_of(s: str, cuts: Sequence[tuple[int, int]]) -> list[str]:
    """The cut substrings followed by the remainder."""
    out = [s[a:b] for a, b in cuts]
    keep = [ch for i, ch in enumerate(s) if not any(a <= i < b for a, b in cuts)]
    out.append("".join(keep))
    return out


# --- recursive separators ---------------------------------------------------


@dataclass(frozen=True)
class Base:
    """A piece with at most two leaves: a path, listed end to end."""

    root: int
    nodes: frozenset[int]
    path: tuple[int, ...]
    leaves: int


@dataclass(frozen=True)
class Split:
    """``parts`` are (T1, T2, T3) or (T1, T3) when only one separator was needed.

    T1 holds a with some of its children, T2 likewise for b, and T3 the rest
    together with a and b themselves.
    """

    root: int
    nodes: frozenset[int]
    a: int
    b: int | None
    parts: tuple["SeparatorDecomposition", ...]
    leaf_counts: tuple[int, ...]
    leaves: int


SeparatorDecomposition = Union[Base, Split]


def depth(d: SeparatorDecomposition) -> int:
    if isinstance(d, Base):
        return 0
    return 1 + max(depth(p) for p in d.parts)


class _Piece:
    """A connected node set of the input tree.

    Pieces are re-rooted at a node of largest degree, so the leaves of the
    rooted piece are exactly its nodes of degree at most one.
    """

    def __init__(self, nbr: Mapping[int, Sequence[int]], nodes: frozenset[int], root: int | None = None):
        self.nodes = nodes
        self.nbr = {x: [y for y in nbr[x] if y in nodes] for x in nodes}
        if root is None:
            root = min(nodes, key=lambda x: (-len(self.nbr[x]), x))
        self.root = root
        self.kids: dict[int, list[int]] = {}
        seen = {root}
        order = [root]
        for x in order:
            self.kids[x] = [y for y in self.nbr[x] if y not in seen]
            seen.update(self.kids[x])
            order.extend(self.kids[x])
        assert len(order) == len(nodes), "piece is not connected"

    def leaves(self) -> list[int]:
        if len(self.nodes) == 1:
            return [self.root]
        return [x for x in self.nodes if len(self.nbr[x]) <= 1]

    def below(self, tops: Sequence[int]) -> set[int]:
        out = set()
        stack = list(tops)
        while stack:
            x = stack.pop()
            out.add(x)
            stack.extend(self.kids[x])
        return out

    def as_path(self) -> tuple[int, ...]:
        start = min(self.leaves())
        order = [start]
        prev = None
        while True:
            nxt = [y for y in self.nbr[order[-1]] if y != prev]
            if not nxt:
                break
            prev = order[-1]
            order.append(nxt[0])
        return tuple(order)


def _leaf_count(nbr, nodes: frozenset[int]) -> int:
    if len(nodes) == 1:
        return 1
    return sum(1 for x in nodes if sum(1 for y in nbr[x] if y in nodes) <= 1)


def _interval_to_cut(ot: OrderedTree, s: str, leaves: list[int], match: list[int], parent_of: dict, cut: tuple[int, int]):
    """(a, chosen children of a) for a balanced interval of the piece string."""
    a_pos, b_pos = cut
    tops = _pair_children(s, match, a_pos, b_pos)
    owner = parent_of[leaves[tops[0]]]
    lc = [c for c in ot.children[owner] if ot.is_leaf(c)]
    outermost = {lc[0], lc[-1]}
    if len(tops) == 1 and leaves[tops[0]] not in outermost:
        # an inner pair of `owner`: its inner leaf children plus every non-leaf child
        inside = set(leaves[a_pos:b_pos])
        chosen = [c for c in ot.children[owner] if c in inside or not ot.is_leaf(c)]
        return owner, chosen
    if len(tops) == 1:
        # outermost pair of `owner` spans owner's whole subtree
        return parent_of[owner], [owner]
    # a run of sibling subtrees below one node
    kids = [parent_of[leaves[p]] for p in tops]
    return parent_of[kids[0]], kids


def _split_piece(piece: _Piece, nbr, tries: int = 4):
    """Separators for one piece: the most balanced of the candidate cuts.

    Candidates are the balanced intervals of the piece's normalised string.
    The ones whose leaf weight is closest to half are mapped back to the tree
    and scored by the size of their largest piece; if the remainder is still
    the largest piece, a second disjoint cut is sought the same way.
    """
    ot = normalize_ordered_tree(piece.kids, piece.root)
    s, leaves = parenthesize(ot)
    parent_of = {c: x for x, cs in ot.children.items() for c in cs}
    prefix = [0]
    for leaf in leaves:
        prefix.append(prefix[-1] + (0 if leaf in ot.dummy else 1))
    match = match_pairs(s)
    total = prefix[-1]

    def evaluate(cut_list):
        used: set[int] = set()
        parts = []
        seps: list[int] = []
        for cut in cut_list:
            a, chosen = _interval_to_cut(ot, s, leaves, match, parent_of, cut)
            real = [c for c in chosen if c not in ot.dummy]
            if not real:
                return None
            sub = piece.below(real) | {a}
            if a in used or a in seps or (sub - {a}) & (used | set(seps)):
                return None
            used |= sub - {a}
            seps.append(a)
            parts.append(frozenset(sub))
        rest = frozenset(piece.nodes - used) | frozenset(seps)
        if any(len(p) == len(piece.nodes) for p in parts + [rest]):
            return None
        counts = [_leaf_count(nbr, p) for p in parts + [rest]]
        return seps, parts + [rest], counts, list(cut_list)

    def ranked(extra=()):
        cands = [c for c in balanced_intervals(s, match) if prefix[c[1]] - prefix[c[0]] > 0]
        if extra:
            (a0, b0), = extra
            cands = [(i, j) for i, j in cands if j <= a0 or i >= b0]
            half = (total - (prefix[b0] - prefix[a0])) / 2
        else:
            half = total / 2
        cands.sort(key=lambda c: (abs(prefix[c[1]] - prefix[c[0]] - half), c[0], c[1] - c[0]))
        return cands

    best = None
    evaluated = 0
    for cut in ranked():
        res = evaluate([cut])
        if res is None:
            continue
        if best is None or max(res[2]) < max(best[2]):
            best = res
        evaluated += 1
        if evaluated >= tries and 4 * max(best[2]) <= 3 * total:
            break
    if best is None:
        return None
    first = best[3][0]
    if best[2][-1] == max(best[2]) and 2 * best[2][-1] > total:
        evaluated = 0
        for cut in ranked([first]):
            res = evaluate([first, cut])
            if res is None:
                continue
            if max(res[2]) < max(best[2]):
                best = res
            evaluated += 1
            if evaluated >= tries:
                break
    return best


def recursive_separators(children: Mapping[int, Sequence[int]], root: int) -> SeparatorDecomposition:
    """Split recursively until every piece has at most two leaves (and so is a path)."""
    nbr: dict[int, list[int]] = {root: []}
    stack = [root]
    while stack:
        x = stack.pop()
        for c in children.get(x, []):
            nbr.setdefault(x, []).append(c)
            nbr.setdefault(c, []).append(x)
            stack.append(c)
    return _decompose(nbr, frozenset(nbr), root)


def _decompose(nbr, nodes: frozenset[int], root: int | None = None) -> SeparatorDecomposition:
    piece = _Piece(nbr, nodes)
    leaves = len(piece.leaves())
    if leaves <= 2:
        return Base(piece.root if root is None else root, nodes, piece.as_path(), leaves)
    found = _split_piece(piece, nbr)
    limit = math.ceil(3 * leaves / 4)
    if found is None or max(found[2]) > limit:
        # another root exposes different child groupings
        for r in sorted(x for x in nodes if len(piece.nbr[x]) >= 3 and x != piece.root):
            alt = _split_piece(_Piece(nbr, nodes, r), nbr)
            if alt is not None and (found is None or max(alt[2]) < max(found[2])):
                found = alt
                if max(found[2]) <= limit:
                    break
    if found is None:
        raise RuntimeError("no separator found for a piece with more than two leaves")
    seps, parts, counts, _ = found
    decs = tuple(_decompose(nbr, p) for p in parts)
    return Split(
        piece.root,
        nodes,
        seps[0],
        seps[1] if len(seps) > 1 else None,
        decs,
        tuple(counts),
        leaves,
    )


def tree_from_edges(edges: Sequence[tuple[int, int]], root: int) -> dict[int, list[int]]:
    """Children lists of an undirected tree rooted at ``root`` (neighbour order kept sorted)."""
    nbr: dict[int, list[int]] = {root: []}
    for a, b in edges:
        nbr.setdefault(a, []).append(b)
        nbr.setdefault(b, []).append(a)
    children: dict[int, list[int]] = {}
    seen = {root}
    order = [root]
    for x in order:
        children[x] = []
        for y in sorted(nbr.get(x, [])):
            if y not in seen:
                seen.add(y)
                children[x].append(y)
                order.append(y)
    return children


def check_decomposition(d: SeparatorDecomposition, children: Mapping[int, Sequence[int]]) -> list[str]:
    """Every violated invariant of a decomposition (empty when sound)."""
    problems = []
    nbr: dict[int, list[int]] = {}
    for x, cs in children.items():
        nbr.setdefault(x, [])
        for c in cs:
            nbr[x].append(c)
            nbr.setdefault(c, []).append(x)

    def leaves_of(nodes):
        return set(_Piece(nbr, nodes).leaves())

    stack = [d]
    while stack:
        x = stack.pop()
        if isinstance(x, Base):
            if x.leaves > 2:
                problems.append(f"base piece rooted at {x.root} has {x.leaves} leaves")
            if set(x.path) != set(x.nodes):
                problems.append(f"base piece rooted at {x.root} is not a path")
            continue
        limit = math.ceil(3 * x.leaves / 4)
        for p, c in zip(x.parts, x.leaf_counts):
            if c > limit:
                problems.append(f"piece of {c} leaves exceeds 3/4 of {x.leaves}")
            if len(leaves_of(p.nodes)) != c:
                problems.append("recorded leaf count is wrong")
        seps = {x.a} | ({x.b} if x.b is not None else set())
        union = frozenset().union(*(p.nodes for p in x.parts))
        if union != x.nodes:
            problems.append("parts do not cover the piece")
        for i, p in enumerate(x.parts):
            for q in x.parts[i + 1:]:
                if not (p.nodes & q.nodes) <= seps:
                    problems.append("parts overlap outside the separators")
        rest = x.parts[-1]
        if not seps <= rest.nodes:
            problems.append("T3 lacks a copy of a separator")
        own = leaves_of(x.nodes)
        got = set().union(*(leaves_of(p.nodes) for p in x.parts))
        if not own <= got or not got <= own | seps:
            problems.append("leaves are not partitioned among the parts")
        stack.extend(x.parts)
    return problems


def decomposition_to_dict(d: SeparatorDecomposition) -> dict:
    if isinstance(d, Base):
        return {"kind": "base", "root": d.root, "path": list(d.path), "leaves": d.leaves}
    return {
        "kind": "split",
        "root": d.root,
        "a": d.a,
        "b": d.b,
        "leaves": d.leaves,
        "leafCounts": list(d.leaf_counts),
        "parts": [decomposition_to_dict(p) for p in d.parts],
    }
