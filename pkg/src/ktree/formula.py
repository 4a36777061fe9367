"""Call formulas, {+,max}/{+,min} trees and their arithmetization.

A call formula records a divide-and-conquer over *pieces* of a graph.  A call
node asks for an extremal u->v path inside one piece; its children are tuple
nodes, one per sequence of separator vertices at which such a path may cross
between the piece's parts.  A tuple's children are the calls for the segments
between consecutive crossings.  Base pieces are small enough to be solved
exhaustively and become leaves.

Nodes are shared (the formula is a DAG) but every evaluation uses tree
semantics, so a node reached along two routes counts twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Protocol, Sequence

CALL, TUPLE = "call", "tuple"
LEAF, PLUS, EXT, TIMES = "leaf", "plus", "ext", "times"
MODES = ("max", "min")


def postorder(root: int | None, children: Sequence[Sequence[int]] | dict) -> list[int]:
    """Ids reachable from ``root`` in a DAG, every node after all its children."""
    if root is None:
        return []
    out, seen, stack = [], set(), [(root, False)]
    while stack:
        x, done = stack.pop()
        if done:
            out.append(x)
            continue
        if x in seen:
            continue
        seen.add(x)
        stack.append((x, True))
        stack.extend((c, False) for c in children[x] if c not in seen)
    return out


# --- pieces -----------------------------------------------------------------


class Piece(Protocol):
    key: object

    def vertices(self) -> frozenset[int]: ...

    def is_base(self) -> bool: ...

    def base_value(self, u: int, v: int, mode: str) -> int | None: ...

    def separator(self) -> frozenset[int]: ...

    def parts(self) -> list["Piece"]: ...


def extremal_in_window(
    window: Iterable[int],
    succ: Callable[[int], dict[int, int]],
    u: int,
    v: int,
    mode: str,
    origin: Callable[[int], int] = lambda x: x,
) -> int | None:
    """Extremal u->v weight using only vertices of ``window``.

    Vertices sharing an origin are merged first (they are joined by weight-0
    copy edges both ways), after which the window is acyclic.
    """
    better = max if mode == "max" else min
    ws = set(window)
    arcs: dict[int, dict[int, int]] = {}
    nodes = set()
    for a in ws:
        oa = origin(a)
        nodes.add(oa)
        for b, w in succ(a).items():
            if b in ws and origin(b) != oa:
                ob = origin(b)
                out = arcs.setdefault(oa, {})
                out[ob] = better(out[ob], w) if ob in out else w
    src, dst = origin(u), origin(v)
    if src == dst:
        return 0
    indeg = {x: 0 for x in nodes}
    for a, out in arcs.items():
        for b in out:
            indeg[b] += 1
    order = [x for x in nodes if indeg[x] == 0]
    for x in order:
        for y in arcs.get(x, {}):
            indeg[y] -= 1
            if indeg[y] == 0:
                order.append(y)
    if len(order) != len(nodes):
        raise ValueError("window contains a directed cycle; the graph must be acyclic")
    best = {src: 0}
    for x in order:
        if x not in best:
            continue
        for y, w in arcs.get(x, {}).items():
            c = best[x] + w
            best[y] = better(best[y], c) if y in best else c
    return best.get(dst)


class ChainPiece:
    """Sets i..j of a chain of vertex sets; split at the middle set."""

    def __init__(self, chain: "Chain", i: int, j: int):
        self.chain = chain
        self.i, self.j = i, j
        self.key = (chain.name, i, j)
        self._vertices = None

    def vertices(self) -> frozenset[int]:
        if self._vertices is None:
            self._vertices = frozenset().union(*self.chain.sets[self.i: self.j + 1])
        return self._vertices

    def is_base(self) -> bool:
        return self.j - self.i <= 1

    def base_value(self, u, v, mode):
        return extremal_in_window(self.vertices(), self.chain.succ, u, v, mode, self.chain.origin)

    def middle(self) -> int:
        return (self.i + self.j) // 2

    def separator(self) -> frozenset[int]:
        return frozenset(self.chain.sets[self.middle()])

    def parts(self) -> list["ChainPiece"]:
        l = self.middle()
        return [self.chain.piece(self.i, l), self.chain.piece(l, self.j)]

    def __repr__(self):
        return f"ChainPiece({self.chain.name}, {self.i}, {self.j})"


class Chain:
    """A sequence of vertex sets in which each set separates its neighbours."""

    def __init__(self, name, sets: Sequence[Iterable[int]], succ: Callable[[int], dict[int, int]], origin=None):
        self.name = name
        self.sets = [frozenset(s) for s in sets]
        self.succ = succ
        self.origin = origin if origin is not None else (lambda x: x)
        self._pieces: dict[tuple[int, int], ChainPiece] = {}

    def piece(self, i: int, j: int) -> ChainPiece:
        if (i, j) not in self._pieces:
            self._pieces[(i, j)] = ChainPiece(self, i, j)
        return self._pieces[(i, j)]

    def whole(self) -> ChainPiece:
        return self.piece(0, len(self.sets) - 1)


# --- call formulas ----------------------------------------------------------


@dataclass
class CallFormula:
    """Alternating call/tuple DAG.  ``root`` is None for the empty formula."""

    kinds: list[str] = field(default_factory=list)
    labels: list[tuple] = field(default_factory=list)
    children: list[tuple[int, ...]] = field(default_factory=list)
    leaf: dict[int, tuple] = field(default_factory=dict)
    root: int | None = None
    pieces: dict[object, Piece] = field(default_factory=dict)

    def add(self, kind: str, label: tuple, children: Sequence[int] = ()) -> int:
        self.kinds.append(kind)
        self.labels.append(label)
        self.children.append(tuple(children))
        return len(self.kinds) - 1

    @property
    def empty(self) -> bool:
        return self.root is None

    def __len__(self) -> int:
        return len(self.kinds)

    def reachable_nodes(self) -> list[int]:
        """Node ids reachable from the root, children before parents."""
        return postorder(self.root, self.children)

    def depth(self) -> int:
        """Longest root-to-leaf node count."""
        d: dict[int, int] = {}
        for x in self.reachable_nodes():
            d[x] = 1 + max((d[c] for c in self.children[x]), default=0)
        return d.get(self.root, 0) if self.root is not None else 0

    def leaf_value(self, x: int, mode: str) -> int | None:
        key, u, v = self.leaf[x]
        if u == v:
            return 0
        return self.pieces[key].base_value(u, v, mode)

    def boolean_values(self) -> dict[int, bool]:
        """Calls are ORs, tuples ANDs, leaves the reachability of their base case."""
        val: dict[int, bool] = {}
        for x in self.reachable_nodes():
            if x in self.leaf:
                val[x] = self.leaf_value(x, "min") is not None
            elif self.kinds[x] == CALL:
                val[x] = any(val[c] for c in self.children[x])
            else:
                val[x] = all(val[c] for c in self.children[x])
        return val

    def size_stats(self) -> dict:
        nodes = self.reachable_nodes()
        return {
            "nodes": len(nodes),
            "calls": sum(1 for x in nodes if self.kinds[x] == CALL),
            "tuples": sum(1 for x in nodes if self.kinds[x] == TUPLE),
            "leaves": sum(1 for x in nodes if x in self.leaf),
            "depth": self.depth(),
        }


class FormulaBuilder:
    """Builds the call formula of one query over a piece hierarchy.

    With ``eager`` set, a tuple is extended only while every segment so far is
    feasible, so the result is already pruned.  Without it every alternation
    sequence is emitted and :func:`prune_formula` removes the dead ones.
    """

    def __init__(self, eager: bool = False):
        self.f = CallFormula()
        self.eager = eager
        self._calls: dict[tuple, int] = {}
        self._feasible: dict[tuple, bool] = {}

    def feasible(self, piece: Piece, u: int, v: int) -> bool:
        key = (piece.key, u, v)
        if key not in self._feasible:
            if u == v:
                ans = True
            elif piece.is_base():
                ans = piece.base_value(u, v, "min") is not None
            else:
                ans = next(self.crossings(piece, u, v, check=True), None) is not None
            self._feasible[key] = ans
        return self._feasible[key]

    def crossings(self, piece: Piece, u: int, v: int, check: bool) -> Iterator[tuple]:
        """Alternation sequences ((part, x_1), ..., (part, x_q), (part, None)).

        Each entry names the part holding the segment that ends at x_a (or at
        v for the final entry).  Consecutive segments lie in different parts;
        crossing vertices are distinct separator vertices other than u and v.
        With ``check`` a prefix is extended only while its segments are
        feasible.  Generated lazily, so taking the first item is cheap.
        """
        parts = piece.parts()
        sep = sorted(piece.separator() - {u, v})
        pv = [p.vertices() for p in parts]

        def extend(prev, side, used, seq):
            if v in pv[side] and (not check or self.feasible(parts[side], prev, v)):
                yield seq + ((side, None),)
            for x in sep:
                if x in used or x not in pv[side]:
                    continue
                if check and not self.feasible(parts[side], prev, x):
                    continue
                for nxt in range(len(parts)):
                    if nxt != side and x in pv[nxt]:
                        yield from extend(x, nxt, used | {x}, seq + ((side, x),))

        for side in range(len(parts)):
            if u in pv[side]:
                yield from extend(u, side, frozenset(), ())

    def call(self, piece: Piece, u: int, v: int) -> int | None:
        key = (piece.key, u, v)
        if key in self._calls:
            return self._calls[key]
        f = self.f
        f.pieces[piece.key] = piece
        if u == v or piece.is_base():
            if self.eager and not self.feasible(piece, u, v):
                self._calls[key] = None
                return None
            x = f.add(CALL, key)
            f.leaf[x] = key
            self._calls[key] = x
            return x
        if self.eager and not self.feasible(piece, u, v):
            self._calls[key] = None
            return None
        x = f.add(CALL, key)
        self._calls[key] = x
        parts = piece.parts()
        kids = []
        for seq in self._sequences(piece, u, v):
            segs = []
            prev = u
            ok = True
            for side, end in seq:
                end_v = v if end is None else end
                c = self.call(parts[side], prev, end_v)
                if c is None:
                    ok = False
                    break
                segs.append(c)
                prev = end_v
            if ok:
                label = tuple(end for _, end in seq[:-1])
                kids.append(f.add(TUPLE, (tuple(side for side, _ in seq), label), segs))
        f.children[x] = tuple(kids)
        return x

    def _sequences(self, piece, u, v):
        return list(self.crossings(piece, u, v, check=self.eager))

    def build(self, piece: Piece, u: int, v: int) -> CallFormula:
        self.f.root = self.call(piece, u, v)
        return self.f


def build_formula(piece: Piece, u: int, v: int, eager: bool = False) -> CallFormula:
    return FormulaBuilder(eager).build(piece, u, v)


def prune_formula(f: CallFormula) -> CallFormula:
    """Drop every node whose boolean value is false; an empty formula if the root is."""
    val = f.boolean_values()
    out = CallFormula(pieces=f.pieces)
    if f.root is None or not val[f.root]:
        return out
    alive = {f.root}
    stack = [f.root]
    while stack:
        x = stack.pop()
        for c in f.children[x]:
            if val[c] and c not in alive:
                alive.add(c)
                stack.append(c)
    new: dict[int, int] = {}
    for x in f.reachable_nodes():
        if x not in alive:
            continue
        kids = [new[c] for c in f.children[x] if val[c]]
        y = out.add(f.kinds[x], f.labels[x], kids)
        if x in f.leaf:
            out.leaf[y] = f.leaf[x]
        new[x] = y
    out.root = new[f.root]
    return out


# --- operator trees ---------------------------------------------------------


@dataclass
class OpTree:
    """{PLUS, EXTREMAL} DAG with integer leaves, evaluated with tree semantics."""

    mode: str
    kinds: list[str] = field(default_factory=list)
    weights: list[int] = field(default_factory=list)
    children: list[tuple[int, ...]] = field(default_factory=list)
    root: int | None = None

    def add(self, kind: str, weight: int = 0, children: Sequence[int] = ()) -> int:
        self.kinds.append(kind)
        self.weights.append(weight)
        self.children.append(tuple(children))
        return len(self.kinds) - 1

    def leaf(self, w: int) -> int:
        return self.add(LEAF, w)

    def plus(self, *kids: int) -> int:
        return self.add(PLUS, 0, kids)

    def ext(self, *kids: int) -> int:
        return self.add(EXT, 0, kids)

    def order(self) -> list[int]:
        """Ids reachable from the root, children first."""
        return postorder(self.root, self.children)

    def fold(self, leaf_fn, plus_fn, ext_fn) -> dict[int, object]:
        val: dict[int, object] = {}
        for x in self.order():
            kind = self.kinds[x]
            if kind == LEAF:
                val[x] = leaf_fn(self.weights[x])
            elif kind == PLUS:
                val[x] = plus_fn([val[c] for c in self.children[x]])
            else:
                val[x] = ext_fn([val[c] for c in self.children[x]])
        return val


def to_op_tree(f: CallFormula, mode: str) -> OpTree:
    """Tuples become PLUS, calls EXTREMAL; leaves carry their exhaustive payload."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    t = OpTree(mode)
    if f.root is None:
        return t
    new: dict[int, int] = {}
    for x in f.reachable_nodes():
        if x in f.leaf:
            w = f.leaf_value(x, mode)
            if w is None:
                raise ValueError("formula must be pruned before conversion")
            new[x] = t.leaf(w)
        elif f.kinds[x] == TUPLE:
            new[x] = t.plus(*(new[c] for c in f.children[x]))
        else:
            new[x] = t.ext(*(new[c] for c in f.children[x]))
    t.root = new[f.root]
    return t


def eval_op_tree(t: OpTree) -> int:
    if t.root is None:
        raise ValueError("empty operator tree")
    better = max if t.mode == "max" else min
    return t.fold(lambda w: w, sum, better)[t.root]


def leaf_weight_sum(t: OpTree) -> int:
    """Sum of leaf weights with shared nodes counted once per occurrence."""
    return t.fold(lambda w: w, sum, sum)[t.root]


def count_proof_trees(t: OpTree) -> int:
    """Number of ways to pick one child at every EXTREMAL node (tree semantics)."""
    return t.fold(lambda w: 1, math.prod, sum)[t.root]


# --- arithmetization --------------------------------------------------------


def smallest_power_of_two(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def proof_tree_m(t: OpTree, r: int) -> int:
    """Smallest m with r**m exceeding the proof-tree count, which suffices for recovery."""
    count = count_proof_trees(t)
    b = r.bit_length() - 1
    if r == 1 << b:
        return max(1, -(-count.bit_length() // b))
    m = 1
    while r**m <= count:
        m += 1
    return m


@dataclass
class ArithTree:
    """{TIMES, PLUS} DAG; leaf values r**(m*w) are stored by their exponent."""

    r: int
    m: int
    kinds: list[str]
    exponents: list[int]
    children: list[tuple[int, ...]]
    root: int | None

    def leaf_value(self, x: int):
        e = self.exponents[x]
        b = self.r.bit_length() - 1
        if self.r == 1 << b:
            return 1 << (b * e)
        return self.r ** e


def arithmetize(t: OpTree, n: int, m: int | None = None) -> ArithTree:
    """PLUS -> TIMES, max -> PLUS, leaf w -> r**(m*w) with r the power of two >= n.

    ``m`` defaults to the total leaf weight plus one.
    """
    if t.mode != "max":
        raise ValueError("arithmetization is defined for max-mode trees only")
    if t.root is None:
        raise ValueError("empty operator tree")
    r = smallest_power_of_two(n)
    if m is None:
        m = leaf_weight_sum(t) + 1
    kinds = [TIMES if k == PLUS else (PLUS if k == EXT else LEAF) for k in t.kinds]
    exps = [m * w if k == LEAF else 0 for k, w in zip(t.kinds, t.weights)]
    return ArithTree(r, m, kinds, exps, list(t.children), t.root)


def eval_arith(a: ArithTree):
    val: dict[int, object] = {}
    for x in postorder(a.root, a.children):
        kind = a.kinds[x]
        if kind == LEAF:
            val[x] = a.leaf_value(x)
        elif kind == TIMES:
            acc = 1
            for c in a.children[x]:
                acc *= val[c]
            val[x] = acc
        else:
            acc = 0
            for c in a.children[x]:
                acc += val[c]
            val[x] = acc
    return val[a.root]


def integer_log(v: int, r: int) -> int:
    """floor(log_r v) by exact integer arithmetic."""
    if v <= 0:
        raise ValueError("logarithm of a non-positive value")
    b = r.bit_length() - 1
    if r == 1 << b:
        return (int(v).bit_length() - 1) // b
    e = 0
    v = int(v)
    while v >= r:
        v //= r
        e += 1
    return e


def recover(v, r: int, m: int) -> int:
    """floor(log_r(v) / m); v == 0 means the tree was empty or invalid."""
    if v == 0:
        raise ValueError("zero value: empty or invalid arithmetic tree")
    return integer_log(v, r) // m
