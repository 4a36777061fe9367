"""Extremal paths in weighted DAG k-paths and k-trees, and undirected distance.

Longest and shortest paths go through the call formula: build, prune, turn
into a {+,max} or {+,min} tree and evaluate.  In max mode the tree is also
arithmetized and the value recovered from the big integer, which must agree.
Undirected distance in k-trees uses a layer decomposition with t at layer 0
and a greedy walk towards lower layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import (
    Chain,
    CallFormula,
    arithmetize,
    build_formula,
    count_proof_trees,
    eval_arith,
    eval_op_tree,
    leaf_weight_sum,
    proof_tree_m,
    prune_formula,
    recover,
    smallest_power_of_two,
    to_op_tree,
)
from .graph import CliqueTree, Graph, build_clique_tree
from .preprocess import RelabeledKPath, build_chain, eliminate_spikes
from .separators import Base, SeparatorDecomposition, Split, recursive_separators


@dataclass
class PathResult:
    value: int | None
    method: str
    arith_bits: int = 0
    arith_value: int | None = None
    r: int = 0
    m: int = 0
    formula: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "arithBits": self.arith_bits,
            "arithValue": self.arith_value,
            "r": self.r,
            "m": self.m,
            "formula": self.formula,
        }


def _need_dag(g: Graph) -> None:
    if not g.directed:
        raise ValueError("extremal paths need a directed acyclic graph")


def evaluate_formula(f: CallFormula, mode: str, n: int, check_arith: bool = True, method: str = "") -> PathResult:
    """Steps after building: prune, operator tree, evaluation, arithmetized cross-check."""
    pruned = prune_formula(f)
    stats = f.size_stats()
    stats["prunedNodes"] = len(pruned)
    if pruned.empty:
        return PathResult(None, method, formula=stats)
    t = to_op_tree(pruned, mode)
    value = eval_op_tree(t)
    res = PathResult(value, method, formula=stats)
    if mode == "max" and check_arith:
        r = smallest_power_of_two(n)
        # the total leaf weight plus one, raised if needed so that r**m exceeds
        # the number of proof trees (zero-weight leaves can make the sum too small)
        m = max(leaf_weight_sum(t) + 1, proof_tree_m(t, r))
        a = arithmetize(t, n, m)
        big = eval_arith(a)
        res.arith_value = recover(big, r, m)
        res.arith_bits = int(big).bit_length()
        res.r, res.m = r, m
        stats["leafWeightSum"] = leaf_weight_sum(t)
        stats["proofTrees"] = count_proof_trees(t).bit_length()
        if res.arith_value != value:
            raise AssertionError(f"arithmetized value {res.arith_value} disagrees with {value}")
    return res


# --- k-paths ----------------------------------------------------------------


def kpath_query_chain(g: Graph, s: int, t: int, mode: str) -> tuple[RelabeledKPath, int, int]:
    """Relabelled chain in which s occupies the first clique and t the last.

    s is added to every clique up to its first occurrence (its attach clique
    if it is a spike) and t to every clique from its last occurrence on.  The
    added copies are joined by weight-0 copy edges like any other copies, so
    the chain's label paths still correspond to walks of g.
    """
    d = g.kpath
    if d is None:
        raise ValueError("graph carries no k-path decomposition")
    spikes = d.spike_at()
    cliques = [set(c) for c in d.cliques]

    def span(v):
        if v in spikes:
            return spikes[v], spikes[v]
        occ = d.occurrences(v)
        if not occ:
            raise ValueError(f"vertex {v} is not in the decomposition")
        return occ[0], occ[-1]

    first_s, _ = span(s)
    _, last_t = span(t)
    for i in range(first_s + 1):
        cliques[i].add(s)
    for i in range(last_t, len(cliques)):
        cliques[i].add(t)
    if len(cliques) == 1:
        cliques.append(set(cliques[0]))
    r = build_chain(cliques, g, mode, list(range(len(d.cliques))) + [len(d.cliques) - 1] * (len(cliques) - len(d.cliques)))
    eliminate_spikes(r, d, g)
    return r, r.label(0, s), r.label(r.m - 1, t)


def chain_of(r: RelabeledKPath, name="kpath") -> Chain:
    return Chain(name, r.cliques, lambda a: r.adj[a], lambda a: r.origin[a])


def build_call_formula(r: RelabeledKPath, u: int, v: int, eager: bool = True) -> CallFormula:
    """Call formula of the halving recursion from label u (first clique) to v (last clique)."""
    return build_formula(chain_of(r).whole(), u, v, eager)


def kpath_formula(g: Graph, s: int, t: int, mode: str, eager: bool = True) -> CallFormula:
    r, u, v = kpath_query_chain(g, s, t, mode)
    return build_call_formula(r, u, v, eager)


def longest_path_kpath(g: Graph, s: int, t: int, check_arith: bool = True, eager: bool = True) -> PathResult:
    _need_dag(g)
    if s == t:
        return PathResult(0, "kpath-formula")
    f = kpath_formula(g, s, t, "max", eager)
    return evaluate_formula(f, "max", g.n, check_arith, "kpath-formula")


def shortest_path_kpath(g: Graph, s: int, t: int, eager: bool = True) -> PathResult:
    _need_dag(g)
    if s == t:
        return PathResult(0, "kpath-formula")
    f = kpath_formula(g, s, t, "min", eager)
    return evaluate_formula(f, "min", g.n, False, "kpath-formula")


# --- k-trees ----------------------------------------------------------------


class TreePiece:
    """A Split of the clique tree's separator decomposition.

    Paths may cross between parts only at vertices of the separator cliques
    a and b, since parts share no other vertices.
    """

    def __init__(self, ctx: "TreeFormulaContext", d: Split):
        self.ctx = ctx
        self.d = d
        self.key = ("tree", id(d))
        self._vertices = frozenset().union(*(ctx.ct.nodes[x] for x in d.nodes))
        sep = set(ctx.ct.nodes[d.a])
        if d.b is not None:
            sep |= ctx.ct.nodes[d.b]
        self._sep = frozenset(sep)
        self._parts = None

    def vertices(self):
        return self._vertices

    def is_base(self):
        return False

    def base_value(self, u, v, mode):  # pragma: no cover - never a base piece
        raise NotImplementedError

    def separator(self):
        return self._sep

    def parts(self):
        if self._parts is None:
            self._parts = [self.ctx.piece(p) for p in self.d.parts]
        return self._parts


class TreeFormulaContext:
    """Maps separator-decomposition records to formula pieces."""

    def __init__(self, g: Graph, ct: CliqueTree, decomposition: SeparatorDecomposition | None = None):
        self.g, self.ct = g, ct
        if decomposition is None:
            _, children, _ = ct.rooted(0)
            decomposition = recursive_separators({x: cs for x, cs in enumerate(children)}, 0)
        self.decomposition = decomposition
        self._pieces: dict[int, object] = {}

    def piece(self, d: SeparatorDecomposition):
        if id(d) not in self._pieces:
            if isinstance(d, Base):
                # a path of clique-tree nodes, halved like a k-path
                chain = Chain(("path", id(d)), self.path_sets(d.path), self.g.successors)
                self._pieces[id(d)] = chain.whole()
            else:
                self._pieces[id(d)] = TreePiece(self, d)
        return self._pieces[id(d)]

    def root(self):
        return self.piece(self.decomposition)

    def path_sets(self, path) -> list[frozenset[int]]:
        """Vertex sets of a path piece, keeping only its (k+1)-cliques.

        Each k-clique on the path lies inside a neighbouring (k+1)-clique, so
        dropping it loses no vertex and each kept set still separates the
        sets on either side of it.
        """
        sets = [self.ct.nodes[x] for x in path]
        big = [c for c in sets if len(c) == self.ct.k + 1]
        if not big or frozenset().union(*big) != frozenset().union(*sets):
            return sets
        return big


def ktree_formula(g: Graph, s: int, t: int, ct: CliqueTree | None = None, eager: bool = True) -> CallFormula:
    ct = build_clique_tree(g) if ct is None else ct
    ctx = TreeFormulaContext(g, ct)
    return build_formula(ctx.root(), s, t, eager)


def longest_path_ktree(g: Graph, s: int, t: int, ct: CliqueTree | None = None, check_arith: bool = True) -> PathResult:
    _need_dag(g)
    if s == t:
        return PathResult(0, "ktree-formula")
    f = ktree_formula(g, s, t, ct)
    return evaluate_formula(f, "max", g.n, check_arith, "ktree-formula")


def shortest_path_ktree(g: Graph, s: int, t: int, ct: CliqueTree | None = None) -> PathResult:
    _need_dag(g)
    if s == t:
        return PathResult(0, "ktree-formula")
    f = ktree_formula(g, s, t, ct)
    return evaluate_formula(f, "min", g.n, False, "ktree-formula")


def extremal_path(g: Graph, s: int, t: int, mode: str, check_arith: bool = True) -> PathResult:
    """Dispatch on the available structure: k-path decomposition first, else k-tree."""
    if g.kpath is not None:
        if mode == "max":
            return longest_path_kpath(g, s, t, check_arith)
        return shortest_path_kpath(g, s, t)
    if mode == "max":
        return longest_path_ktree(g, s, t, check_arith=check_arith)
    return shortest_path_ktree(g, s, t)


# --- undirected distance ----------------------------------------------------


@dataclass
class LayerAssignment:
    layer: dict[int, int]
    base_clique: frozenset[int]
    support: dict[int, frozenset[int]]


def layer_decompose(g: Graph, t: int, ct: CliqueTree | None = None) -> LayerAssignment:
    """Layers of a k-tree re-rooted at a k-clique containing t.

    Walking the clique tree outwards from that k-clique, each vertex first
    appears in a (k+1)-clique whose parent k-clique is its support; its layer
    is one more than the highest layer in the support.
    """
    ct = build_clique_tree(g) if ct is None else ct
    k = ct.k
    candidates = [x for x in ct.containing(t) if len(ct.nodes[x]) == k]
    if not candidates:
        raise ValueError(f"vertex {t} lies in no k-clique")
    root = candidates[0]
    parent, _, order = ct.rooted(root)
    base = ct.nodes[root]
    layer = {v: 0 for v in base}
    support: dict[int, frozenset[int]] = {}
    for x in order:
        if x == root or len(ct.nodes[x]) != k + 1:
            continue
        sup = ct.nodes[parent[x]]
        for v in ct.nodes[x] - sup:
            if v not in layer:
                layer[v] = 1 + max((layer[u] for u in sup), default=-1)
                support[v] = sup
    return LayerAssignment(layer, base, support)


def layer_problems(g: Graph, la: LayerAssignment) -> list[str]:
    """Violations of the two layer properties (empty when both hold).

    Layer 0 is a clique, so the no-edge rule applies to higher layers only.
    """
    out = []
    k = len(la.base_clique)
    zero = {v for v, x in la.layer.items() if x == 0}
    if zero != set(la.base_clique):
        out.append("layer 0 is not the base clique")
    for v, x in la.layer.items():
        lower = {u for u in g.neighbors(v) if la.layer[u] < x}
        if x > 0:
            if len(lower) != k:
                out.append(f"vertex {v} has {len(lower)} lower neighbours")
            elif any(not g.adjacent(a, b) for a in lower for b in lower if a < b):
                out.append(f"lower neighbours of {v} are not a clique")
        for u in g.neighbors(v):
            if u > v and x > 0 and la.layer[u] == x:
                out.append(f"edge {v}-{u} inside layer {x}")
    if len(la.layer) != g.n:
        out.append("some vertices have no layer")
    return out


def greedy_walk(g: Graph, la: LayerAssignment, s: int, t: int) -> list[int]:
    """Vertices visited from s: lowest-layer neighbour each step, then t."""
    walk = [s]
    cur = s
    while la.layer[cur] > 0 and cur != t:
        best = min(la.layer[u] for u in g.neighbors(cur))
        if t in g.neighbors(cur) and la.layer[t] == best:
            cur = t
        else:
            cur = min(u for u in g.neighbors(cur) if la.layer[u] == best)
        walk.append(cur)
    if cur != t:
        walk.append(t)
    return walk


def undirected_distance(g: Graph, s: int, t: int, ct: CliqueTree | None = None, la: LayerAssignment | None = None) -> int:
    if g.directed:
        raise ValueError("undirected distance needs an undirected graph")
    if s == t:
        return 0
    la = layer_decompose(g, t, ct) if la is None else la
    return len(greedy_walk(g, la, s, t)) - 1
