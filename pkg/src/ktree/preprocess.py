"""Disjoint relabelling of a clique chain, copy edges and spike removal.

Every (clique index, vertex) pair gets its own label.  Copies of one vertex in
consecutive cliques are joined both ways by weight-0 copy edges, original arcs
are replicated between labels of the same or adjacent cliques, and spikes are
replaced by two-arc shortcuts inside their clique.  Afterwards each clique is
a separator of the label graph, which is what the halving recursion needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import Graph, KPathDecomposition

MODES = (None, "max", "min")


@dataclass
class RelabeledKPath:
    cliques: list[tuple[int, ...]]
    origin: list[int]
    clique_of: list[int]
    adj: list[dict[int, int]]
    mode: str | None = None
    source_index: list[int] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.cliques)

    def label(self, i: int, v: int) -> int:
        for x in self.cliques[i]:
            if self.origin[x] == v:
                return x
        raise KeyError(f"vertex {v} not in clique {i}")

    def add_arc(self, a: int, b: int, w: int) -> None:
        if a == b:
            return
        old = self.adj[a].get(b)
        if old is None:
            self.adj[a][b] = w
        elif self.mode == "max":
            self.adj[a][b] = max(old, w)
        else:
            self.adj[a][b] = min(old, w)

    def arcs(self):
        for a, out in enumerate(self.adj):
            for b, w in out.items():
                yield a, b, w

    def as_graph(self) -> Graph:
        """Label graph as a directed Graph; copy edges keep their weight 0."""
        g = Graph(len(self.origin), 1, True)
        g.edges.update({(a, b): w for a, b, w in self.arcs()})
        return g

    def to_dict(self) -> dict:
        return {
            "cliques": [list(c) for c in self.cliques],
            "origin": self.origin,
            "arcs": [[a, b, w] for a, b, w in self.arcs()],
            "mode": self.mode,
        }


def build_chain(
    cliques: Sequence[Iterable[int]],
    g: Graph,
    mode: str | None = None,
    source_index: list[int] | None = None,
) -> RelabeledKPath:
    """Relabel a sequence of vertex sets whose consecutive members overlap.

    Arcs of ``g`` are replicated onto every label pair lying in the same or in
    adjacent cliques.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    sets = [tuple(sorted(c)) for c in cliques]
    origin: list[int] = []
    clique_of: list[int] = []
    labelled: list[tuple[int, ...]] = []
    where: list[dict[int, int]] = []
    for i, c in enumerate(sets):
        labels = []
        lookup = {}
        for v in c:
            lookup[v] = len(origin)
            labels.append(len(origin))
            origin.append(v)
            clique_of.append(i)
        labelled.append(tuple(labels))
        where.append(lookup)
    r = RelabeledKPath(
        labelled,
        origin,
        clique_of,
        [{} for _ in origin],
        mode,
        list(range(len(sets))) if source_index is None else source_index,
    )
    for i in range(len(sets) - 1):
        for v, a in where[i].items():
            b = where[i + 1].get(v)
            if b is not None:
                r.add_arc(a, b, 0)
                r.add_arc(b, a, 0)
    for i in range(len(sets)):
        near = [where[j] for j in (i - 1, i, i + 1) if 0 <= j < len(sets)]
        for v, a in where[i].items():
            out = g.successors(v)
            for lookup in near:
                for u, b in lookup.items():
                    w = out.get(u)
                    if w is not None:
                        r.add_arc(a, b, w)
    return r


def relabel_disjoint(
    d: KPathDecomposition, g: Graph, mode: str | None = None, duplicate: int | None = None
) -> RelabeledKPath:
    """Relabelled chain of ``d``; ``duplicate`` inserts a second copy of that clique after it."""
    cliques = list(d.cliques)
    source = list(range(len(cliques)))
    if duplicate is not None:
        cliques.insert(duplicate + 1, cliques[duplicate])
        source.insert(duplicate + 1, duplicate)
    return build_chain(cliques, g, mode, source)


def eliminate_spikes(r: RelabeledKPath, d: KPathDecomposition, g: Graph) -> RelabeledKPath:
    """Add u->v shortcuts for every u->w->v through a spike w, inside w's clique.

    Paths through a spike have exactly two arcs because spikes are pairwise
    non-adjacent and only see their attach clique.  Mutates and returns ``r``.
    """
    first = {}
    for idx, src in enumerate(r.source_index):
        first.setdefault(src, idx)
    for w, at in d.spikes:
        i = first[at]
        ins = g.predecessors(w)
        outs = g.successors(w)
        for u, wu in ins.items():
            for v, wv in outs.items():
                if u != v:
                    r.add_arc(r.label(i, u), r.label(i, v), wu + wv)
    return r


def lift_endpoint(x: int, role: str, d: KPathDecomposition, g: Graph) -> list[tuple[int, int]]:
    """Clique vertices standing in for a spike endpoint, with the connecting arc weight.

    role='source' gives the spike's out-neighbours, role='sink' its in-neighbours.
    An empty list means the query answer is immediate (unreachable).
    """
    if role == "source":
        nbrs = g.successors(x)
    elif role == "sink":
        nbrs = g.predecessors(x)
    else:
        raise ValueError(f"role must be 'source' or 'sink', got {role!r}")
    return sorted(nbrs.items())


def preprocess_kpath(
    g: Graph, d: KPathDecomposition | None = None, mode: str | None = None, duplicate: int | None = None
) -> RelabeledKPath:
    d = g.kpath if d is None else d
    if d is None:
        raise ValueError("graph carries no k-path decomposition")
    return eliminate_spikes(relabel_disjoint(d, g, mode, duplicate), d, g)
