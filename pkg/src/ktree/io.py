"""JSON graph format and DOT export."""

from __future__ import annotations

import json
from typing import Any

from .graph import ConstructionSequence, Graph, GraphError, KPathDecomposition


def graph_to_dict(g: Graph) -> dict[str, Any]:
    out: dict[str, Any] = {
        "k": g.k,
        "directed": g.directed,
        "n": g.n,
        "edges": [[a, b, w] for (a, b), w in sorted(g.edges.items())],
    }
    if g.construction is not None:
        out["construction"] = {
            "base": list(g.construction.base),
            "steps": [{"v": v, "support": list(s)} for v, s in g.construction.steps],
        }
    if g.kpath is not None:
        out["kpath"] = {
            "cliques": [list(c) for c in g.kpath.cliques],
            "spikes": [{"v": v, "at": at} for v, at in g.kpath.spikes],
        }
    return out


def _int(x, what):
    if isinstance(x, bool) or not isinstance(x, int):
        raise GraphError(f"{what} must be an integer, got {x!r}")
    return x


def graph_from_dict(d: Any) -> Graph:
    """Parse the JSON graph object; a RunReport wrapping a graph is unwrapped."""
    if not isinstance(d, dict):
        raise GraphError("graph JSON must be an object")
    if "edges" not in d and isinstance(d.get("result"), dict):
        d = d["result"]
        if "graph" in d:
            d = d["graph"]
    try:
        k = _int(d["k"], "k")
        n = _int(d["n"], "n")
        directed = bool(d.get("directed", False))
        raw = d["edges"]
    except KeyError as e:
        raise GraphError(f"graph JSON missing field {e}") from None
    edges: dict[tuple[int, int], int] = {}
    for item in raw:
        if not isinstance(item, (list, tuple)) or len(item) not in (2, 3):
            raise GraphError(f"bad edge entry {item!r}")
        a, b = _int(item[0], "tail"), _int(item[1], "head")
        w = _int(item[2], "weight") if len(item) == 3 else 1
        if not directed and a > b:
            a, b = b, a
        if (a, b) in edges:
            raise GraphError(f"duplicate edge {a}-{b}")
        edges[(a, b)] = w
    construction = None
    if d.get("construction") is not None:
        c = d["construction"]
        construction = ConstructionSequence(
            tuple(_int(x, "base vertex") for x in c["base"]),
            tuple((_int(s["v"], "v"), tuple(s["support"])) for s in c["steps"]),
        )
    kpath = None
    if d.get("kpath") is not None:
        p = d["kpath"]
        kpath = KPathDecomposition(
            tuple(tuple(c) for c in p["cliques"]),
            tuple((_int(s["v"], "v"), _int(s["at"], "at")) for s in p.get("spikes", [])),
        )
    return Graph(n, k, directed, edges, construction, kpath)


def load_graph(path: str) -> Graph:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise GraphError(f"{path}: malformed JSON ({e})") from None
    return graph_from_dict(data)


def dumps_graph(g: Graph) -> str:
    return json.dumps(graph_to_dict(g))


def to_dot(g: Graph, name: str = "G") -> str:
    """DOT text; weights other than 1 become edge labels."""
    kind, arrow = ("digraph", "->") if g.directed else ("graph", "--")
    lines = [f"{kind} {name} {{"]
    spikes = g.kpath.spike_at() if g.kpath is not None else {}
    for v in range(g.n):
        attr = ' [shape=box]' if v in spikes else ""
        lines.append(f"  {v}{attr};")
    for (a, b), w in sorted(g.edges.items()):
        label = f' [label="{w}"]' if w != 1 else ""
        lines.append(f"  {a} {arrow} {b}{label};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def clique_tree_to_dot(ct, name: str = "T") -> str:
    lines = [f"graph {name} {{"]
    for i, node in enumerate(ct.nodes):
        label = ",".join(map(str, sorted(node)))
        lines.append(f'  n{i} [label="{{{label}}}"];')
    for a, b in ct.edges:
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
