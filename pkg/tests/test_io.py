import json
import re

import pytest

from ktree.graph import GraphError, assign_weights, build_clique_tree, gen_kpath, gen_ktree, orient_acyclic
from ktree.io import clique_tree_to_dot, dumps_graph, graph_from_dict, graph_to_dict, load_graph, to_dot


def roundtrip(g):
    return graph_from_dict(json.loads(dumps_graph(g)))


def test_roundtrip_keeps_everything():
    graphs = [
        gen_ktree(3, 12, 1),
        gen_kpath(2, 6, 3, 2),
        assign_weights(orient_acyclic(gen_kpath(3, 8, 2, 5), 5), 5),
    ]
    for g in graphs:
        h = roundtrip(g)
        assert (h.n, h.k, h.directed, h.edges) == (g.n, g.k, g.directed, g.edges)
        assert h.construction == g.construction
        assert h.kpath == g.kpath


def test_report_wrapper_is_unwrapped():
    g = gen_ktree(2, 6, 0)
    wrapped = {"command": "gen", "parameters": {}, "result": graph_to_dict(g), "instrumentation": {}}
    assert graph_from_dict(wrapped).edges == g.edges


@pytest.mark.parametrize(
    "bad",
    [
        [],
        {"k": 1, "n": 2},
        {"k": 1, "n": 2, "edges": [[0]]},
        {"k": 1, "n": 2, "edges": [[0, 1], [1, 0]]},
        {"k": "1", "n": 2, "edges": []},
        {"k": 1, "n": 2, "edges": [[0, 5]]},
    ],
)
def test_malformed_graphs_rejected(bad):
    with pytest.raises(GraphError):
        graph_from_dict(bad)


def test_load_graph_reports_bad_json(tmp_path):
    p = tmp_path / "g.json"
    p.write_text("{nope")
    with pytest.raises(GraphError):
        load_graph(str(p))


def dot_is_wellformed(text):
    lines = text.strip().splitlines()
    if not re.match(r"^(di)?graph \w+ \{$", lines[0]) or lines[-1] != "}":
        return False
    stmt = re.compile(r'^  (n?\d+)( (--|->) n?\d+)?( \[[a-z]+="[^"]*"\]| \[shape=box\])?;$')
    return all(stmt.match(line) for line in lines[1:-1])


def test_dot_export():
    g = assign_weights(orient_acyclic(gen_kpath(2, 5, 2, 3), 3), 3)
    text = to_dot(g)
    assert dot_is_wellformed(text)
    assert text.count("->") == len(g.edges)
    u = gen_ktree(2, 7, 1)
    assert dot_is_wellformed(to_dot(u))
    ct = build_clique_tree(u)
    t = clique_tree_to_dot(ct)
    assert dot_is_wellformed(t)
    assert t.count("--") == len(ct.edges)
