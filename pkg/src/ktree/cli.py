"""Command-line front end.  Every command except export-dot prints a JSON RunReport."""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Any, Callable

from .graph import (
    Graph,
    GraphError,
    assign_weights,
    build_clique_tree,
    gen_kpath,
    gen_ktree,
    orient_acyclic,
    orient_random,
    validate_ktree,
)
from .io import clique_tree_to_dot, graph_from_dict, graph_to_dict, to_dot
from .matching import MatchingSolver
from .oracles import (
    bfs_distance,
    bfs_reach,
    dag_extremal_path,
    has_perfect_matching_brute,
    is_perfect_matching,
)
from .paths import (
    extremal_path,
    greedy_walk,
    layer_decompose,
    undirected_distance,
)
from .preprocess import preprocess_kpath
from .reach import KPathReach, KTreeReach
from .separators import (
    check_decomposition,
    decomposition_to_dict,
    depth,
    recursive_separators,
    tree_from_edges,
)

DEFAULT_WEIGHT_CAP = 256


class InputError(Exception):
    pass


def _read_json(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: malformed JSON ({e})") from None
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def _load_graph(path: str) -> Graph:
    return graph_from_dict(_read_json(path))


def _report(command: str, params: dict, result: dict, instr: dict) -> dict:
    return {"command": command, "parameters": params, "result": result, "instrumentation": instr}


def _check_vertex(g: Graph, v: int, what: str) -> None:
    if not 0 <= v < g.n:
        raise InputError(f"{what} {v} is not a vertex (n={g.n})")


# --- commands -----------------------------------------------------------------


def cmd_gen(a) -> tuple[dict, bool]:
    if a.kpath:
        m = a.m if a.m is not None else max(1, a.n - a.k)
        g = gen_kpath(a.k, m, a.spikes, a.seed)
    else:
        g = gen_ktree(a.k, a.n, a.seed)
    if a.orient == "acyclic":
        g = orient_acyclic(g, a.seed)
    elif a.orient == "random":
        g = orient_random(g, a.seed)
    if a.weights is not None:
        low, high = a.weights
        g = assign_weights(g, a.seed, low, high, a.weight_cap or None)
    params = {k: v for k, v in vars(a).items() if k not in ("func", "command", "exit_status")}
    return _report("gen", params, graph_to_dict(g), {}), True


def cmd_tg(a) -> tuple[dict, bool]:
    g = _load_graph(a.input)
    t0 = time.perf_counter()
    ct = build_clique_tree(g)
    result = {
        "k": ct.k,
        "nodes": [sorted(c) for c in ct.nodes],
        "edges": [list(e) for e in ct.edges],
        "isTree": ct.is_tree(),
        "validKTree": validate_ktree(g),
    }
    return _report("tg", {"input": a.input}, result, {"wallTime": time.perf_counter() - t0}), True


def cmd_preprocess(a) -> tuple[dict, bool]:
    g = _load_graph(a.input)
    if g.kpath is None:
        raise InputError("preprocess needs a graph with a k-path decomposition")
    t0 = time.perf_counter()
    r = preprocess_kpath(g, mode=a.mode)
    result = r.to_dict()
    instr = {"labels": len(r.origin), "cliques": r.m, "wallTime": time.perf_counter() - t0}
    return _report("preprocess", {"input": a.input, "mode": a.mode}, result, instr), True


def cmd_reach(a) -> tuple[dict, bool]:
    g = _load_graph(a.input)
    _check_vertex(g, a.source, "source")
    _check_vertex(g, a.target, "target")
    mode = a.mode or ("kpath" if g.kpath is not None else "ktree")
    memo = not a.strict_recursion
    t0 = time.perf_counter()
    if mode == "kpath":
        if g.kpath is None:
            raise InputError("--mode kpath needs a graph with a k-path decomposition")
        solver = KPathReach(g, memo)
        ok = solver.reach(a.source, a.target)
        violations = solver.depth_violations()
        calls = solver._plain.calls + sum(s.calls for s in solver._dups.values())
    else:
        solver = KTreeReach(g, memo=memo)
        ok = solver.reach(a.source, a.target)
        violations = solver.depth_violations
        calls = sum(s.calls for s in solver._solvers.values())
    result = {"reachable": ok, "recursionDepth": solver.last_depth}
    instr = {
        "mode": mode,
        "memo": memo,
        "calls": calls,
        "depthViolations": len(violations),
        "wallTime": time.perf_counter() - t0,
    }
    params = {"input": a.input, "source": a.source, "target": a.target, "mode": mode, "strictRecursion": a.strict_recursion}
    return _report("reach", params, result, instr), ok


def cmd_path(a) -> tuple[dict, bool]:
    g = _load_graph(a.input)
    _check_vertex(g, a.source, "source")
    _check_vertex(g, a.target, "target")
    params = {"input": a.input, "source": a.source, "target": a.target, "objective": a.objective, "checkArith": a.check_arith}
    t0 = time.perf_counter()
    if a.objective == "udist":
        if g.directed:
            raise InputError("udist needs an undirected graph")
        la = layer_decompose(g, a.target)
        d = undirected_distance(g, a.source, a.target, la=la)
        walk = greedy_walk(g, la, a.source, a.target) if a.source != a.target else [a.source]
        result = {"value": d, "method": "layer-greedy", "arithBits": 0, "walk": walk}
        instr = {"layers": max(la.layer.values()) + 1, "wallTime": time.perf_counter() - t0}
        return _report("path", params, result, instr), True
    if not g.directed:
        raise InputError(f"{a.objective} path needs a directed acyclic graph")
    if a.weight_cap and g.total_weight() > a.weight_cap:
        raise InputError(f"total weight {g.total_weight()} exceeds the cap {a.weight_cap}")
    mode = "max" if a.objective == "longest" else "min"
    res = extremal_path(g, a.source, a.target, mode, a.check_arith)
    d = res.to_dict()
    result = {"value": d["value"], "method": d["method"], "arithBits": d["arithBits"]}
    instr = {"formula": d["formula"], "r": d["r"], "m": d["m"], "arithValue": d["arithValue"], "wallTime": time.perf_counter() - t0}
    return _report("path", params, result, instr), res.value is not None


def cmd_match(a) -> tuple[dict, bool]:
    g = _load_graph(a.input)
    if g.directed:
        raise InputError("matching needs an undirected graph")
    t0 = time.perf_counter()
    s = MatchingSolver(g)
    ok = s.has_perfect_matching()
    result: dict[str, Any] = {"perfect": ok}
    if a.find:
        found = s.find()
        result["matching"] = [list(p) for p in found] if found is not None else None
    instr = {"cliqueTreeNodes": len(s.ct.nodes), "wallTime": time.perf_counter() - t0}
    return _report("match", {"input": a.input, "find": a.find}, result, instr), ok


def _tree_input(data: Any) -> tuple[dict[int, list[int]], int, str]:
    """Children map and root from a tree JSON, or from a graph's clique tree."""
    if not isinstance(data, dict):
        raise InputError("tree JSON must be an object")
    if "children" in data:
        root = data.get("root", 0)
        try:
            children = {int(x): [int(c) for c in cs] for x, cs in data["children"].items()}
        except (TypeError, ValueError, AttributeError):
            raise InputError("children must map node ids to lists of node ids") from None
        return children, int(root), "tree"
    if "edges" in data and "k" not in data:
        root = int(data.get("root", 0))
        return tree_from_edges([tuple(e) for e in data["edges"]], root), root, "tree"
    g = graph_from_dict(data)
    ct = build_clique_tree(g)
    _, kids, _ = ct.rooted(0)
    return {x: cs for x, cs in enumerate(kids)}, 0, "clique-tree"


def _check_tree(children: dict[int, list[int]], root: int) -> None:
    seen = {root}
    stack = [root]
    while stack:
        for c in children.get(stack.pop(), []):
            if c in seen:
                raise InputError(f"node {c} is reached twice; input is not a tree")
            seen.add(c)
            stack.append(c)


def cmd_separators(a) -> tuple[dict, bool]:
    children, root, source = _tree_input(_read_json(a.input))
    _check_tree(children, root)
    t0 = time.perf_counter()
    d = recursive_separators(children, root)
    problems = check_decomposition(d, children)
    result = {"source": source, "decomposition": decomposition_to_dict(d), "leaves": d.leaves, "depth": depth(d), "problems": problems}
    return _report("separators", {"input": a.input}, result, {"wallTime": time.perf_counter() - t0}), not problems


# --- verify -------------------------------------------------------------------


def _verify_instance(seed: int, kmax: int, nmax: int, tally: dict) -> None:
    rng = random.Random(seed)

    def record(name: str, ok: bool) -> None:
        row = tally.setdefault(name, [0, 0])
        row[0 if ok else 1] += 1

    k = rng.randint(1, min(kmax, 3))
    m = rng.randint(1, max(1, nmax - k))
    kp = gen_kpath(k, m, rng.randint(0, m), seed)
    g = orient_random(kp, seed)
    r = KPathReach(g)
    record("reach-kpath", all(r.reach(s, t) == bfs_reach(g, s, t) for s in range(g.n) for t in range(g.n)))
    record("reach-depth", not r.depth_violations())

    k = rng.randint(1, kmax)
    n = rng.randint(k, max(k, nmax))
    kt = gen_ktree(k, n, seed)
    g = orient_random(kt, seed)
    r = KTreeReach(g)
    record("reach-ktree", all(r.reach(s, t) == bfs_reach(g, s, t) for s in range(g.n) for t in range(g.n)))

    for name, base in (("kpath", kp), ("ktree", kt)):
        if base.k > 3 or len(base.edges) > DEFAULT_WEIGHT_CAP:
            continue
        dag = assign_weights(orient_acyclic(base, seed), seed)
        pairs = [(rng.randrange(dag.n), rng.randrange(dag.n)) for _ in range(3)]
        for mode in ("max", "min"):
            ok = all(extremal_path(dag, s, t, mode).value == dag_extremal_path(dag, s, t, mode) for s, t in pairs)
            record(f"{'longest' if mode == 'max' else 'shortest'}-{name}", ok)

    ok = True
    for t in range(kt.n):
        la = layer_decompose(kt, t)
        for s in range(kt.n):
            walk = greedy_walk(kt, la, s, t) if s != t else [s]
            layers = [la.layer[v] for v in walk[:-1]]
            ok &= undirected_distance(kt, s, t, la=la) == bfs_distance(kt, s, t)
            ok &= all(x > y for x, y in zip(layers, layers[1:]))
    record("udist", ok)

    if kt.n <= 14:
        s = MatchingSolver(kt)
        truth = has_perfect_matching_brute(kt)
        found = s.find()
        good = s.has_perfect_matching() == truth and (found is not None) == truth
        record("matching", good and (found is None or is_perfect_matching(kt, found)))

    ct = build_clique_tree(kt)
    _, kids, _ = ct.rooted(0)
    children = {x: cs for x, cs in enumerate(kids)}
    record("separators", not check_decomposition(recursive_separators(children, 0), children))


def cmd_verify(a) -> tuple[dict, bool]:
    t0 = time.perf_counter()
    tally: dict[str, list[int]] = {}
    for seed in range(a.seed, a.seed + a.seeds):
        _verify_instance(seed, a.kmax, a.nmax, tally)
    rows = [{"check": name, "pass": p, "fail": f} for name, (p, f) in sorted(tally.items())]
    ok = all(r["fail"] == 0 for r in rows)
    width = max((len(r["check"]) for r in rows), default=5)
    print(f"{'check':<{width}}  {'pass':>6}  {'fail':>6}  status", file=sys.stderr)
    for r in rows:
        status = "PASS" if r["fail"] == 0 else "FAIL"
        print(f"{r['check']:<{width}}  {r['pass']:>6}  {r['fail']:>6}  {status}", file=sys.stderr)
    params = {"seeds": a.seeds, "firstSeed": a.seed, "kmax": a.kmax, "nmax": a.nmax}
    return _report("verify", params, {"allPass": ok, "table": rows}, {"wallTime": time.perf_counter() - t0}), ok


def cmd_export_dot(a) -> None:
    g = _load_graph(a.input)
    if a.what == "graph":
        sys.stdout.write(to_dot(g))
    else:
        sys.stdout.write(clique_tree_to_dot(build_clique_tree(g)))


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ktree", description=__doc__)
    p.add_argument("--exit-status", action="store_true", help="exit 1 when a query answers negatively")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        return sp

    def query(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--input", required=True, help="graph JSON file, or - for stdin")
        sp.add_argument("--source", type=int, required=True)
        sp.add_argument("--target", type=int, required=True)

    sp = add("gen", cmd_gen, "generate a random k-tree or k-path")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, default=10, help="vertices (k-tree)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--kpath", action="store_true", help="generate a k-path instead")
    sp.add_argument("--m", type=int, help="cliques of the k-path (default n-k)")
    sp.add_argument("--spikes", type=int, default=0)
    sp.add_argument("--orient", choices=("none", "acyclic", "random"), default="none")
    sp.add_argument("--weights", type=int, nargs=2, metavar=("LOW", "HIGH"))
    sp.add_argument("--weight-cap", type=int, default=DEFAULT_WEIGHT_CAP, help="0 disables the cap")

    sp = add("tg", cmd_tg, "clique tree T(G) of a k-tree")
    sp.add_argument("--input", required=True)

    sp = add("preprocess", cmd_preprocess, "relabelled chain of a k-path")
    sp.add_argument("--input", required=True)
    sp.add_argument("--mode", choices=("max", "min"), default=None, help="how parallel arcs combine weights")

    sp = add("reach", cmd_reach, "directed reachability")
    query(sp)
    sp.add_argument("--mode", choices=("kpath", "ktree"), default=None)
    sp.add_argument("--strict-recursion", action="store_true", help="disable memoization")

    sp = add("path", cmd_path, "longest/shortest path in a DAG, or undirected distance")
    query(sp)
    sp.add_argument("--objective", choices=("longest", "shortest", "udist"), default="longest")
    sp.add_argument("--check-arith", action="store_true", help="cross-check through the big-integer tree")
    sp.add_argument("--weight-cap", type=int, default=DEFAULT_WEIGHT_CAP, help="0 disables the cap")

    sp = add("match", cmd_match, "perfect matching decision")
    sp.add_argument("--input", required=True)
    sp.add_argument("--find", action="store_true", help="also emit the matching")

    sp = add("separators", cmd_separators, "recursive separator decomposition of a tree")
    sp.add_argument("--input", required=True, help="{root, children} or {root, edges} tree JSON, or a graph")

    sp = add("verify", cmd_verify, "cross-check every algorithm against the oracles")
    sp.add_argument("--seeds", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0, help="first seed")
    sp.add_argument("--kmax", type=int, default=3)
    sp.add_argument("--nmax", type=int, default=20)

    sp = add("export-dot", cmd_export_dot, "DOT text of a graph or its clique tree")
    sp.add_argument("--input", required=True)
    sp.add_argument("--what", choices=("graph", "tree"), default="graph")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        out = a.func(a)
    except (InputError, GraphError, ValueError, KeyError, TypeError) as e:
        print(f"ktree {a.command}: error: {e}", file=sys.stderr)
        return 2
    if out is None:
        return 0
    report, ok = out
    json.dump(report, sys.stdout)
    sys.stdout.write("\n")
    return 1 if a.exit_status and not ok else 0


if __name__ == "__main__":
    sys.exit(main())
