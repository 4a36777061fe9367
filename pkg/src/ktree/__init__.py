"""Reachability, extremal paths and perfect matchings in k-trees and k-paths."""

from .graph import (
    CliqueTree,
    ConstructionSequence,
    Graph,
    GraphError,
    KPathDecomposition,
    assign_weights,
    build_clique_tree,
    gen_kpath,
    gen_ktree,
    orient_acyclic,
    orient_random,
    validate_ktree,
)
from .matching import MatchingSolver, find_perfect_matching, has_perfect_matching
from .paths import (
    extremal_path,
    layer_decompose,
    longest_path_kpath,
    longest_path_ktree,
    shortest_path_kpath,
    shortest_path_ktree,
    undirected_distance,
)
from .reach import KPathReach, KTreeReach, reach_kpath, reach_ktree
from .separators import recursive_separators

__all__ = [
    "CliqueTree",
    "ConstructionSequence",
    "Graph",
    "GraphError",
    "KPathDecomposition",
    "KPathReach",
    "KTreeReach",
    "MatchingSolver",
    "assign_weights",
    "build_clique_tree",
    "extremal_path",
    "find_perfect_matching",
    "gen_kpath",
    "gen_ktree",
    "has_perfect_matching",
    "layer_decompose",
    "longest_path_kpath",
    "longest_path_ktree",
    "orient_acyclic",
    "orient_random",
    "reach_kpath",
    "reach_ktree",
    "recursive_separators",
    "shortest_path_kpath",
    "shortest_path_ktree",
    "undirected_distance",
    "validate_ktree",
]
