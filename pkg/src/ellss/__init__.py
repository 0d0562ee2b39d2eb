"""Simulator and verification harness for eventually lattice-linear
self-stabilizing graph algorithms (dominating set, vertex cover, independent
set, coloring)."""

from .graph import (Graph, GraphError, ProblemKind, dump_graph,
                    generate_random_graph, load_graph, make_graph)
from .rules import IN, OUT, RemovableMode, RuleClass, StateVector
from .sim import DaemonKind, InitPolicy, RunConfig, Terminal, run, run_ensemble

__all__ = [
    "Graph", "GraphError", "ProblemKind", "dump_graph", "generate_random_graph",
    "load_graph", "make_graph", "IN", "OUT", "RemovableMode", "RuleClass",
    "StateVector", "DaemonKind", "InitPolicy", "RunConfig", "Terminal", "run",
    "run_ensemble",
]
