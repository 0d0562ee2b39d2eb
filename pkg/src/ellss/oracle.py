"""Ground-truth predicates and brute-force verifiers.

The feasibility/optimality predicates here are written against whole sets
(bitmask unions of services, edge scans) rather than the per-node macros of
:mod:`ellss.rules`, so the two can be cross-checked. Everything that needs
enumeration is guarded by an explicit size limit and raises
:class:`OracleSizeError` instead of approximating.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from .graph import Graph, ProblemKind
from .rules import (IN, OUT, RemovableMode, RuleClass, StateVector,
                    apply_rule, enabled_rules, fresh_view, rule_system)

ENUMERATION_LIMIT = 22
SET_OPTIMA_LIMIT = 16
GC_OPTIMA_LIMIT = 8
SET_EXPLORE_LIMIT = 10
GC_EXPLORE_LIMIT = 6


class OracleSizeError(ValueError):
    pass


def _feasible_members(kind: ProblemKind, members: frozenset, g: Graph) -> bool:
    if kind is ProblemKind.SDDS:
        for i in range(g.n):
            if i in members:
                continue
            covered = 0
            for j in g.adj[i]:
                if j in members:
                    covered |= g.services[j]
            if g.demands[i] & ~covered:
                return False
        return True
    if kind is ProblemKind.VC:
        return all(i in members or j in members for i, j in g.edges)
    if kind is ProblemKind.IS:
        return not any(i in members and j in members for i, j in g.edges)
    raise ValueError(f"{kind} is not a set problem")


def _proper(colors, g: Graph) -> bool:
    return all(colors[i] != colors[j] for i, j in g.edges)


def feasible(state: StateVector, graph: Graph) -> bool:
    """P' for the state's problem: dominating set, cover, independence, proper coloring."""
    if state.kind is ProblemKind.GC:
        return _proper(state.values, graph)
    return _feasible_members(state.kind, state.members(), graph)


def optimal(state: StateVector, graph: Graph) -> bool:
    """P for the state's problem (minimal, maximal, or Grundy-like coloring)."""
    kind = state.kind
    if kind is ProblemKind.GC:
        colors = state.values
        if not _proper(colors, graph):
            return False
        for i in range(graph.n):
            used = {colors[j] for j in graph.adj[i]}
            for c in range(1, graph.degree(i) + 2):
                if c < colors[i] and c not in used:
                    return False
        return True
    members = state.members()
    if not _feasible_members(kind, members, graph):
        return False
    if kind is ProblemKind.IS:
        return all(not _feasible_members(kind, members | {i}, graph)
                   for i in range(graph.n) if i not in members)
    return all(not _feasible_members(kind, members - {i}, graph) for i in members)


def _check_set_kind(state):
    if state.kind not in (ProblemKind.SDDS, ProblemKind.VC):
        raise ValueError("RANK/BADNESS are defined for SDDS and VC")


def rank(state: StateVector, graph: Graph) -> int:
    """Fewest nodes that must join the set to make it feasible."""
    _check_set_kind(state)
    members = state.members()
    outside = [i for i in range(graph.n) if i not in members]
    if len(outside) > ENUMERATION_LIMIT:
        raise OracleSizeError(f"{len(outside)} candidate nodes exceed the rank limit")
    for size in range(len(outside) + 1):
        for extra in itertools.combinations(outside, size):
            if _feasible_members(state.kind, members.union(extra), graph):
                return size
    raise AssertionError("the full vertex set is always feasible")


def badness(state: StateVector, graph: Graph) -> int:
    """Most nodes that can leave the set while it stays feasible."""
    _check_set_kind(state)
    members = state.members()
    if len(members) > ENUMERATION_LIMIT:
        raise OracleSizeError(f"{len(members)} members exceed the badness limit")
    if not _feasible_members(state.kind, members, graph):
        raise ValueError("badness is only defined for feasible states")
    inside = sorted(members)
    for size in range(len(inside), -1, -1):
        for gone in itertools.combinations(inside, size):
            if _feasible_members(state.kind, members.difference(gone), graph):
                return size
    return 0


def enumerate_optima(kind: ProblemKind, graph: Graph) -> set[StateVector]:
    if kind is ProblemKind.GC:
        if graph.n > GC_OPTIMA_LIMIT:
            raise OracleSizeError(f"n={graph.n} exceeds the coloring limit")
        palettes = [range(1, graph.degree(i) + 2) for i in range(graph.n)]
        candidates = (StateVector(kind, c) for c in itertools.product(*palettes))
    else:
        if graph.n > SET_OPTIMA_LIMIT:
            raise OracleSizeError(f"n={graph.n} exceeds the set limit")
        candidates = (StateVector(kind, v)
                      for v in itertools.product((OUT, IN), repeat=graph.n))
    return {s for s in candidates if optimal(s, graph)}


def all_states(kind: ProblemKind, graph: Graph):
    """Every binary state, or every coloring within the deg+1 palettes."""
    if kind is ProblemKind.GC:
        palettes = [range(1, graph.degree(i) + 2) for i in range(graph.n)]
        return (StateVector(kind, c) for c in itertools.product(*palettes))
    return (StateVector(kind, v) for v in itertools.product((OUT, IN), repeat=graph.n))


@dataclass
class OracleReport:
    feasible: bool
    optimal: bool
    rank: int | None
    badness: int | None
    witness: list | None = None

    def to_dict(self) -> dict:
        return {"feasible": self.feasible, "optimal": self.optimal,
                "rank": self.rank, "badness": self.badness,
                "witness": self.witness}


def report(state: StateVector, graph: Graph) -> OracleReport:
    """Evaluate every oracle that applies; exact scores are None past the limits."""
    is_feasible = feasible(state, graph)
    is_optimal = optimal(state, graph)
    r = b = None
    witness = None
    if state.kind in (ProblemKind.SDDS, ProblemKind.VC):
        try:
            r = rank(state, graph)
        except OracleSizeError:
            pass
        if is_feasible:
            try:
                b = badness(state, graph)
            except OracleSizeError:
                pass
    if not is_feasible:
        witness = sorted(graph.ids[i] for i in _violators(state, graph))
    elif not is_optimal:
        witness = sorted(graph.ids[i] for i in _improvable(state, graph))
    return OracleReport(is_feasible, is_optimal, r, b, witness)


def _violators(state, g):
    kind = state.kind
    if kind is ProblemKind.GC:
        return {i for i, j in g.edges if state.values[i] == state.values[j]}
    members = state.members()
    if kind is ProblemKind.SDDS:
        out = set()
        for i in range(g.n):
            covered = 0
            for j in g.adj[i]:
                if j in members:
                    covered |= g.services[j]
            if i not in members and g.demands[i] & ~covered:
                out.add(i)
        return out
    if kind is ProblemKind.VC:
        return {i for i, j in g.edges if i not in members and j not in members}
    return {i for i, j in g.edges if i in members and j in members}


def _improvable(state, g):
    kind = state.kind
    if kind is ProblemKind.GC:
        out = set()
        for i in range(g.n):
            used = {state.values[j] for j in g.adj[i]}
            if any(c < state.values[i] and c not in used
                   for c in range(1, g.degree(i) + 2)):
                out.add(i)
        return out
    members = state.members()
    if kind is ProblemKind.IS:
        return {i for i in range(g.n) if i not in members
                and _feasible_members(kind, members | {i}, g)}
    return {i for i in members if _feasible_members(kind, members - {i}, g)}


# -- exhaustive exploration -------------------------------------------------


@lru_cache(maxsize=1 << 16)
def _moves(kind: ProblemKind, graph: Graph, values: tuple, classes: frozenset,
           mode: RemovableMode) -> tuple:
    """(node, rule name, rule class, successor values) for every single firing."""
    system = rule_system(kind)
    state = StateVector(kind, values)
    out = []
    for i in range(graph.n):
        for name in enabled_rules(system, fresh_view(state, i), graph, mode):
            cls = system.rule(name).rule_class
            if cls in classes:
                nxt = apply_rule(system, state, i, name, graph)
                out.append((i, name, cls, nxt.values))
    return tuple(out)


@dataclass
class ExplorationResult:
    states_visited: int
    terminal_states: set
    all_terminals_optimal: bool
    max_path_moves: int | None
    forbidden_in_every_nonoptimal_feasible: bool
    necessity_holds: bool
    has_cycle: bool = False
    witness: dict | None = field(default=None)

    def to_dict(self, graph: Graph) -> dict:
        def show(values):
            if isinstance(values[0], int):
                return list(values)
            return sorted(graph.ids[i] for i, v in enumerate(values) if v == IN)

        return {
            "states_visited": self.states_visited,
            "terminal_states": sorted(show(s.values) for s in self.terminal_states),
            "all_terminals_optimal": self.all_terminals_optimal,
            "max_path_moves": self.max_path_moves,
            "forbidden_in_every_nonoptimal_feasible":
                self.forbidden_in_every_nonoptimal_feasible,
            "necessity_holds": self.necessity_holds,
            "has_cycle": self.has_cycle,
            "witness": self.witness,
        }


def _parse_filter(rule_filter) -> frozenset:
    out = set()
    for item in rule_filter:
        out.add(item if isinstance(item, RuleClass) else RuleClass(item))
    return frozenset(out)


def explore_transition_system(start: StateVector, graph: Graph,
                              rule_filter=("F1", "F2"),
                              mode: RemovableMode = RemovableMode.SELF_AWARE
                              ) -> ExplorationResult:
    """Explore every single-node firing sequence from ``start``.

    Besides the terminal states, this checks two lattice-linearity facts on
    every visited state: a feasible non-optimal state has some node whose
    F2 rule is enabled, and a node enabled for F2 at state X holds a
    different value in every terminal reachable from X.
    """
    kind = start.kind
    classes = _parse_filter(rule_filter)
    if kind is ProblemKind.GC:
        if graph.n > GC_EXPLORE_LIMIT:
            raise OracleSizeError(f"n={graph.n} exceeds the coloring exploration limit")
        if not feasible(start, graph):
            raise ValueError("coloring exploration must start conflict-free")
        if any(c > graph.degree(i) + 1 for i, c in enumerate(start.values)):
            raise ValueError("coloring exploration start exceeds the deg+1 palette")
    elif graph.n > SET_EXPLORE_LIMIT:
        raise OracleSizeError(f"n={graph.n} exceeds the set exploration limit")

    succ: dict[tuple, tuple] = {}
    queue = deque([start.values])
    succ_seen = {start.values}
    while queue:
        values = queue.popleft()
        moves = _moves(kind, graph, values, classes, mode)
        succ[values] = moves
        for _, _, _, nxt in moves:
            if nxt not in succ_seen:
                succ_seen.add(nxt)
                queue.append(nxt)

    terminals = {v for v, m in succ.items() if not m}
    reach, longest, has_cycle = _terminal_reach(succ, terminals)

    witness = None
    all_opt = True
    for t in sorted(terminals, key=str):
        if not optimal(StateVector(kind, t), graph):
            all_opt = False
            witness = witness or {"nonoptimal_terminal": list(t)}

    forbidden_ok = True
    necessity_ok = True
    for values, moves in succ.items():
        state = StateVector(kind, values)
        f2_nodes = {i for i, _, cls, _ in moves if cls is RuleClass.F2_LATTICE}
        if RuleClass.F2_LATTICE in classes and feasible(state, graph) \
                and not optimal(state, graph) and not f2_nodes:
            forbidden_ok = False
            witness = witness or {"no_forbidden_node": list(values)}
        for i in f2_nodes:
            for t in reach[values]:
                if t[i] == values[i]:
                    necessity_ok = False
                    witness = witness or {"retained_forbidden": [graph.ids[i], list(values), list(t)]}

    return ExplorationResult(
        states_visited=len(succ),
        terminal_states={StateVector(kind, t) for t in terminals},
        all_terminals_optimal=all_opt,
        max_path_moves=None if has_cycle else longest[start.values],
        forbidden_in_every_nonoptimal_feasible=forbidden_ok,
        necessity_holds=necessity_ok,
        has_cycle=has_cycle,
        witness=witness,
    )


def _terminal_reach(succ, terminals):
    """Terminals reachable from each state, longest path, and a cycle flag."""
    reach: dict = {}
    longest: dict = {}
    on_stack: set = set()
    has_cycle = False
    for root in succ:
        if root in reach:
            continue
        stack = [(root, iter(succ[root]))]
        on_stack.add(root)
        while stack:
            node, it = stack[-1]
            advanced = False
            for _, _, _, nxt in it:
                if nxt in on_stack:
                    has_cycle = True
                    continue
                if nxt not in reach:
                    stack.append((nxt, iter(succ[nxt])))
                    on_stack.add(nxt)
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            on_stack.discard(node)
            r = {node} if node in terminals else set()
            depth = 0
            for _, _, _, nxt in succ[node]:
                if nxt in reach:
                    r |= reach[nxt]
                    depth = max(depth, longest[nxt] + 1)
            reach[node] = frozenset(r)
            longest[node] = depth
    if has_cycle:
        # Memoized sets are unreliable around cycles; recompute by plain search.
        for root in succ:
            seen = {root}
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for _, _, _, v in succ[u]:
                    if v not in seen:
                        seen.add(v)
                        queue.append(v)
            reach[root] = frozenset(seen & terminals)
    return reach, longest, has_cycle
