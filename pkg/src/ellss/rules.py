"""Guarded rules for the four ELLSS algorithms (SDDS, VC, IS, GC).

Every guard is a pure function of a node's view: a mapping from node index to
the public value (``"IN"``/``"OUT"`` or a color) that the node last read for
that neighbor. Guards are written as literal nested loops that follow the
macro definitions, so they can be compared line by line against the
set-based predicates in :mod:`ellss.oracle`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

from .graph import Graph, ProblemKind

IN = "IN"
OUT = "OUT"

Snapshot = Union[Mapping[int, object], Sequence[object]]


class RuleContractError(RuntimeError):
    """An action was fired whose precondition cannot hold."""


class RuleClass(enum.Enum):
    F2_LATTICE = "F2"
    F1_CORRECTION = "F1"


class RemovableMode(enum.Enum):
    FAITHFUL = "faithful"
    SELF_AWARE = "self-aware"


@dataclass(frozen=True)
class StateVector:
    kind: ProblemKind
    values: tuple

    def __post_init__(self):
        if self.kind.binary:
            if any(v not in (IN, OUT) for v in self.values):
                raise ValueError("binary states hold only IN/OUT")
        elif any(not isinstance(v, int) or v < 1 for v in self.values):
            raise ValueError("colors must be positive integers")

    @property
    def status(self) -> tuple:
        if not self.kind.binary:
            raise AttributeError("coloring states have no status")
        return self.values

    @property
    def color(self) -> tuple:
        if self.kind.binary:
            raise AttributeError("set states have no color")
        return self.values

    def members(self) -> frozenset[int]:
        """Indices of IN nodes (the dominating set, cover, or independent set)."""
        return frozenset(i for i, v in enumerate(self.values) if v == IN)

    def member_ids(self, graph: Graph) -> frozenset[int]:
        return frozenset(graph.ids[i] for i in self.members())

    def replace(self, i: int, value) -> "StateVector":
        values = list(self.values)
        values[i] = value
        return StateVector(self.kind, tuple(values))

    @classmethod
    def from_members(cls, kind: ProblemKind, n: int, members) -> "StateVector":
        members = set(members)
        return cls(kind, tuple(IN if i in members else OUT for i in range(n)))


@dataclass(frozen=True)
class NodeView:
    """What ``node`` believes the public variables around it are."""

    node: int
    snapshot: Snapshot

    def __getitem__(self, j):
        return self.snapshot[j]


def fresh_view(state: StateVector, i: int) -> NodeView:
    return NodeView(i, state.values)


# -- SDDS ------------------------------------------------------------------


def _satisfied(s, g: Graph, i: int) -> bool:
    if s[i] == IN:
        return True
    for d in g.demand_labels(i):
        if not any(g.serves(j, d) and s[j] == IN for j in g.adj[i]):
            return False
    return True


def _removable(s, g: Graph, i: int, mode: RemovableMode) -> bool:
    for d in g.demand_labels(i):
        if not any(g.serves(j, d) and s[j] == IN for j in g.adj[i]):
            return False
    for j in g.adj[i]:
        # An IN neighbor dominates itself and does not need i.
        if mode is RemovableMode.SELF_AWARE and s[j] == IN:
            continue
        for d in g.demand_labels(j):
            if not g.serves(i, d):
                continue
            if not any(k != i and g.serves(k, d) and s[k] == IN for k in g.adj[j]):
                return False
    return True


def _dominators(s, g: Graph, j: int) -> set[int]:
    doms = {k for k in g.adj[j] if s[k] == IN and g.demands[j] & g.services[k]}
    if s[j] == IN:
        doms.add(j)
    return doms


def _forbidden_sdds(s, g: Graph, i: int, mode: RemovableMode) -> bool:
    if s[i] != IN or not _removable(s, g, i, mode):
        return False
    ids = g.ids
    self_aware = mode is RemovableMode.SELF_AWARE
    for j in g.adj[i]:
        for d in g.demand_labels(j):
            if not g.serves(i, d):
                continue
            for k in _dominators(s, g, j):
                if k == i or s[k] != IN:
                    continue
                # Under SELF_AWARE an IN j counts as dominating itself for d.
                if not (g.serves(k, d) or (self_aware and k == j)):
                    continue
                if not (ids[k] < ids[i] or not _removable(s, g, k, mode)):
                    return False
    if self_aware:
        # Symmetric half: an IN neighbor that serves one of i's demands.
        for j in g.adj[i]:
            if s[j] == IN and g.services[j] & g.demands[i]:
                if not (ids[j] < ids[i] or not _removable(s, g, j, mode)):
                    return False
    return True


def satisfied_sdds(view: NodeView, graph: Graph) -> bool:
    return _satisfied(view.snapshot, graph, view.node)


def removable_sdds(view: NodeView, graph: Graph,
                   mode: RemovableMode = RemovableMode.SELF_AWARE) -> bool:
    return _removable(view.snapshot, graph, view.node, mode)


def dominators_of(view: NodeView, graph: Graph, j: int) -> set[int]:
    """Indices of IN nodes that (possibly) dominate ``j``, ``j`` itself if IN."""
    return _dominators(view.snapshot, graph, j)


def forbidden_sdds(view: NodeView, graph: Graph,
                   mode: RemovableMode = RemovableMode.SELF_AWARE) -> bool:
    return _forbidden_sdds(view.snapshot, graph, view.node, mode)


# -- VC --------------------------------------------------------------------


def _removable_vc(s, g, i):
    return all(s[j] == IN for j in g.adj[i])


def _unsatisfied_vc(s, g, i, mode=None):
    return s[i] == OUT and any(s[j] == OUT for j in g.adj[i])


def _forbidden_vc(s, g, i, mode=None):
    return (s[i] == IN and _removable_vc(s, g, i)
            and all(g.ids[j] < g.ids[i] or not _removable_vc(s, g, j)
                    for j in g.adj[i]))


def vc_macros(view: NodeView, graph: Graph) -> dict[str, bool]:
    s, i = view.snapshot, view.node
    return {
        "removable": _removable_vc(s, graph, i),
        "unsatisfied": _unsatisfied_vc(s, graph, i),
        "forbidden": _forbidden_vc(s, graph, i),
    }


# -- IS --------------------------------------------------------------------


def _addable(s, g, i):
    return all(s[j] == OUT for j in g.adj[i])


def _unsatisfied_is(s, g, i, mode=None):
    return s[i] == IN and any(s[j] == IN for j in g.adj[i])


def _forbidden_is(s, g, i, mode=None):
    return (s[i] == OUT and _addable(s, g, i)
            and all(g.ids[j] < g.ids[i] or not _addable(s, g, j)
                    for j in g.adj[i]))


def is_macros(view: NodeView, graph: Graph) -> dict[str, bool]:
    s, i = view.snapshot, view.node
    return {
        "addable": _addable(s, graph, i),
        "unsatisfied": _unsatisfied_is(s, graph, i),
        "forbidden": _forbidden_is(s, graph, i),
    }


# -- GC --------------------------------------------------------------------


def _conflicted(s, g, i, mode=None):
    return any(s[j] == s[i] for j in g.adj[i])


def _subtractable(s, g, i):
    for c in range(1, g.degree(i) + 2):
        if c < s[i] and all(s[j] != c for j in g.adj[i]):
            return True
    return False


def _forbidden_gc(s, g, i, mode=None):
    return (not _conflicted(s, g, i) and _subtractable(s, g, i)
            and all(g.ids[j] < g.ids[i] or not _subtractable(s, g, j)
                    for j in g.adj[i]))


def gc_macros(view: NodeView, graph: Graph) -> dict[str, bool]:
    s, i = view.snapshot, view.node
    return {
        "conflicted": _conflicted(s, graph, i),
        "subtractable": _subtractable(s, graph, i),
        "unsatisfied": _conflicted(s, graph, i),
        "forbidden": _forbidden_gc(s, graph, i),
    }


def _lowest_free_color(s, g, i):
    for c in range(1, g.degree(i) + 2):
        if all(s[j] != c for j in g.adj[i]):
            return c
    raise RuleContractError(
        f"node {g.ids[i]} has no free color in [1:{g.degree(i) + 1}]")


# -- rule tables -----------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    name: str
    rule_class: RuleClass
    guard: Callable[..., bool]
    action: Callable[..., object]


@dataclass(frozen=True)
class RuleSystem:
    kind: ProblemKind
    rules: tuple[Rule, ...]
    # Hops a guard reads; SDDS evaluates Removable-DS of distance-2 nodes.
    radius: int

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)


def _set(value):
    return lambda s, g, i: value


_SYSTEMS = {
    ProblemKind.SDDS: RuleSystem(ProblemKind.SDDS, (
        Rule("Forbidden-DS", RuleClass.F2_LATTICE, _forbidden_sdds, _set(OUT)),
        Rule("Unsatisfied-DS", RuleClass.F1_CORRECTION,
             lambda s, g, i, mode=None: not _satisfied(s, g, i), _set(IN)),
    ), radius=4),
    ProblemKind.VC: RuleSystem(ProblemKind.VC, (
        Rule("Forbidden-VC", RuleClass.F2_LATTICE, _forbidden_vc, _set(OUT)),
        Rule("Unsatisfied-VC", RuleClass.F1_CORRECTION, _unsatisfied_vc, _set(IN)),
    ), radius=2),
    ProblemKind.IS: RuleSystem(ProblemKind.IS, (
        Rule("Forbidden-IS", RuleClass.F2_LATTICE, _forbidden_is, _set(IN)),
        Rule("Unsatisfied-IS", RuleClass.F1_CORRECTION, _unsatisfied_is, _set(OUT)),
    ), radius=2),
    ProblemKind.GC: RuleSystem(ProblemKind.GC, (
        Rule("Forbidden-GC", RuleClass.F2_LATTICE, _forbidden_gc, _lowest_free_color),
        Rule("Unsatisfied-GC", RuleClass.F1_CORRECTION, _conflicted,
             lambda s, g, i: s[i] + g.ids[i]),
    ), radius=2),
}


def rule_system(kind: ProblemKind) -> RuleSystem:
    return _SYSTEMS[kind]


def enabled_rules(system: RuleSystem, view: NodeView, graph: Graph,
                  mode: RemovableMode = RemovableMode.SELF_AWARE) -> list[str]:
    s, i = view.snapshot, view.node
    return [r.name for r in system.rules if r.guard(s, graph, i, mode)]


def apply_rule(system: RuleSystem, state: StateVector, i: int, rule_id: str,
               graph: Graph, view: NodeView | None = None) -> StateVector:
    """Fire ``rule_id`` at node ``i``; the action reads ``view`` (fresh if omitted)."""
    if state.kind is not system.kind:
        raise ValueError(f"{state.kind} state fed to {system.kind} rules")
    snapshot = state.values if view is None else view.snapshot
    new_value = system.rule(rule_id).action(snapshot, graph, i)
    return state.replace(i, new_value)
