"""Execute rule systems under central, distributed, and synchronous daemons.

A step is one daemon activation: every node reads a (possibly stale) view of
the public values around it, the daemon picks a subset of the nodes enabled
under their own views, and the picked nodes fire their first enabled rule.
All picks in a step read views taken before any of that step's commits.

Stale reads come from :class:`StaleStore`: at step ``t`` a node sees another
node's value as of configuration ``t - 1 - lag`` with ``lag <= B``. A node
always reads its own variables fresh. Silence is decided on fresh values
only, so ``SILENT`` is a property of the true configuration.
"""

from __future__ import annotations

import enum
import hashlib
import json
import random
import statistics
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from typing import Callable

from . import oracle
from .graph import Graph, ProblemKind
from .rules import (IN, OUT, NodeView, RemovableMode, RuleClass,
                    RuleContractError, StateVector, apply_rule, enabled_rules,
                    rule_system)


class DaemonKind(enum.Enum):
    CENTRAL = "central"
    DISTRIBUTED = "distributed"
    SYNCHRONOUS = "synchronous"


class InitPolicy(enum.Enum):
    ALL_IN = "all-in"
    ALL_OUT = "all-out"
    RANDOM = "random"
    EXPLICIT = "explicit"


class Terminal(enum.Enum):
    SILENT = "SILENT"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"


class SimulationAbort(RuntimeError):
    """A guard/action contract violation stopped the run."""

    def __init__(self, message, event=None):
        super().__init__(message)
        self.event = event


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemKind
    daemon: DaemonKind = DaemonKind.CENTRAL
    staleness: int = 0
    seed: int = 0
    init: InitPolicy = InitPolicy.RANDOM
    initial: StateVector | None = None
    budget: int | None = None
    mode: RemovableMode = RemovableMode.SELF_AWARE

    def __post_init__(self):
        if self.staleness < 0:
            raise ValueError("staleness bound must be nonnegative")
        if self.budget is not None and self.budget < 1:
            raise ValueError("move budget must be at least 1")
        if self.init is InitPolicy.EXPLICIT and self.initial is None:
            raise ValueError("EXPLICIT init needs a full initial state")
        if self.initial is not None and self.initial.kind is not self.problem:
            raise ValueError("initial state kind does not match the problem")

    def move_budget(self, n: int) -> int:
        if self.budget is not None:
            return self.budget
        return 10 * n * (self.staleness + 1)

    def describe(self) -> dict:
        return {
            "problem": self.problem.value,
            "daemon": self.daemon.value,
            "staleness": self.staleness,
            "seed": self.seed,
            "init": self.init.value,
            "removable_mode": self.mode.value,
            "budget": self.budget,
        }


def initial_state(config: RunConfig, graph: Graph, rng: random.Random) -> StateVector:
    """ALL_OUT/ALL_IN map to color 1 / color deg(i)+1 for coloring."""
    kind, n = config.problem, graph.n
    if config.init is InitPolicy.EXPLICIT:
        if len(config.initial.values) != n:
            raise ValueError("explicit state does not cover every node")
        return config.initial
    if kind is ProblemKind.GC:
        if config.init is InitPolicy.ALL_OUT:
            colors = [1] * n
        elif config.init is InitPolicy.ALL_IN:
            colors = [graph.degree(i) + 1 for i in range(n)]
        else:
            top = 2 * (graph.max_degree + 1)
            colors = [rng.randint(1, top) for _ in range(n)]
        return StateVector(kind, tuple(colors))
    if config.init is InitPolicy.ALL_IN:
        return StateVector(kind, (IN,) * n)
    if config.init is InitPolicy.ALL_OUT:
        return StateVector(kind, (OUT,) * n)
    return StateVector(kind, tuple(rng.choice((IN, OUT)) for _ in range(n)))


class StaleStore:
    """Versioned public values with reads up to ``bound`` steps old.

    Configuration ``c`` is the state after the commits of step ``c``
    (configuration 0 is the initial state). The lag for a read is a keyed
    hash of ``(seed, reader, subject, step)`` reduced mod ``bound + 1`` and
    clamped so that a reader never sees a subject go back in time.
    """

    def __init__(self, initial_values, bound: int, seed: int, record: bool = False):
        self.bound = bound
        self.seed = seed
        self._steps = [[0] for _ in initial_values]
        self._values = [[v] for v in initial_values]
        self._last: dict[tuple[int, int], int] = {}
        self.reads: list[tuple[int, int, int, object]] | None = [] if record else None

    def lag(self, reader: int, subject: int, step: int) -> int:
        if self.bound == 0:
            return 0
        key = f"{self.seed}:{reader}:{subject}:{step}".encode()
        digest = hashlib.blake2b(key, digest_size=8).digest()
        return int.from_bytes(digest, "big") % (self.bound + 1)

    def current(self, subject: int):
        return self._values[subject][-1]

    def value_at(self, subject: int, config: int):
        pos = bisect_right(self._steps[subject], config) - 1
        return self._values[subject][pos]

    def read(self, reader: int, subject: int, step: int):
        if reader == subject:
            value = self.current(subject)
        else:
            target = max(0, step - 1 - self.lag(reader, subject, step))
            target = max(target, self._last.get((reader, subject), 0))
            self._last[(reader, subject)] = target
            value = self.value_at(subject, target)
        if self.reads is not None:
            self.reads.append((step, reader, subject, value))
        return value

    def view(self, reader: int, nodes, step: int) -> NodeView:
        return NodeView(reader, {j: self.read(reader, j, step) for j in nodes})

    def commit(self, subject: int, step: int, value) -> None:
        if step <= self._steps[subject][-1]:
            raise ValueError("commits must move forward in time")
        self._steps[subject].append(step)
        self._values[subject].append(value)


@dataclass(frozen=True)
class Event:
    step: int
    round: int
    node: int
    rule: str
    rule_class: RuleClass
    pre: object
    post: object

    def to_record(self) -> dict:
        return {"step": self.step, "round": self.round, "node": self.node,
                "rule": self.rule_class.value, "pre": self.pre, "post": self.post}


@dataclass
class Trace:
    initial: StateVector
    events: list[Event] = field(default_factory=list)
    terminal: Terminal | None = None
    steps: int = 0
    reads: list | None = None

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_record()) + "\n" for e in self.events)


@dataclass
class Metrics:
    moves: int
    steps: int
    rounds: int
    terminal: Terminal
    rank_at_round_1: int | None
    feasible_at_round_1: bool | None
    rounds_to_feasible: int | None
    final_feasible: bool
    final_optimal: bool
    per_node_rule_counts: dict[str, dict[str, int]]
    size_series: list[int]
    round_steps: list[int]
    final_state: list
    config: dict
    oracle: dict | None = None
    exploration: dict | None = None

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["terminal"] = self.terminal.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _select(daemon: DaemonKind, candidates: list[int], rng: random.Random) -> list[int]:
    if daemon is DaemonKind.SYNCHRONOUS:
        return candidates
    if daemon is DaemonKind.CENTRAL:
        return [rng.choice(candidates)]
    while True:
        picked = [i for i in candidates if rng.random() < 0.5]
        if picked:
            return picked


def _show(state: StateVector, graph: Graph) -> list:
    if state.kind is ProblemKind.GC:
        return list(state.values)
    return sorted(state.member_ids(graph))


def run(config: RunConfig, graph: Graph, store_reads: bool = False):
    """Run to silence or budget exhaustion; returns ``(final, trace, metrics)``.

    With ``store_reads`` the returned trace carries the StaleStore read log in
    ``trace.reads`` as ``(step, reader_index, subject_index, value)``.
    """
    system = rule_system(config.problem)
    mode = config.mode
    n = graph.n
    rng = random.Random(config.seed)
    state = initial_state(config, graph, rng)
    store = StaleStore(state.values, config.staleness, config.seed, record=store_reads)
    budget = config.move_budget(n)
    trace = Trace(initial=state)
    counts = {i: {"F1": 0, "F2": 0} for i in range(n)}
    balls = [sorted(graph.ball(i, system.radius)) for i in range(n)]

    boundaries: list[StateVector] = []
    round_steps: list[int] = []
    chance: set[int] = set()
    moves = step = 0

    def fresh_enabled(i):
        return enabled_rules(system, NodeView(i, state.values), graph, mode)

    while True:
        fresh = {i: r for i in range(n) if (r := fresh_enabled(i))}
        if not fresh:
            trace.terminal = Terminal.SILENT
            if chance or not boundaries:
                boundaries.append(state)
                round_steps.append(step)
            break
        if moves >= budget:
            trace.terminal = Terminal.BUDGET_EXHAUSTED
            break
        step += 1
        if config.staleness == 0:
            views = {i: NodeView(i, state.values) for i in range(n)}
            enabled = fresh
        else:
            views = {i: store.view(i, balls[i], step) for i in range(n)}
            enabled = {i: r for i in range(n)
                       if (r := enabled_rules(system, views[i], graph, mode))}
        chance.update(i for i in range(n) if i not in enabled)
        picked = _select(config.daemon, sorted(enabled), rng) if enabled else []

        new_state = state
        fired = []
        for i in picked:
            name = enabled[i][0]
            try:
                new_state = new_state.replace(
                    i, apply_rule(system, state, i, name, graph, views[i]).values[i])
            except RuleContractError as exc:
                raise SimulationAbort(
                    f"step {step}: {name} at node {graph.ids[i]}: {exc}",
                    {"step": step, "node": graph.ids[i], "rule": name}) from exc
            fired.append((i, name))
        round_no = len(boundaries) + 1
        for i, name in fired:
            pre, post = state.values[i], new_state.values[i]
            if pre == post:
                continue
            cls = system.rule(name).rule_class
            trace.events.append(Event(step, round_no, graph.ids[i], name, cls, pre, post))
            counts[i][cls.value] += 1
            store.commit(i, step, post)
            moves += 1
        state = new_state
        chance.update(picked)
        if len(chance) == n:
            boundaries.append(state)
            round_steps.append(step)
            chance = set()

    trace.steps = step
    if store_reads:
        trace.reads = store.reads
    metrics = _metrics(config, graph, state, trace, moves, boundaries, round_steps, counts)
    return state, trace, metrics


def _metrics(config, graph, final, trace, moves, boundaries, round_steps,
             counts) -> Metrics:
    kind = config.problem
    rank1 = feas1 = None
    if boundaries:
        first = boundaries[0]
        feas1 = oracle.feasible(first, graph)
        if kind in (ProblemKind.SDDS, ProblemKind.VC):
            try:
                rank1 = oracle.rank(first, graph)
            except oracle.OracleSizeError:
                rank1 = None
    series_states = [trace.initial, *boundaries]
    rounds_to_feasible = next(
        (k for k, s in enumerate(series_states) if oracle.feasible(s, graph)), None)
    size_series = ([len(s.members()) for s in series_states] if kind.binary else [])
    return Metrics(
        moves=moves,
        steps=trace.steps,
        rounds=len(boundaries),
        terminal=trace.terminal,
        rank_at_round_1=rank1,
        feasible_at_round_1=feas1,
        rounds_to_feasible=rounds_to_feasible,
        final_feasible=oracle.feasible(final, graph),
        final_optimal=oracle.optimal(final, graph),
        per_node_rule_counts={str(graph.ids[i]): c for i, c in counts.items()},
        size_series=size_series,
        round_steps=round_steps,
        final_state=_show(final, graph),
        config=config.describe(),
    )


def replay(trace: Trace, graph: Graph) -> list[StateVector]:
    """Configuration after every step: ``out[k]`` is the state after step ``k``."""
    states = [trace.initial]
    by_step: dict[int, list[Event]] = {}
    for e in trace.events:
        by_step.setdefault(e.step, []).append(e)
    state = trace.initial
    for step in range(1, trace.steps + 1):
        for e in by_step.get(step, ()):
            i = graph.index_of[e.node]
            if state.values[i] != e.pre:
                raise ValueError(f"trace event {e} does not match the replayed state")
            state = state.replace(i, e.post)
        states.append(state)
    return states


@dataclass
class EnsembleSummary:
    runs: int
    max_moves: int
    mean_moves: float
    max_rounds_to_feasible: int | None
    silent: int
    budget_exhausted: int
    infeasible_finals: int
    nonoptimal_finals: int
    worst: dict

    def to_dict(self) -> dict:
        return dict(self.__dict__)


class EnsembleError(RuntimeError):
    def __init__(self, config: RunConfig, cause: Exception):
        super().__init__(f"run failed for {config.describe()}: {cause}")
        self.config = config


def run_ensemble(configs, graph_source: Graph | Callable[[int], Graph],
                 repetitions: int) -> EnsembleSummary:
    """Run every config ``repetitions`` times with seeds ``seed, seed+1, ...``.

    ``graph_source`` is either a fixed graph or a callable from seed to graph.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("need at least one config")
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    all_metrics = []
    for config in configs:
        for rep in range(repetitions):
            cfg = replace(config, seed=config.seed + rep)
            graph = graph_source(cfg.seed) if callable(graph_source) else graph_source
            try:
                all_metrics.append(run(cfg, graph)[2])
            except Exception as exc:
                raise EnsembleError(cfg, exc) from exc
    moves = [m.moves for m in all_metrics]
    rtf = [m.rounds_to_feasible for m in all_metrics if m.rounds_to_feasible is not None]
    worst = max(all_metrics, key=lambda m: m.moves)
    return EnsembleSummary(
        runs=len(all_metrics),
        max_moves=max(moves),
        mean_moves=statistics.fmean(moves),
        max_rounds_to_feasible=max(rtf) if rtf else None,
        silent=sum(m.terminal is Terminal.SILENT for m in all_metrics),
        budget_exhausted=sum(m.terminal is Terminal.BUDGET_EXHAUSTED for m in all_metrics),
        infeasible_finals=sum(not m.final_feasible for m in all_metrics),
        nonoptimal_finals=sum(not m.final_optimal for m in all_metrics),
        worst={"moves": worst.moves, **worst.config},
    )
