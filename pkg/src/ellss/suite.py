"""The acceptance matrix: one function per criterion, each returning a verdict.

Run counts are per graph size, chosen so the default sizes meet the minimum
sample counts (500 move-bound runs, 200 small graphs, 300 stale runs per
problem and bound, 100 exploration graphs). With custom ``sizes`` the counts
scale down and minimums are reported but not enforced.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from . import oracle
from .graph import Graph, ProblemKind, fixtures, generate_random_graph, path_graph
from .rules import (RemovableMode, enabled_rules, forbidden_sdds,
                    fresh_view, removable_sdds, rule_system)
from .sim import DaemonKind, InitPolicy, RunConfig, Terminal, replay, run

DEFAULT_MOVE_SIZES = tuple(range(3, 13))
DEFAULT_STALE_SIZES = tuple(range(3, 11))
DEFAULT_SMALL_SIZES = tuple(range(3, 8))
INITS = (InitPolicy.ALL_IN, InitPolicy.ALL_OUT, InitPolicy.RANDOM)
DAEMONS = tuple(DaemonKind)

MOVE_SEEDS_PER_CELL = 6  # 10 sizes x 3 daemons x 3 inits x 6 = 540 runs
SMALL_GRAPHS_PER_SIZE = 40  # 5 sizes -> 200 graphs
STALE_RUNS_PER_SIZE = 38  # 8 sizes -> 304 runs per (problem, bound)
EXPLORE_GRAPHS_PER_SIZE = 20  # 5 sizes -> 100 graphs


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    observed: dict = field(default_factory=dict)
    witness: object = None
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.id}: {self.name} {json.dumps(self.observed, sort_keys=True)}"


def sample_graph(seed: int, n: int) -> Graph:
    rng = random.Random(seed)
    p = rng.choice((0.2, 0.35, 0.5, 0.7))
    universe = rng.randint(1, 3)
    return generate_random_graph(n, p, universe, seed)


class Suite:
    def __init__(self, seed_base: int = 0, sizes=None):
        self.seed_base = seed_base
        self.custom = sizes is not None
        self.move_sizes = tuple(sizes) if sizes else DEFAULT_MOVE_SIZES
        self.stale_sizes = tuple(sizes) if sizes else DEFAULT_STALE_SIZES
        small = DEFAULT_SMALL_SIZES if sizes is None else sizes
        self.small_sizes = tuple(s for s in small if s <= 7)
        self._move_runs = None
        self._small_runs = None
        self._stale_runs = None

    def seed(self, tag: int, k: int) -> int:
        return self.seed_base * 10_000_019 + tag * 100_003 + k

    def enough(self, count: int, minimum: int) -> bool:
        return self.custom or count >= minimum

    # -- shared run pools --------------------------------------------------

    def move_runs(self):
        """Criterion 1/2 pool: SDDS, B=0, SELF_AWARE."""
        if self._move_runs is None:
            out = []
            k = 0
            for n in self.move_sizes:
                for daemon in DAEMONS:
                    for init in INITS:
                        for _ in range(MOVE_SEEDS_PER_CELL):
                            seed = self.seed(1, k)
                            k += 1
                            g = sample_graph(seed, n)
                            cfg = RunConfig(ProblemKind.SDDS, daemon, 0, seed, init)
                            out.append((cfg, g, run(cfg, g)))
            self._move_runs = out
        return self._move_runs

    def small_graphs(self):
        graphs = list(fixtures().items())
        k = 0
        for n in self.small_sizes:
            for _ in range(SMALL_GRAPHS_PER_SIZE):
                seed = self.seed(2, k)
                k += 1
                graphs.append((f"rand{seed}", sample_graph(seed, n)))
        return graphs

    def small_runs(self):
        """Criterion 3/4/7 pool: every problem on small graphs, all daemons and inits."""
        if self._small_runs is None:
            out = []
            k = 0
            for name, g in self.small_graphs():
                for kind in ProblemKind:
                    for daemon in DAEMONS:
                        for init in INITS:
                            seed = self.seed(3, k)
                            k += 1
                            cfg = RunConfig(kind, daemon, 0, seed, init)
                            out.append((cfg, g, run(cfg, g)))
            self._small_runs = out
        return self._small_runs

    def stale_runs(self):
        if self._stale_runs is None:
            out = []
            k = 0
            for kind in ProblemKind:
                for bound in (1, 2, 3):
                    for n in self.stale_sizes:
                        for _ in range(STALE_RUNS_PER_SIZE):
                            seed = self.seed(4, k)
                            k += 1
                            rng = random.Random(seed)
                            g = sample_graph(seed, n)
                            cfg = RunConfig(kind, rng.choice(DAEMONS), bound, seed,
                                            rng.choice(INITS))
                            out.append((cfg, g, run(cfg, g)))
            self._stale_runs = out
        return self._stale_runs

    # -- criteria ----------------------------------------------------------

    def c1_move_bound(self) -> CriterionResult:
        runs = self.move_runs()
        bad = [(cfg.describe(), g.n, m.moves, m.terminal.value)
               for cfg, g, (_, _, m) in runs
               if m.terminal is not Terminal.SILENT or m.moves > 2 * g.n]
        worst = max(m.moves / (2 * g.n) for _, g, (_, _, m) in runs)
        passed = not bad and self.enough(len(runs), 500)
        return CriterionResult(1, "SDDS converges within 2n moves", passed,
                               {"runs": len(runs), "max_moves_over_2n": round(worst, 4),
                                "violations": len(bad)}, bad[:3] or None)

    def c2_one_round(self) -> CriterionResult:
        bad = []
        checked_steps = 0
        for cfg, g, (_, trace, m) in self.move_runs():
            if m.rank_at_round_1 != 0:
                bad.append(("rank_at_round_1", cfg.describe(), m.rank_at_round_1))
                continue
            states = replay(trace, g)
            start = m.round_steps[0]
            sizes = [len(s.members()) for s in states[start:]]
            for s in states[start:]:
                checked_steps += 1
                if not oracle.feasible(s, g):
                    bad.append(("infeasible_after_round_1", cfg.describe()))
                    break
            if any(b > a for a, b in zip(sizes, sizes[1:])):
                bad.append(("size_increase", cfg.describe(), sizes))
            boundary = [states[t] for t in m.round_steps]
            for a, b in zip(boundary, boundary[1:]):
                if not oracle.optimal(a, g) and len(b.members()) > len(a.members()) - 1:
                    bad.append(("no_round_shrink", cfg.describe(), m.size_series))
                    break
        return CriterionResult(2, "feasible within one round, then shrinking and feasible",
                               not bad, {"runs": len(self.move_runs()),
                                         "steps_checked": checked_steps,
                                         "violations": len(bad)}, bad[:3] or None)

    def c3_silence(self) -> CriterionResult:
        bad = []
        pool = self.small_runs() + self.stale_runs()
        for cfg, g, (final, _, m) in pool:
            if m.terminal is not Terminal.SILENT:
                bad.append(("not_silent", cfg.describe()))
                continue
            system = rule_system(cfg.problem)
            if any(enabled_rules(system, fresh_view(final, i), g, cfg.mode)
                   for i in range(g.n)):
                bad.append(("enabled_at_terminal", cfg.describe()))
            restart = RunConfig(cfg.problem, cfg.daemon, 0, cfg.seed,
                                InitPolicy.EXPLICIT, final, mode=cfg.mode)
            _, _, again = run(restart, g)
            if again.moves != 0 or again.terminal is not Terminal.SILENT:
                bad.append(("restart_moved", cfg.describe(), again.moves))
        per_kind = {k.value: sum(c.problem is k for c, _, _ in pool) for k in ProblemKind}
        return CriterionResult(3, "terminal states are silent and stay put", not bad,
                               {"runs": len(pool), "per_problem": per_kind,
                                "violations": len(bad)}, bad[:3] or None)

    def c4_optimality(self) -> CriterionResult:
        bad = []
        runs = self.small_runs()
        graphs = self.small_graphs()
        for cfg, g, (_, _, m) in runs:
            if not m.final_optimal:
                bad.append(("nonoptimal", cfg.describe(), m.final_state))
        faithful_runs = 0
        k = 0
        for _, g in graphs:
            for daemon in DAEMONS:
                for init in INITS:
                    seed = self.seed(5, k)
                    k += 1
                    cfg = RunConfig(ProblemKind.SDDS, daemon, 0, seed, init,
                                    mode=RemovableMode.FAITHFUL)
                    final, _, m = run(cfg, g)
                    faithful_runs += 1
                    removable = [i for i in final.members()
                                 if removable_sdds(fresh_view(final, i), g,
                                                   RemovableMode.FAITHFUL)]
                    if m.terminal is not Terminal.SILENT or not m.final_feasible or removable:
                        bad.append(("faithful_terminal", cfg.describe(), m.final_state))
        p3 = path_graph(3)
        final, _, m = run(RunConfig(ProblemKind.SDDS, DaemonKind.CENTRAL, 0, 1,
                                    InitPolicy.ALL_IN, mode=RemovableMode.FAITHFUL), p3)
        gap = sorted(final.member_ids(p3))
        gap_reproduced = gap == [1, 2] and not m.final_optimal
        if not gap_reproduced:
            bad.append(("faithful_gap_missing", gap))
        random_graphs = len(graphs) - len(fixtures())
        passed = not bad and self.enough(random_graphs, 200)
        return CriterionResult(4, "terminal states are optimal", passed,
                               {"graphs": len(graphs), "random_graphs": random_graphs,
                                "runs": len(runs), "faithful_runs": faithful_runs,
                                "faithful_p3_terminal": gap,
                                "faithful_p3_optimal": m.final_optimal,
                                "violations": len(bad)}, bad[:3] or None)

    def c5_stale(self) -> CriterionResult:
        bad = []
        counts: dict[str, int] = {}
        worst = 0.0
        for cfg, g, (_, _, m) in self.stale_runs():
            key = f"{cfg.problem.value}/B={cfg.staleness}"
            counts[key] = counts.get(key, 0) + 1
            budget = 10 * g.n * (cfg.staleness + 1)
            worst = max(worst, m.moves / budget)
            if m.terminal is not Terminal.SILENT or m.moves > budget:
                bad.append(("no_convergence", cfg.describe(), m.moves))
            elif not m.final_optimal:
                bad.append(("nonoptimal", cfg.describe(), m.final_state))
            if cfg.problem.binary:
                for node, c in m.per_node_rule_counts.items():
                    if c["F2"] > c["F1"] + 1:
                        bad.append(("alternation", cfg.describe(), node, c))
        passed = not bad and all(self.enough(c, 300) for c in counts.values())
        return CriterionResult(5, "stale-read convergence within 10n(B+1) moves", passed,
                               {"runs": sum(counts.values()),
                                "min_runs_per_cell": min(counts.values()),
                                "max_moves_over_budget": round(worst, 4),
                                "violations": len(bad)}, bad[:3] or None)

    def c6_lattice(self) -> CriterionResult:
        graphs = list(fixtures().items())
        k = 0
        for n in self.small_sizes:
            for _ in range(EXPLORE_GRAPHS_PER_SIZE):
                seed = self.seed(6, k)
                k += 1
                graphs.append((f"rand{seed}", sample_graph(seed, n)))
        bad = []
        starts = 0
        for name, g in graphs:
            for state in oracle.all_states(ProblemKind.SDDS, g):
                if not oracle.feasible(state, g) or oracle.optimal(state, g):
                    continue
                starts += 1
                if not any(forbidden_sdds(fresh_view(state, i), g) for i in range(g.n)):
                    bad.append(("no_forbidden", name, sorted(state.member_ids(g))))
                res = oracle.explore_transition_system(state, g, ("F2",))
                if not (res.all_terminals_optimal and res.necessity_holds
                        and res.forbidden_in_every_nonoptimal_feasible):
                    bad.append(("exploration", name, sorted(state.member_ids(g)),
                                res.witness))
        random_graphs = len(graphs) - len(fixtures())
        passed = not bad and self.enough(random_graphs, 100)
        return CriterionResult(6, "forbidden node exists; F2-only runs end optimal", passed,
                               {"graphs": len(graphs), "random_graphs": random_graphs,
                                "feasible_nonoptimal_starts": starts,
                                "violations": len(bad)}, bad[:3] or None)

    def c7_crosschecks(self) -> CriterionResult:
        bad = []
        states_checked = 0
        for name, g in self.small_graphs():
            for kind in (ProblemKind.SDDS, ProblemKind.VC):
                for state in oracle.all_states(kind, g):
                    states_checked += 1
                    if (oracle.rank(state, g) == 0) != oracle.feasible(state, g):
                        bad.append(("rank_vs_feasible", name, kind.value))
        optima_cache = {}
        terminals = 0
        for cfg, g, (final, _, m) in self.small_runs():
            if cfg.problem in (ProblemKind.SDDS, ProblemKind.VC):
                if oracle.badness(final, g) != 0:
                    bad.append(("badness", cfg.describe(), m.final_state))
            key = (cfg.problem, g)
            if key not in optima_cache:
                optima_cache[key] = oracle.enumerate_optima(cfg.problem, g)
            terminals += 1
            if final not in optima_cache[key]:
                bad.append(("terminal_not_enumerated", cfg.describe(), m.final_state))
        p3 = path_graph(3)
        p3_optima = sorted(sorted(s.member_ids(p3))
                           for s in oracle.enumerate_optima(ProblemKind.SDDS, p3))
        if p3_optima != [[1, 3], [2]]:
            bad.append(("p3_optima", p3_optima))
        return CriterionResult(7, "oracle cross-checks", not bad,
                               {"states_checked": states_checked,
                                "terminals_checked": terminals,
                                "p3_optima": p3_optima,
                                "violations": len(bad)}, bad[:3] or None)

    def c8_determinism(self) -> CriterionResult:
        pools = [self.move_runs(), self.small_runs(), self.stale_runs()]
        bad = []
        repeated = 0
        for pool in pools:
            for cfg, g, (_, trace, m) in pool[::7]:
                repeated += 1
                _, trace2, m2 = run(cfg, g)
                if trace2.to_jsonl() != trace.to_jsonl() or m2.to_json() != m.to_json():
                    bad.append(cfg.describe())
        return CriterionResult(8, "identical inputs give byte-identical outputs", not bad,
                               {"runs_repeated": repeated, "violations": len(bad)},
                               bad[:3] or None)

    CRITERIA = ("c1_move_bound", "c2_one_round", "c3_silence", "c4_optimality",
                "c5_stale", "c6_lattice", "c7_crosschecks", "c8_determinism")

    def run_all(self) -> list[CriterionResult]:
        out = []
        for name in self.CRITERIA:
            t0 = time.perf_counter()
            result = getattr(self, name)()
            result.seconds = round(time.perf_counter() - t0, 3)
            out.append(result)
        return out


def acceptance_suite(seed_base: int = 0, sizes=None) -> list[CriterionResult]:
    """Run the full criteria matrix; one result per criterion, in order."""
    return Suite(seed_base, sizes).run_all()
