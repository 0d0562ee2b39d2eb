"""Command-line entry point: single runs, optional oracle checks, and the suite.

Exit status: 0 silent with all requested checks passing, 1 input error,
2 check failure (witness in the metrics), 3 move budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import oracle
from .graph import GraphError, ProblemKind, generate_random_graph, load_graph
from .rules import IN, OUT, RemovableMode, StateVector
from .sim import (DaemonKind, InitPolicy, RunConfig, SimulationAbort, Terminal,
                  initial_state, run)

EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ellss", description=__doc__.splitlines()[0])
    p.add_argument("--problem", choices=[k.value for k in ProblemKind], default="sdds")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--graph", metavar="FILE", help="graph document (JSON)")
    src.add_argument("--random", metavar="N,P,UNIVERSE",
                     help="generate an Erdos-Renyi graph seeded by --seed")
    p.add_argument("--daemon", choices=[d.value for d in DaemonKind], default="central")
    p.add_argument("--staleness", type=int, default=0, metavar="B",
                   help="maximum age in steps of any value read about another node")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", default="random",
                   help="all-in | all-out | random | explicit:colors=1,2,.. | "
                        "explicit:status=IN,OUT,.. | explicit:in=ID,ID,..")
    p.add_argument("--removable-mode", choices=[m.value for m in RemovableMode],
                   default=RemovableMode.SELF_AWARE.value)
    p.add_argument("--budget", type=int, help="move budget (default 10*n*(B+1))")
    p.add_argument("--trace", metavar="FILE", help="write line-delimited trace records")
    p.add_argument("--metrics", metavar="FILE", help="write metrics JSON (default stdout)")
    p.add_argument("--verify-final", action="store_true",
                   help="require the final state to be feasible and optimal")
    p.add_argument("--explore", action="store_true",
                   help="exhaustively explore single-node firings from the initial state")
    p.add_argument("--suite", action="store_true", help="run the acceptance matrix")
    p.add_argument("--sizes", metavar="N,N,..", help="graph sizes for --suite")
    return p


def parse_init(text: str, kind: ProblemKind, graph) -> tuple[InitPolicy, StateVector | None]:
    simple = {"all-in": InitPolicy.ALL_IN, "all-out": InitPolicy.ALL_OUT,
              "random": InitPolicy.RANDOM}
    if text in simple:
        return simple[text], None
    if not text.startswith("explicit:") or "=" not in text:
        raise InputError(f"bad --init value {text!r}")
    key, _, raw = text[len("explicit:"):].partition("=")
    items = [x.strip() for x in raw.split(",") if x.strip()]
    try:
        if key == "colors":
            if kind is not ProblemKind.GC:
                raise InputError("explicit colors only apply to --problem gc")
            values = tuple(int(x) for x in items)
        elif key == "status":
            if kind is ProblemKind.GC:
                raise InputError("explicit status does not apply to --problem gc")
            values = tuple(x.upper() for x in items)
        elif key == "in":
            if kind is ProblemKind.GC:
                raise InputError("explicit members do not apply to --problem gc")
            members = {int(x) for x in items}
            unknown = members - set(graph.ids)
            if unknown:
                raise InputError(f"unknown node ids {sorted(unknown)}")
            values = tuple(IN if x in members else OUT for x in graph.ids)
        else:
            raise InputError(f"unknown explicit key {key!r}")
        if len(values) != graph.n:
            raise InputError(f"explicit state has {len(values)} entries for {graph.n} nodes")
        return InitPolicy.EXPLICIT, StateVector(kind, values)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def load_source(args):
    if args.graph:
        try:
            text = Path(args.graph).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read graph: {exc}") from exc
        return load_graph(text)
    if args.random:
        try:
            n, p, universe = args.random.split(",")
            return generate_random_graph(int(n), float(p), int(universe), args.seed)
        except ValueError as exc:
            raise InputError(f"bad --random value {args.random!r}: {exc}") from exc
    raise InputError("one of --graph or --random is required")


def run_suite(args) -> int:
    from .suite import acceptance_suite

    sizes = None
    if args.sizes:
        try:
            sizes = [int(x) for x in args.sizes.split(",")]
        except ValueError as exc:
            raise InputError(f"bad --sizes value {args.sizes!r}") from exc
    results = acceptance_suite(seed_base=args.seed, sizes=sizes)
    lines = "".join(json.dumps(r.to_dict(), sort_keys=True, default=str) + "\n"
                    for r in results)
    if args.metrics:
        Path(args.metrics).write_text(lines, encoding="utf-8")
    else:
        sys.stdout.write(lines)
    for r in results:
        print(r.line(), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.suite:
            return run_suite(args)
        graph = load_source(args)
        kind = ProblemKind(args.problem)
        policy, initial = parse_init(args.init, kind, graph)
        config = RunConfig(kind, DaemonKind(args.daemon), args.staleness, args.seed,
                           policy, initial, args.budget, RemovableMode(args.removable_mode))
        exploration = None
        if args.explore:
            # Same RNG stream as run(), so this is the state the run starts from.
            start = initial_state(config, graph, random.Random(config.seed))
            exploration = oracle.explore_transition_system(
                start, graph, ("F1", "F2"), config.mode)
        final, trace, metrics = run(config, graph)
    except (InputError, GraphError, oracle.OracleSizeError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"ellss: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SimulationAbort as exc:
        print(f"ellss: aborted: {exc}", file=sys.stderr)
        return EXIT_CHECK

    failed = False
    if args.verify_final:
        rep = oracle.report(final, graph)
        metrics.oracle = rep.to_dict()
        failed |= not (rep.feasible and rep.optimal)
    if exploration is not None:
        metrics.exploration = exploration.to_dict(graph)
        failed |= not exploration.all_terminals_optimal

    if args.trace:
        Path(args.trace).write_text(trace.to_jsonl(), encoding="utf-8")
    if args.metrics:
        Path(args.metrics).write_text(metrics.to_json(), encoding="utf-8")
    else:
        sys.stdout.write(metrics.to_json())

    if metrics.terminal is Terminal.BUDGET_EXHAUSTED:
        return EXIT_BUDGET
    return EXIT_CHECK if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
