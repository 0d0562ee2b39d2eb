"""Compare the verbatim Removable-DS reading with the self-aware one.

Counts terminal states that are feasible but not minimal when Removable-DS
also insists on covering IN neighbors, and shows the smallest example.

    python3 scripts/faithful_gap.py --graphs 300
"""

import argparse

from ellss import oracle
from ellss.graph import ProblemKind, path_graph
from ellss.rules import RemovableMode, StateVector
from ellss.sim import DaemonKind, InitPolicy, RunConfig, run
from ellss.suite import sample_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graphs", type=int, default=200)
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()

    p3 = path_graph(3)
    start = StateVector(ProblemKind.SDDS, ("IN",) * 3)
    for mode in RemovableMode:
        res = oracle.explore_transition_system(start, p3, ("F2",), mode)
        print(f"P3 from all-IN, {mode.value:10}: terminals "
              f"{res.to_dict(p3)['terminal_states']}, all optimal: {res.all_terminals_optimal}")

    tally = {m: [0, 0] for m in RemovableMode}
    for k in range(args.graphs):
        n = 3 + k % (args.max_n - 2)
        g = sample_graph(k, n)
        for mode in RemovableMode:
            for daemon in DaemonKind:
                cfg = RunConfig(ProblemKind.SDDS, daemon, seed=k, mode=mode,
                                init=InitPolicy.ALL_IN)
                _, _, m = run(cfg, g)
                tally[mode][0] += 1
                tally[mode][1] += m.final_feasible and not m.final_optimal
    for mode, (runs, gap) in tally.items():
        print(f"{mode.value:10}: {gap} of {runs} all-IN runs end feasible but not minimal")


if __name__ == "__main__":
    main()
