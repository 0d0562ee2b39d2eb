"""Moves to silence under bounded-stale reads, per problem and staleness bound.

    python3 scripts/stale_move_report.py --runs 200 --sizes 4,6,8,10
"""

import argparse
import statistics

from ellss.graph import ProblemKind
from ellss.sim import DaemonKind, RunConfig, Terminal, run
from ellss.suite import sample_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=100, help="runs per (problem, B, n)")
    ap.add_argument("--sizes", default="4,6,8,10")
    ap.add_argument("--bounds", default="0,1,2,3")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sizes = [int(x) for x in args.sizes.split(",")]
    bounds = [int(x) for x in args.bounds.split(",")]

    print(f"{'problem':8} {'B':>2} {'runs':>5} {'mean m/n(B+1)':>14} {'max m/n(B+1)':>13} "
          f"{'max m/2n':>9} {'budget hit':>10}")
    for kind in ProblemKind:
        for b in bounds:
            ratios, vs_2n, hit = [], [], 0
            for n in sizes:
                for k in range(args.runs):
                    seed = args.seed + 1000 * n + k
                    daemon = list(DaemonKind)[k % 3]
                    cfg = RunConfig(kind, daemon, staleness=b, seed=seed)
                    _, _, m = run(cfg, sample_graph(seed, n))
                    hit += m.terminal is Terminal.BUDGET_EXHAUSTED
                    ratios.append(m.moves / (n * (b + 1)))
                    vs_2n.append(m.moves / (2 * n))
            print(f"{kind.value:8} {b:>2} {len(ratios):>5} {statistics.fmean(ratios):>14.3f} "
                  f"{max(ratios):>13.3f} {max(vs_2n):>9.3f} {hit:>10}")


if __name__ == "__main__":
    main()
