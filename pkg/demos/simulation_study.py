"""Small bias/MSE study for all six estimators.

Run with ``python demos/simulation_study.py [--replications R] [--workers W]``.
The full-size study is ``oddsgen simulate --profile full``.
"""

import argparse

from oddsgen import ci_plan, run_simulation
from oddsgen.montecarlo import format_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replications", type=int, default=50)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    plan = ci_plan(sample_sizes=(50, 200, 1000), replications=args.replications)
    report = run_simulation(plan, workers=args.workers)
    print(format_table(report))
    mono = report.monotonicity()
    print(f"\nMSE monotone in N: {mono.ok} ({len(mono.inversions)} inversions)")
    if report.flagged():
        print("cells with more than 20% failed fits:", [(c.method, c.N) for c in report.flagged()])


if __name__ == "__main__":
    main()
