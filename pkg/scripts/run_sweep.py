"""Run the full wrench sweep and write JSON + CSV reports.

    python scripts/run_sweep.py --out results/sweep
"""

import argparse
import sys
import time
from pathlib import Path

from magnus_rod.bench import SweepSpec, emit_report, run_benchmark


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results/sweep")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--steps", type=int, default=3)
    args = ap.parse_args()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()

    def progress(done, total):
        if done % 27 == 0 or done == total:
            print(f"{done}/{total} chains  {time.perf_counter() - start:.0f} s", file=sys.stderr, flush=True)

    report = run_benchmark(SweepSpec(steps=args.steps), jobs=args.jobs, progress=progress)
    emit_report(report, "json", out.with_suffix(".json"))
    emit_report(report, "csv", out.with_suffix(".csv"))
    print(f"{'n':>3} {'order':>5} {'subset':>8} {'avg e_p %':>11} {'max e_p %':>11} {'avg e_r deg':>12} {'max e_r deg':>12} {'Hz':>7} {'failed':>6}")
    for a in report.aggregates:
        print(f"{a['n']:>3} {a['magnus_order']:>5} {a['subset']:>8} {a['avg_e_p_percent']:11.3g} {a['max_e_p_percent']:11.3g} "
              f"{a['avg_e_r_deg']:12.3g} {a['max_e_r_deg']:12.3g} {a['mean_rate_hz']:7.1f} {a['failed']:>6}")
    return 0 if report.all_converged else 1


if __name__ == "__main__":
    sys.exit(main())
