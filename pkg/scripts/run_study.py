#!/usr/bin/env python3
"""Run the full default study and print the headline numbers.

Equivalent to:
    taskbits simulate --out <dir>/traces --seed <seed>
    taskbits analyze --out <dir>/report.json <dir>/traces/*.csv
but kept in-process so the per-condition table can be printed directly.
"""

import argparse
import json
import os
import sys

from taskbits.config import RunConfig
from taskbits.estimator import analyze_run
from taskbits.sim import DriverParams, run_condition
from taskbits.traceio import write_report, write_trace


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="study_out")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--participants", type=int, default=None)
    ap.add_argument("--skip-traces", action="store_true",
                    help="analyze in memory without writing trace CSVs")
    args = ap.parse_args()

    overrides = {"master_seed": args.seed}
    if args.participants is not None:
        overrides["participants"] = args.participants
    cfg = RunConfig(**overrides)
    conds = cfg.conditions()
    os.makedirs(args.out, exist_ok=True)
    trace_dir = os.path.join(args.out, "traces")
    if not args.skip_traces:
        os.makedirs(trace_dir, exist_ok=True)

    runs = []
    for part in range(cfg.participants):
        for ci, cond in enumerate(conds):
            seed = cfg.seed_for(part, ci)
            run = run_condition(cond, DriverParams(seed=seed), seed,
                                trials_per_kind=cfg.trials_per_kind)
            runs.append(run)
            if not args.skip_traces:
                write_trace(os.path.join(
                    trace_dir, f"p{part:02d}_{cond.label()}.csv"), run)
        print(f"participant {part + 1}/{cfg.participants} simulated",
              file=sys.stderr)

    report = analyze_run(runs, bin_capacity=cfg.bin_capacity,
                         bin_error=cfg.bin_error, window_s=cfg.window_s)
    write_report(os.path.join(args.out, "report.json"), report)

    if report.capacity_fit:
        f = report.capacity_fit
        print(f"capacity: a={f.a:+.4f}  b={f.b:.4f}  r2={f.r_squared:.3f}"
              f"  throughput={report.throughput:.2f}")
    print(f"collisions: {report.n_collisions}")
    print("\nmean consumed bits by condition (rows: goal gap, cols: lead noise)")
    table = {(r["s_level"], r["n_level"]): r["mean_consumed_bits"]
             for r in report.consumed_table}
    n_levels = sorted({n for _, n in table})
    print("s_level  " + "  ".join(f"N{n}     " for n in n_levels))
    for s in sorted({s for s, _ in table}):
        cells = "  ".join(f"{table.get((s, n), float('nan')):.5f}"
                          for n in n_levels)
        print(f"{s:7.2f}  {cells}")
    with open(os.path.join(args.out, "summary.json"), "w") as fh:
        json.dump({"consumed_table": report.consumed_table,
                   "n_collisions": report.n_collisions}, fh, indent=1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
