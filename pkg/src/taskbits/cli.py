"""Command line front end.

Subcommands: simulate (write traces), analyze (traces -> report JSON),
laws (closed-form law tables), serve (live NDJSON session service) and
replay (feed a trace into a running service).

Exit codes: 0 success, 1 usage error, 2 data error.  Log level comes
from the II_LOG_LEVEL environment variable (default WARNING).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

log = logging.getLogger("taskbits")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _setup_logging():
    level = os.environ.get("II_LOG_LEVEL", "WARNING").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        level = "WARNING"
    logging.basicConfig(level=getattr(logging, level),
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="taskbits", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the study and write traces")
    sim.add_argument("--config", default=None, help="JSON config file")
    sim.add_argument("--seed", type=int, default=None, help="master seed")
    sim.add_argument("--participants", type=int, default=None)
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--driver", choices=("synthetic", "reference"),
                     default=None)

    ana = sub.add_parser("analyze", help="measure traces and fit the laws")
    ana.add_argument("--config", default=None)
    ana.add_argument("--out", required=True, help="report JSON path")
    ana.add_argument("--window-s", type=float, default=None)
    ana.add_argument("--bin-capacity", type=float, default=None)
    ana.add_argument("--bin-error", type=float, default=None)
    ana.add_argument("--onset-threshold", type=float, default=None)
    ana.add_argument("traces", nargs="+", help="trace CSV files")

    laws = sub.add_parser("laws", help="closed-form law tables")
    laws.add_argument("--out", required=True, help="output directory")

    srv = sub.add_parser("serve", help="run the live session service")
    srv.add_argument("--port", type=int, default=0,
                     help="TCP port (0 picks a free one)")
    srv.add_argument("--window-s", type=float, default=1.0)
    srv.add_argument("--ws-port", type=int, default=None,
                     help="optional WebSocket bridge port")

    rep = sub.add_parser("replay", help="stream a trace into a service")
    rep.add_argument("--port", type=int, required=True)
    rep.add_argument("--host", default="127.0.0.1")
    rep.add_argument("--speed", type=float, default=0.0,
                     help="realtime multiplier; 0 streams as fast as possible")
    rep.add_argument("trace", help="trace CSV file")
    return p


def _cmd_simulate(args) -> int:
    from .config import ConfigError, load_config
    from .sim import DriverParams, ReferenceDriverParams, run_condition, \
        run_reference_condition
    from .traceio import write_trace

    try:
        cfg = load_config(args.config, master_seed=args.seed,
                          participants=args.participants, driver=args.driver)
    except (ConfigError, OSError) as exc:
        print(f"taskbits simulate: {exc}", file=sys.stderr)
        return EXIT_DATA
    os.makedirs(args.out, exist_ok=True)
    conds = cfg.conditions()
    for part in range(cfg.participants):
        for ci, cond in enumerate(conds):
            seed = cfg.seed_for(part, ci)
            if cfg.driver == "reference":
                run = run_reference_condition(
                    cond, ReferenceDriverParams(), seed,
                    trials_per_kind=cfg.trials_per_kind)
            else:
                drv = DriverParams(
                    reaction_delay=cfg.reaction_delay,
                    control_gain=cfg.control_gain,
                    damping_gain=cfg.damping_gain,
                    gap_noise_m=cfg.gap_noise_m,
                    rel_noise_ms=cfg.rel_noise_ms,
                    capacity_cap=cfg.capacity_cap,
                    seed=seed,
                )
                run = run_condition(cond, drv, seed,
                                    trials_per_kind=cfg.trials_per_kind,
                                    lead_accel=cfg.lead_accel,
                                    onset_threshold=cfg.onset_threshold)
            name = f"p{part:02d}_{cond.label()}.csv"
            write_trace(os.path.join(args.out, name), run)
            log.info("wrote %s", name)
    print(f"wrote {cfg.participants * len(conds)} traces to {args.out}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    from .config import ConfigError, load_config
    from .estimator import analyze_run
    from .traceio import TraceFormatError, read_trace, write_report

    try:
        cfg = load_config(args.config, window_s=args.window_s,
                          bin_capacity=args.bin_capacity,
                          bin_error=args.bin_error,
                          onset_threshold=args.onset_threshold)
    except (ConfigError, OSError) as exc:
        print(f"taskbits analyze: {exc}", file=sys.stderr)
        return EXIT_DATA
    runs = []
    for path in args.traces:
        try:
            runs.append(read_trace(path))
        except (TraceFormatError, OSError, KeyError, ValueError) as exc:
            print(f"taskbits analyze: {exc}", file=sys.stderr)
            return EXIT_DATA
    report = analyze_run(runs, bin_capacity=cfg.bin_capacity,
                         bin_error=cfg.bin_error, window_s=cfg.window_s)
    write_report(args.out, report)
    for notice in report.notices:
        log.warning("%s", notice)
    if report.capacity_fit:
        f = report.capacity_fit
        print(f"capacity fit: a={f.a:.3f} b={f.b:.3f} r2={f.r_squared:.3f}")
    if report.error_fit:
        f = report.error_fit
        print(f"error fit: a={f.a:.3f} b={f.b:.3f} r2={f.r_squared:.3f}")
    print(f"collisions: {report.n_collisions}")
    print(f"report written to {args.out}")
    return EXIT_OK


def _cmd_laws(args) -> int:
    from .laws import (FittsTask, HickTask, LearningSchedule, fitts_capacity,
                       fitts_run, hick_capacity, hick_select, power_law_run)
    from .surprise import CapacityParams

    os.makedirs(args.out, exist_ok=True)
    params = CapacityParams(a=0.0, b=1.0)
    with open(os.path.join(args.out, "fitts.tsv"), "w") as f:
        f.write("amplitude\twidth\tid_bits\tsteps\n")
        for amp in (2.0, 4.0, 8.0, 16.0, 32.0, 64.0):
            for width in (0.5, 1.0, 2.0):
                task = FittsTask(amp, width)
                f.write(f"{amp!r}\t{width!r}\t{fitts_capacity(task, params)!r}"
                        f"\t{fitts_run(task).steps}\n")
    with open(os.path.join(args.out, "hick.tsv"), "w") as f:
        f.write("n\tcapacity_bits\tsteps\n")
        for n in range(1, 17):
            steps = max(hick_select(n, target) for target in range(1, n + 1))
            f.write(f"{n}\t{hick_capacity(HickTask(n))!r}\t{steps}\n")
    sched = LearningSchedule(trials=30, snr_of_trial=lambda x: float(x),
                             a=4.0, b=0.8)
    with open(os.path.join(args.out, "power_law.tsv"), "w") as f:
        f.write("trial\tremaining_bits\n")
        for x, h in power_law_run(sched):
            f.write(f"{x}\t{h!r}\n")
    print(f"law tables written to {args.out}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import serve
    try:
        serve(port=args.port, window_s=args.window_s, ws_port=args.ws_port)
    except OSError as exc:
        print(f"taskbits serve: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def _cmd_replay(args) -> int:
    from .service import replay_trace
    from .traceio import TraceFormatError, read_trace
    try:
        run = read_trace(args.trace)
    except (TraceFormatError, OSError, KeyError, ValueError) as exc:
        print(f"taskbits replay: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        summary = replay_trace(run, host=args.host, port=args.port,
                               speed=args.speed)
    except OSError as exc:
        print(f"taskbits replay: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "simulate": _cmd_simulate,
        "analyze": _cmd_analyze,
        "laws": _cmd_laws,
        "serve": _cmd_serve,
        "replay": _cmd_replay,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
