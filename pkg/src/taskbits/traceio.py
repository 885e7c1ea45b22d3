"""Trace and report persistence.

Traces are CSV with a commented ``# key=value`` header block; floats
are serialized at 17 significant digits so a write/read cycle is
lossless and repeated runs are byte-identical.  Trial ledgers ride
along in a sibling ``.trials.json`` file; reports are plain JSON trees.
"""

from __future__ import annotations

import io
import json
import os
from dataclasses import asdict

import numpy as np
import pandas as pd

from .estimator import FitResult, RunReport
from .sim import Condition, SimRun, TrialRecord

SCHEMA_VERSION = 1
PHASE_NAMES = {0: "steady", 1: "decel", 2: "accel"}
PHASE_CODES = {v: k for k, v in PHASE_NAMES.items()}

TRACE_COLUMNS = ("t", "lead_pos", "lead_speed", "follow_pos",
                 "follow_speed", "pedal", "trial_id", "phase")


class TraceFormatError(ValueError):
    """Malformed or truncated trace file."""


def trials_path(path: str) -> str:
    base = path[:-4] if path.endswith(".csv") else path
    return base + ".trials.json"


def write_trace(path: str, run: SimRun) -> None:
    header = (
        f"# schema={SCHEMA_VERSION}\n"
        f"# s_level={run.condition.s_level!r}\n"
        f"# n_level={run.condition.n_level}\n"
        f"# seed={run.seed}\n"
        f"# dt={run.dt!r}\n"
    )
    df = pd.DataFrame({
        "t": run.t,
        "lead_pos": run.lead_pos,
        "lead_speed": run.lead_speed,
        "follow_pos": run.follow_pos,
        "follow_speed": run.follow_speed,
        "pedal": run.pedal,
        "trial_id": run.trial_id_col.astype(int),
        "phase": pd.Series(run.phase_col).map(PHASE_NAMES),
    })
    buf = io.StringIO()
    buf.write(header)
    # 17 significant digits: float64 round-trips exactly
    df.to_csv(buf, index=False, float_format="%.17g")
    with open(path, "w") as f:
        f.write(buf.getvalue())
    with open(trials_path(path), "w") as f:
        json.dump({
            "schema": SCHEMA_VERSION,
            "s_level": run.condition.s_level,
            "n_level": run.condition.n_level,
            "seed": run.seed,
            "trials": [asdict(tr) for tr in run.trials],
        }, f, indent=1, sort_keys=True)
        f.write("\n")


def read_trace(path: str) -> SimRun:
    meta: dict[str, str] = {}
    with open(path) as f:
        pos = 0
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
            pos += len(line)
    if meta.get("schema") != str(SCHEMA_VERSION):
        raise TraceFormatError(
            f"{path}: unsupported schema {meta.get('schema')!r}")
    try:
        df = pd.read_csv(path, comment="#", float_precision="round_trip")
    except Exception as exc:  # pandas raises various parse errors
        raise TraceFormatError(f"{path}: {exc}") from exc
    missing = set(TRACE_COLUMNS) - set(df.columns)
    if missing:
        raise TraceFormatError(f"{path}: missing columns {sorted(missing)}")
    bad = df[TRACE_COLUMNS[0]].isna()
    for c in TRACE_COLUMNS[:-1]:
        bad |= df[c].isna()
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise TraceFormatError(
            f"{path}: malformed row {row + 1} (last good row {row})")
    cond = Condition(float(meta["s_level"]), int(meta["n_level"]))

    tpath = trials_path(path)
    trials: list[TrialRecord] = []
    if os.path.exists(tpath):
        with open(tpath) as f:
            doc = json.load(f)
        trials = [TrialRecord(**tr) for tr in doc["trials"]]
    return SimRun(
        condition=cond,
        seed=int(meta["seed"]),
        dt=float(meta["dt"]),
        t=df["t"].to_numpy(),
        lead_pos=df["lead_pos"].to_numpy(),
        lead_speed=df["lead_speed"].to_numpy(),
        follow_pos=df["follow_pos"].to_numpy(),
        follow_speed=df["follow_speed"].to_numpy(),
        pedal=df["pedal"].to_numpy(),
        trial_id_col=df["trial_id"].to_numpy(dtype=int),
        phase_col=df["phase"].map(PHASE_CODES).to_numpy(dtype=int),
        trials=trials,
    )


def _fit_dict(fit: FitResult | None) -> dict | None:
    if fit is None:
        return None
    d = asdict(fit)
    d["residuals"] = list(d["residuals"])
    return d


def report_to_dict(report: RunReport) -> dict:
    def series(s):
        if s is None:
            return None
        return {
            "bin_width": s.bin_width,
            "x": list(s.x_centers),
            "y": list(s.y_means),
            "stderr": list(s.y_stderrs),
            "count": list(s.counts),
        }
    return {
        "schema": SCHEMA_VERSION,
        "capacity_fit": _fit_dict(report.capacity_fit),
        "error_fit": _fit_dict(report.error_fit),
        "capacity_series": series(report.capacity_series),
        "error_bits_series": series(report.error_bits_series),
        "unbounded_error_bins": list(report.unbounded_error_bins),
        "error_peak": report.error_peak,
        "mean_capacity": report.mean_capacity,
        "throughput": report.throughput,
        "n_collisions": report.n_collisions,
        "consumed_table": report.consumed_table,
        "id_table": report.id_table,
        "trial_infos": report.trial_infos,
        "notices": report.notices,
    }


def write_report(path: str, report: RunReport) -> None:
    with open(path, "w") as f:
        json.dump(report_to_dict(report), f, indent=1, sort_keys=True)
        f.write("\n")


def write_plot_tables(out_dir: str, report: RunReport) -> None:
    """Flat (x, y, stderr) tables for external plotting."""
    for name, s in (("capacity_series", report.capacity_series),
                    ("error_bits_series", report.error_bits_series)):
        if s is None:
            continue
        with open(os.path.join(out_dir, f"{name}.tsv"), "w") as f:
            f.write("x\ty\tstderr\tcount\n")
            for x, y, se, c in zip(s.x_centers, s.y_means, s.y_stderrs,
                                   s.counts):
                f.write(f"{x!r}\t{y!r}\t{se!r}\t{c}\n")
