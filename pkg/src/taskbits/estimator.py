"""Measurement pipeline: rolling-window surprise, per-trial consumed
information, binning, capacity and error regressions.

Conventions fixed here for reproducibility:
  - windows select samples with t in (end - width - 1e-9, end], so a
    sample sitting exactly on the left edge is included despite grid
    rounding;
  - window sigma is the population standard deviation;
  - bins are right-open [k*w, (k+1)*w) anchored at 0;
  - negative consumed-info values are retained through binning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .surprise import avoidance_surprise, error_bits_from_rate

WINDOW_EDGE_EPS = 1e-9


class WindowError(ValueError):
    """Requested window is not covered by the trace."""


class NotMeasurableError(ValueError):
    """Consumed information undefined (e.g. the trial ended in collision)."""


class FitError(ValueError):
    """Too few bins to fit."""


@dataclass(frozen=True)
class WindowStats:
    mean_gap: float
    sigma_gap: float
    window_end: float
    sample_count: int


@dataclass(frozen=True)
class TrialInfo:
    trial_id: int
    ns_ratio: float
    stimulus_bits: float
    remaining_bits: float

    @property
    def consumed_bits(self) -> float:
        return self.stimulus_bits - self.remaining_bits


@dataclass(frozen=True)
class BinnedSeries:
    bin_width: float
    x_centers: tuple[float, ...]
    y_means: tuple[float, ...]
    y_stderrs: tuple[float, ...]
    counts: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.x_centers)


@dataclass(frozen=True)
class FitResult:
    kind: str  # "log-linear" | "quadratic"
    a: float
    b: float
    r_squared: float
    n_points: int
    residuals: tuple[float, ...]
    degenerate: bool = False


def window_stats(t: np.ndarray, gap: np.ndarray, window_end: float,
                 width: float = 1.0) -> WindowStats:
    """Mean and population sigma of gap samples in (end-width, end]."""
    if window_end > t[-1] + WINDOW_EDGE_EPS or window_end - width < t[0] - WINDOW_EDGE_EPS:
        raise WindowError(f"window ending at {window_end} not covered by trace")
    mask = (t >= window_end - width - WINDOW_EDGE_EPS) & (t <= window_end + WINDOW_EDGE_EPS)
    n = int(mask.sum())
    if n < 2:
        raise WindowError(f"window ending at {window_end} holds {n} samples; need >= 2")
    g = gap[mask]
    return WindowStats(
        mean_gap=float(g.mean()),
        sigma_gap=float(g.std()),  # population sigma
        window_end=window_end,
        sample_count=n,
    )


def detect_response_onset(t: np.ndarray, pedal: np.ndarray, event_onset: float,
                          trial_end: float, threshold: float = 0.02,
                          baseline_window: float = 0.2) -> float | None:
    """First sample after event onset where the pedal moves more than
    ``threshold`` away from its pre-event baseline, or None."""
    pre = (t >= event_onset - baseline_window - WINDOW_EDGE_EPS) & (t < event_onset)
    if pre.any():
        baseline = float(pedal[pre].mean())
    else:
        i0 = int(np.searchsorted(t, event_onset))
        baseline = float(pedal[min(i0, len(pedal) - 1)])
    span = (t >= event_onset - WINDOW_EDGE_EPS) & (t < trial_end)
    idx = np.flatnonzero(span & (np.abs(pedal - baseline) > threshold))
    if idx.size == 0:
        return None
    return float(t[idx[0]])


def trial_consumed_info(t: np.ndarray, gap: np.ndarray, trial, b: float = 1.0,
                        width: float = 1.0) -> TrialInfo:
    """Stimulus-window bits minus remaining-window bits for one trial.

    ``trial`` needs .trial_id, .delta_s, .mean_gap, .response_onset,
    .end_time and .collided.  Collided trials are not measurable.
    """
    if trial.collided:
        raise NotMeasurableError(f"trial {trial.trial_id} ended in collision")
    if trial.response_onset is None:
        raise NotMeasurableError(f"trial {trial.trial_id} has no response onset")
    w1 = window_stats(t, gap, trial.response_onset, width)
    w2 = window_stats(t, gap, trial.end_time, width)
    return TrialInfo(
        trial_id=trial.trial_id,
        ns_ratio=trial_ns_ratio(trial),
        stimulus_bits=avoidance_surprise(w1.mean_gap, w1.sigma_gap, b),
        remaining_bits=avoidance_surprise(w2.mean_gap, w2.sigma_gap, b),
    )


def trial_ns_ratio(trial) -> float:
    """Realized delta_s over trial-mean gap."""
    if trial.mean_gap <= 0:
        raise ValueError(f"mean gap must be > 0, got {trial.mean_gap}")
    return trial.delta_s / trial.mean_gap


def index_of_difficulty(ns_ratio: float) -> float:
    """log2(ratio + 1), in bits."""
    if ns_ratio < 0:
        raise ValueError(f"ratio must be >= 0, got {ns_ratio}")
    return math.log2(ns_ratio + 1.0)


def bin_series(points: list[tuple[float, float]], bin_width: float) -> BinnedSeries:
    """Fixed-width bins [k*w, (k+1)*w) anchored at 0; empty bins omitted."""
    if bin_width <= 0:
        raise ValueError(f"bin width must be > 0, got {bin_width}")
    if not points:
        raise ValueError("points must be non-empty")
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    keys = np.floor(xs / bin_width).astype(int)
    centers, means, errs, counts = [], [], [], []
    for k in sorted(set(keys.tolist())):
        sel = ys[keys == k]
        n = sel.size
        centers.append((k + 0.5) * bin_width)
        means.append(float(sel.mean()))
        errs.append(float(sel.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0)
        counts.append(n)
    return BinnedSeries(bin_width, tuple(centers), tuple(means), tuple(errs),
                        tuple(counts))


def _ols(x: np.ndarray, y: np.ndarray, kind: str,
         weights: np.ndarray | None = None) -> FitResult:
    if x.size < 3:
        raise FitError(f"need >= 3 bins, got {x.size}")
    w = np.ones_like(x) if weights is None else weights.astype(float)
    sw = w.sum()
    xm = (w * x).sum() / sw
    ym = (w * y).sum() / sw
    sxx = (w * (x - xm) ** 2).sum()
    sxy = (w * (x - xm) * (y - ym)).sum()
    syy = (w * (y - ym) ** 2).sum()
    if sxx == 0.0 or syy == 0.0:
        b = 0.0 if sxx == 0.0 else sxy / sxx
        a = ym - b * xm
        res = y - (a + b * x)
        return FitResult(kind, float(a), float(b), 0.0, int(x.size),
                         tuple(res.tolist()), degenerate=True)
    b = sxy / sxx
    a = ym - b * xm
    res = y - (a + b * x)
    r2 = 1.0 - (w * res ** 2).sum() / syy
    return FitResult(kind, float(a), float(b), float(r2), int(x.size),
                     tuple(res.tolist()))


def fit_log_linear(series: BinnedSeries, count_weighted: bool = False) -> FitResult:
    """OLS of bin means on log2(x + 1)."""
    x = np.log2(np.array(series.x_centers) + 1.0)
    y = np.array(series.y_means)
    w = np.array(series.counts, dtype=float) if count_weighted else None
    return _ols(x, y, "log-linear", w)


def fit_quadratic(series: BinnedSeries, count_weighted: bool = False) -> FitResult:
    """OLS of bin means on x^2."""
    x = np.array(series.x_centers) ** 2
    y = np.array(series.y_means)
    w = np.array(series.counts, dtype=float) if count_weighted else None
    return _ols(x, y, "quadratic", w)


@dataclass(frozen=True)
class ErrorSeries:
    """Error-bits series plus a flag for a bin that absorbed all errors."""

    series: BinnedSeries | None
    unbounded_bins: tuple[float, ...] = ()


def error_series(collided_ratios: list[float], bin_width: float = 0.5) -> ErrorSeries:
    """Per-bin collision share converted to error bits.

    ``collided_ratios`` holds one delta_s/mean-gap ratio per collision
    (the ratio of the trial's repeat).  p(E) per bin is that bin's share
    of all collisions; y = -log2(1 - p(E)).  A bin holding every
    collision has p = 1 and is reported as unbounded rather than fitted.
    """
    if not collided_ratios:
        return ErrorSeries(series=None)
    total = len(collided_ratios)
    keys = [math.floor(r / bin_width) for r in collided_ratios]
    centers, ys, counts, unbounded = [], [], [], []
    for k in sorted(set(keys)):
        n = keys.count(k)
        p = n / total
        c = (k + 0.5) * bin_width
        if p >= 1.0:
            unbounded.append(c)
            continue
        centers.append(c)
        ys.append(error_bits_from_rate(p))
        counts.append(n)
    if not centers:
        return ErrorSeries(series=None, unbounded_bins=tuple(unbounded))
    return ErrorSeries(
        series=BinnedSeries(bin_width, tuple(centers), tuple(ys),
                            tuple(0.0 for _ in ys), tuple(counts)),
        unbounded_bins=tuple(unbounded),
    )


def remaining_capacity(fit: FitResult, mean_capacity: float, x: float) -> float:
    """mean_capacity - (a + b*log2(x+1)); sign preserved."""
    if fit.kind != "log-linear":
        raise ValueError("remaining capacity needs a log-linear fit")
    return mean_capacity - (fit.a + fit.b * math.log2(x + 1.0))


@dataclass
class RunReport:
    """Everything the end-to-end analysis produces for one study."""

    trial_infos: list[dict] = field(default_factory=list)
    capacity_fit: FitResult | None = None
    error_fit: FitResult | None = None
    capacity_series: BinnedSeries | None = None
    error_bits_series: BinnedSeries | None = None
    unbounded_error_bins: tuple[float, ...] = ()
    id_table: list[dict] = field(default_factory=list)
    consumed_table: list[dict] = field(default_factory=list)
    error_peak: dict | None = None
    mean_capacity: float | None = None
    throughput: float | None = None
    n_collisions: int = 0
    notices: list[str] = field(default_factory=list)


def analyze_run(runs: list, bin_capacity: float = 0.05, bin_error: float = 0.5,
                window_s: float = 1.0, b: float = 1.0,
                count_weighted: bool = False) -> RunReport:
    """Pooled decel-only analysis over a list of simulation runs.

    Each run needs .t, .gap (arrays), .trials (TrialRecord-likes) and
    .condition (with .s_level / .n_level).  Accel trials and collided
    trials are excluded from the capacity series; collided trials feed
    the error series through their repeat's ratio.
    """
    report = RunReport()
    points: list[tuple[float, float]] = []
    collided_ratios: list[float] = []
    per_condition: dict[tuple[float, int], list[float]] = {}
    per_condition_id: dict[tuple[float, int], list[float]] = {}

    for run in runs:
        by_id = {tr.trial_id: tr for tr in run.trials}
        for tr in run.trials:
            if tr.kind != "decel":
                continue
            key = (run.condition.s_level, run.condition.n_level)
            if tr.collided:
                rep = by_id.get(tr.repeat_id) if tr.repeat_id is not None else None
                ref = rep if rep is not None else tr
                if ref.mean_gap > 0:
                    collided_ratios.append(trial_ns_ratio(ref))
                continue
            if tr.response_onset is None:
                continue
            try:
                info = trial_consumed_info(run.t, run.gap, tr, b=b, width=window_s)
            except (WindowError, ValueError):
                continue
            points.append((info.ns_ratio, info.consumed_bits))
            report.trial_infos.append({
                "s_level": run.condition.s_level,
                "n_level": run.condition.n_level,
                "trial_id": tr.trial_id,
                "ns_ratio": info.ns_ratio,
                "id_bits": index_of_difficulty(info.ns_ratio),
                "stimulus_bits": info.stimulus_bits,
                "remaining_bits": info.remaining_bits,
                "consumed_bits": info.consumed_bits,
            })
            per_condition.setdefault(key, []).append(info.consumed_bits)
            per_condition_id.setdefault(key, []).append(
                index_of_difficulty(info.ns_ratio))

    report.n_collisions = len(collided_ratios)
    if not points:
        report.notices.append("no measurable deceleration trials; capacity series empty")
        return report

    report.capacity_series = bin_series(points, bin_capacity)
    if len(report.capacity_series) >= 3:
        report.capacity_fit = fit_log_linear(report.capacity_series, count_weighted)
        report.mean_capacity = report.capacity_fit.b
        if report.capacity_fit.b > 0:
            report.throughput = 1.0 / report.capacity_fit.b
    else:
        report.notices.append("fewer than 3 capacity bins; capacity fit skipped")

    err = error_series(collided_ratios, bin_error)
    report.unbounded_error_bins = err.unbounded_bins
    if err.series is not None:
        report.error_bits_series = err.series
        peak = int(np.argmax(err.series.y_means))
        x_peak = err.series.x_centers[peak]
        # the peak position is reported on both axes (ratio and its log
        # form); callers pick the labeling, no silent conversion here
        report.error_peak = {
            "ns_ratio": float(x_peak),
            "id_bits": index_of_difficulty(float(x_peak)),
            "error_bits": float(err.series.y_means[peak]),
        }
        if len(err.series) >= 3:
            report.error_fit = fit_quadratic(err.series, count_weighted)
        else:
            report.notices.append("fewer than 3 error bins; error fit skipped")
    elif not collided_ratios:
        report.notices.append("no collisions; error series empty")

    for key in sorted(per_condition):
        vals = np.array(per_condition[key])
        ids = np.array(per_condition_id[key])
        se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        report.consumed_table.append({
            "s_level": key[0], "n_level": key[1],
            "mean_consumed_bits": float(vals.mean()),
            "stderr": se, "n_trials": int(vals.size),
        })
        report.id_table.append({
            "s_level": key[0], "n_level": key[1],
            "mean_id_bits": float(ids.mean()),
        })
    return report
