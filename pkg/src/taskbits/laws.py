"""The three classic HCI laws re-derived from the shared SNR machinery.

Fitts: an affine halving rule on the distance to the near target edge.
Hick: prior-halving selection, binary-search style.
Power law: per-trial entropy falling with a rising SNR schedule.

All quantities are in bits; converting to time is a separate affine map
(see :func:`time_of`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .surprise import CapacityParams, hick_entropy


@dataclass(frozen=True)
class FittsTask:
    """Center-to-center distance and goal width, in task units."""

    amplitude: float
    width: float

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError(f"amplitude must be > 0, got {self.amplitude}")
        if self.width <= 0:
            raise ValueError(f"width must be > 0, got {self.width}")


@dataclass(frozen=True)
class FittsTrajectory:
    """Per-step distance to the near edge; last entry is <= 0 unless e_0 <= 0."""

    edges: tuple[float, ...]

    @property
    def steps(self) -> int:
        return len(self.edges) - 1


@dataclass(frozen=True)
class HickTask:
    n: int
    priors: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.priors is not None and abs(sum(self.priors) - 1.0) > 1e-9:
            raise ValueError("priors must sum to 1")


@dataclass(frozen=True)
class LearningSchedule:
    """SNR per trial (strictly increasing) plus entropy-law coefficients."""

    trials: int
    snr_of_trial: Callable[[int], float]
    a: float
    b: float


def fitts_error_field(e: float, width: float, b: float = 1.0) -> float:
    """Potential-energy field b*((e + N)/(2N))^2 over near-edge distance e."""
    if width <= 0:
        raise ValueError(f"width must be > 0, got {width}")
    r = (e + width) / (2.0 * width)
    return b * r * r


def fitts_step(e: float, width: float) -> float:
    """One halving update: e/2 - width/2."""
    if width <= 0:
        raise ValueError(f"width must be > 0, got {width}")
    return 0.5 * e - 0.5 * width


def initial_edge(task: FittsTask) -> float:
    # cursor starts at the center of the opposite target in a reciprocal task
    return task.amplitude - 0.5 * task.width


def fitts_run_from_edge(e0: float, width: float) -> FittsTrajectory:
    """Iterate the halving rule until the near edge is found (e <= 0)."""
    edges = [e0]
    e = e0
    while e > 0:
        e = fitts_step(e, width)
        edges.append(e)
    return FittsTrajectory(tuple(edges))


def fitts_run(task: FittsTask) -> FittsTrajectory:
    return fitts_run_from_edge(initial_edge(task), task.width)


def fitts_steps_closed_form(e0: float, width: float) -> int:
    """ceil(log2(e0/width + 1)); the recursion e_t = (e0+N)/2^t - N in closed form."""
    if e0 <= 0:
        return 0
    return math.ceil(math.log2(e0 / width + 1.0))


def fitts_capacity(task: FittsTask, params: CapacityParams) -> float:
    """a + b * log2(A/W + 1)."""
    return params.a + params.b * math.log2(task.amplitude / task.width + 1.0)


def fitts_error_prediction(task: FittsTask, b: float) -> float:
    """Post-capacity error: b * (A/W)^2."""
    r = task.amplitude / task.width
    return b * r * r


def hick_capacity(task: HickTask, b: float = 1.0) -> float:
    """b * log2(n + 1), or b * entropy(priors) when priors are non-uniform.

    The n+1 vs n discrepancy between the two paths is inherited from the
    source laws and deliberately not reconciled.
    """
    if task.priors is not None:
        return b * hick_entropy(list(task.priors))
    return b * math.log2(task.n + 1.0)


def hick_select(n: int, target: int, seed: int = 0) -> int:
    """Halve the candidate set until one remains; returns the step count.

    Candidates are 1..n; each step keeps a ceil(n/2)-sized half containing
    the target (overlapping halves when n is odd), so any target takes
    ceil(log2(n)) steps.  The seed breaks ties when the target sits in the
    overlap; the step count is tie-independent.
    """
    if not (1 <= target <= n):
        raise ValueError(f"target {target} out of range 1..{n}")
    import random

    rng = random.Random(seed)
    lo, hi = 1, n  # inclusive candidate range
    steps = 0
    while hi > lo:
        size = hi - lo + 1
        keep = (size + 1) // 2
        first = (lo, lo + keep - 1)
        last = (hi - keep + 1, hi)
        in_first = first[0] <= target <= first[1]
        in_last = last[0] <= target <= last[1]
        if in_first and in_last:
            lo, hi = first if rng.random() < 0.5 else last
        elif in_first:
            lo, hi = first
        else:
            lo, hi = last
        steps += 1
    return steps


def hick_error_prediction(n: int, b: float = 1.0) -> float:
    """Post-capacity selection error: b * n^2 (noise is 1/n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return b * n * n


def power_law_run(schedule: LearningSchedule) -> list[tuple[int, float]]:
    """Remaining entropy per trial: H_x = max(0, a - b*log2(snr(x)))."""
    out = []
    prev_snr = None
    for x in range(1, schedule.trials + 1):
        snr = schedule.snr_of_trial(x)
        if snr <= 0:
            raise ValueError(f"snr must be > 0 at trial {x}, got {snr}")
        if prev_snr is not None and snr <= prev_snr:
            raise ValueError("snr_of_trial must be strictly increasing")
        prev_snr = snr
        h = schedule.a - schedule.b * math.log2(snr)
        out.append((x, max(0.0, h)))
    return out


def time_of(h_bits: float, time_per_bit: float, c: float = 0.0) -> float:
    """Affine bits-to-time conversion; reproduces the power-law time shape."""
    return time_per_bit * h_bits + c
