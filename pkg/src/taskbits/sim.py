"""Deterministic 1D car-following world.

Point-mass kinematics with bounded acceleration stand in for a full
vehicle physics engine; collision is gap <= 0 with bumper extents folded
into the distance calibration.  A run is single-threaded and fully
determined by (condition, driver params, seed): one RNG stream,
fixed-order arithmetic.

Two follower implementations live here:

* :class:`SyntheticDriver` - a delayed PD controller with multiplicative
  perceptual noise and an information-throughput cap, used for the
  default ensembles.
* :func:`run_reference_condition` - a trace synthesizer whose measured
  per-trial consumed information equals a + b*log2(x+1) plus Gaussian
  noise by construction.  It exists to validate the measurement
  pipeline, not to model a plausible human; its follower kinematics are
  deliberately aggressive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import detect_response_onset

DT = 1.0 / 450.0
BASE_SPEED_MS = 100.0 / 3.6

S_LEVELS = (2.84, 4.84, 6.84, 8.84)
SPEED_BAND_KMH = {1: 12.0, 2: 18.0, 3: 24.0}
NOMINAL_41_SIGMA = {1: 1.93, 2: 4.19, 3: 7.21}


@dataclass(frozen=True)
class Condition:
    """One (distance, lead-speed-variability) cell of the study design."""

    s_level: float
    n_level: int

    @property
    def in_study_grid(self) -> bool:
        return self.s_level in S_LEVELS and self.n_level in SPEED_BAND_KMH

    @property
    def band_half_ms(self) -> float:
        return SPEED_BAND_KMH[self.n_level] / 3.6

    @property
    def speed_low(self) -> float:
        return BASE_SPEED_MS - self.band_half_ms

    @property
    def speed_high(self) -> float:
        return BASE_SPEED_MS + self.band_half_ms

    @property
    def nominal_41_sigma(self) -> float:
        return NOMINAL_41_SIGMA[self.n_level]

    def label(self) -> str:
        return f"S{self.s_level:g}-N{self.n_level}"


def study_conditions() -> list[Condition]:
    return [Condition(s, n) for s in S_LEVELS for n in (1, 2, 3)]


@dataclass(frozen=True)
class LeadEvent:
    onset_idx: int
    completion_idx: int
    kind: str  # "accel" | "decel"
    start_speed: float
    target_speed: float


@dataclass(frozen=True)
class LeadProfile:
    events: tuple[LeadEvent, ...]
    n_samples: int
    lead_accel: float


@dataclass(frozen=True)
class WorldState:
    t: float
    lead_pos: float
    lead_speed: float
    follow_pos: float
    follow_speed: float
    phase: str = "steady"

    @property
    def gap(self) -> float:
        return self.lead_pos - self.follow_pos


def detect_collision(state: WorldState) -> bool:
    """Cars as points: collided iff gap <= 0."""
    return state.gap <= 0.0


def step_world(state: WorldState, pedal: float, dt: float = DT,
               lead_accel: float = 0.0, max_accel: float = 3.0,
               max_brake: float = 6.0) -> WorldState:
    """Semi-implicit Euler step: speeds first, then positions.

    ``pedal`` in [-1, 1] maps to [max_brake backwards, max_accel forwards];
    ``lead_accel`` is the lead car's commanded acceleration.
    """
    pedal = min(1.0, max(-1.0, pedal))
    a_f = pedal * (max_accel if pedal >= 0 else max_brake)
    lead_speed = max(0.0, state.lead_speed + lead_accel * dt)
    follow_speed = max(0.0, state.follow_speed + a_f * dt)
    return WorldState(
        t=state.t + dt,
        lead_pos=state.lead_pos + lead_speed * dt,
        lead_speed=lead_speed,
        follow_pos=state.follow_pos + follow_speed * dt,
        follow_speed=follow_speed,
        phase=state.phase,
    )


def _sec_to_idx(seconds: float) -> int:
    return int(round(seconds / DT))


def generate_lead_profile(cond: Condition, trials_per_kind: int = 20,
                          seed: int = 0, lead_accel: float = 3.0,
                          spacing_s: float = 2.0, jitter_s: float = 0.25,
                          warmup_s: float = 2.0, min_gap_after_s: float = 0.3,
                          tail_s: float = 2.5,
                          dv_frac: float = 0.95) -> LeadProfile:
    """Shuffled accel/decel speed-change events for one condition.

    Speed-change magnitudes are drawn uniformly up to ``dv_frac`` of the
    band half-width, clipped so the speed stays inside the band; every
    decel actually decelerates.  Events never overlap: the next onset
    waits for the previous ramp to finish.
    """
    rng = np.random.default_rng(seed)
    kinds = ["decel"] * trials_per_kind + ["accel"] * trials_per_kind
    rng.shuffle(kinds)
    events = []
    speed = BASE_SPEED_MS
    onset = _sec_to_idx(warmup_s)
    span = dv_frac * cond.band_half_ms
    for kind in kinds:
        if kind == "decel":
            target = speed - float(rng.uniform(
                0.0, min(span, speed - cond.speed_low)))
        else:
            target = speed + float(rng.uniform(
                0.0, min(span, cond.speed_high - speed)))
        dur = _sec_to_idx(abs(target - speed) / lead_accel)
        events.append(LeadEvent(onset, onset + dur, kind, speed, target))
        speed = target
        jitter = float(rng.uniform(-jitter_s, jitter_s))
        next_onset = max(onset + _sec_to_idx(spacing_s + jitter),
                         onset + dur + _sec_to_idx(min_gap_after_s))
        onset = next_onset
    n = (events[-1].completion_idx if events else _sec_to_idx(warmup_s)) \
        + _sec_to_idx(tail_s) + 1
    return LeadProfile(tuple(events), n, lead_accel)


def lead_arrays(profile: LeadProfile, start_idx: int = 0,
                start_speed: float = BASE_SPEED_MS,
                start_pos: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Lead speed and position at every sample of the profile."""
    n = profile.n_samples
    speed = np.empty(n)
    speed[:] = start_speed
    for ev in profile.events:
        dur = ev.completion_idx - ev.onset_idx
        if dur > 0:
            ramp = np.linspace(ev.start_speed, ev.target_speed, dur + 1)
            speed[ev.onset_idx:ev.completion_idx + 1] = ramp
        speed[ev.completion_idx:] = ev.target_speed
    pos = np.empty(n)
    pos[0] = start_pos
    # semi-implicit: position advances on the new speed
    pos[1:] = start_pos + np.cumsum(speed[1:]) * DT
    return speed, pos


def realized_delta_s(speed: np.ndarray, ev: LeadEvent) -> float:
    """Relative distance the lead travels against its onset speed."""
    seg = speed[ev.onset_idx:ev.completion_idx + 1]
    if seg.size < 2:
        return 0.0
    return abs(float(np.sum(speed[ev.onset_idx] - seg[1:]) * DT))


def level_distance_summary(runs) -> dict[int, dict]:
    """Realized delta-s spread per n_level at both 4 and 4.1 sigma.

    The level distances are quoted as 4.1 sigma but described as a 96%
    area (about 4 sigma), so both summaries are reported; downstream
    analysis uses 4.1 sigma.  Repeats are excluded so the spread
    reflects the base schedule.
    """
    per: dict[int, list[float]] = {}
    for run in runs:
        per.setdefault(run.condition.n_level, []).extend(
            tr.delta_s for tr in run.trials if tr.repeat_of is None)
    out = {}
    for n, ds in sorted(per.items()):
        sd = float(np.std(ds))
        out[n] = {
            "four_sigma_m": 4.0 * sd,
            "four_point_one_sigma_m": 4.1 * sd,
            "nominal_m": NOMINAL_41_SIGMA.get(n),
            "n_trials": len(ds),
        }
    return out


@dataclass
class TrialRecord:
    trial_id: int
    kind: str
    delta_s: float
    mean_gap: float
    end_time: float
    response_onset: float | None = None
    collided: bool = False
    repeat_of: int | None = None
    repeat_id: int | None = None


@dataclass(frozen=True)
class DriverParams:
    """Delayed PD follower with perceptual noise and a capacity cap.

    The driver idles (pedal exactly zero) while the observed gap sits
    inside ``deadband`` of the target, so response onsets are cleanly
    detectable from the pedal trace.  A hysteresis band keeps it from
    chattering at the deadband edge once a correction has started.

    Perception is two-path: noticing a disturbance lags by
    ``reaction_delay``, but the closed loop then runs on observations
    only ``control_delay`` old.  Folding the full reaction delay into
    the loop would destabilize any usefully fast gain.

    Gap and closing speed are sensed on separate channels, each with
    its own slow noise wander.  Differentiating the noisy gap instead
    would put a sensing floor of several cm/s under the damping term
    and leave the driver hunting forever.
    """

    reaction_delay: float = 0.7
    control_delay: float = 0.1
    control_gain: float = 1.2
    damping_gain: float = 1.1
    deadband: float = 0.3
    rel_deadband: float = 0.4
    gap_noise_m: float = 0.02
    rel_noise_ms: float = 0.01
    noise_smoothing: float = 0.3
    capacity_cap: float = math.inf
    seed: int = 0
    control_dt: float = 0.1
    obs_smoothing: float = 0.7
    max_accel: float = 3.0
    max_brake: float = 6.0

    def __post_init__(self):
        if self.reaction_delay < 0 or self.control_gain < 0 or self.damping_gain < 0:
            raise ValueError("delay and gains must be >= 0")
        if self.deadband < 0:
            raise ValueError("deadband must be >= 0")


class SyntheticDriver:
    """Stateful pedal controller; one instance per run."""

    def __init__(self, params: DriverParams, s_level: float, rng: np.random.Generator):
        self.p = params
        self.s_level = s_level
        self.rng = rng
        self.slow_obs = s_level
        self.obs = s_level
        self.gap_noise = 0.0
        self.rel_noise = 0.0
        self.active = False
        self.window: list[float] = []
        self.window_len = max(2, int(round(1.0 / params.control_dt)))

    def reset(self) -> None:
        """Back to the idle state after a collision reset."""
        self.slow_obs = self.s_level
        self.obs = self.s_level
        self.gap_noise = 0.0
        self.rel_noise = 0.0
        self.active = False
        self.window.clear()

    def pedal(self, slow_gap: float, fast_gap: float, slow_rel: float,
              fast_rel: float) -> float:
        p = self.p
        # slow perceptual wander, not per-sample jitter
        if p.gap_noise_m > 0:
            self.gap_noise += p.noise_smoothing * (
                p.gap_noise_m * float(self.rng.standard_normal())
                - self.gap_noise)
            slow_gap = slow_gap + self.gap_noise
            fast_gap = fast_gap + self.gap_noise
        if p.rel_noise_ms > 0:
            self.rel_noise += p.noise_smoothing * (
                p.rel_noise_ms * float(self.rng.standard_normal())
                - self.rel_noise)
        self.slow_obs += p.obs_smoothing * (slow_gap - self.slow_obs)
        self.obs = p.obs_smoothing * fast_gap + (1.0 - p.obs_smoothing) * self.obs
        rate = fast_rel + self.rel_noise
        err = self.obs - self.s_level

        if not self.active:
            # looming (rel_deadband) triggers well before the gap itself has
            # drifted out of the deadband; without it a hard lead brake at
            # the closest s_level closes the gap before activation
            if (abs(self.slow_obs - self.s_level) > p.deadband
                    or abs(slow_rel + self.rel_noise) > p.rel_deadband):
                self.active = True
            else:
                return 0.0
        elif abs(err) < 0.04 and abs(rate) < 0.004:
            self.active = False
            return 0.0

        self.window.append(self.obs)
        if len(self.window) > self.window_len:
            self.window.pop(0)
        scale = 1.0
        if math.isfinite(p.capacity_cap) and len(self.window) >= 2:
            w = np.array(self.window)
            m = float(w.mean())
            if m > 0:
                surprise = (float(w.std()) / m) ** 2
                if surprise > p.capacity_cap > 0:
                    # attenuated response: left-over surprise goes unprocessed
                    scale = p.capacity_cap / surprise
        cmd = scale * (p.control_gain * err + p.damping_gain * rate)
        if cmd < 0:
            # brake pedal reaches max_brake at -1; halving keeps the loop
            # gain symmetric while leaving emergency braking headroom
            cmd *= p.max_accel / p.max_brake
        return min(1.0, max(-1.0, cmd))


@dataclass
class SimRun:
    """One (participant, condition) trace plus its trial ledger."""

    condition: Condition
    seed: int
    dt: float
    t: np.ndarray
    lead_pos: np.ndarray
    lead_speed: np.ndarray
    follow_pos: np.ndarray
    follow_speed: np.ndarray
    pedal: np.ndarray
    trial_id_col: np.ndarray
    phase_col: np.ndarray
    trials: list[TrialRecord]

    @property
    def gap(self) -> np.ndarray:
        return self.lead_pos - self.follow_pos


def _simulate_follower(lead_speed, lead_pos, s_level, driver, start_idx,
                       follow_speed, follow_pos, pedal_col, collisions):
    """March the PD follower over [start_idx, end); records collisions and
    resets the follower to the steady gap when they happen."""
    p = driver.p
    n = lead_speed.size
    ctrl = max(1, int(round(p.control_dt / DT)))
    slow_idx = int(round(p.reaction_delay / DT))
    fast_idx = int(round(p.control_delay / DT))
    j = start_idx
    while j < n - 1:
        si = max(0, j - slow_idx)
        fi = max(0, j - fast_idx)
        cmd = driver.pedal(lead_pos[si] - follow_pos[si],
                           lead_pos[fi] - follow_pos[fi],
                           lead_speed[si] - follow_speed[si],
                           lead_speed[fi] - follow_speed[fi])
        a_f = cmd * (p.max_accel if cmd >= 0 else p.max_brake)
        k = min(ctrl, n - 1 - j)
        v0 = follow_speed[j]
        steps = np.arange(1, k + 1)
        v = v0 + a_f * steps * DT
        if v[-1] < 0:
            v = np.maximum(v, 0.0)
            pos = follow_pos[j] + np.cumsum(v) * DT
        else:
            pos = follow_pos[j] + v0 * DT * steps + a_f * DT * DT * steps * (steps + 1) / 2
        sl = slice(j + 1, j + k + 1)
        follow_speed[sl] = v
        follow_pos[sl] = pos
        pedal_col[sl] = cmd
        gap_chunk = lead_pos[sl] - pos
        bad = np.flatnonzero(gap_chunk <= 0.0)
        if bad.size:
            c = j + 1 + int(bad[0])
            collisions.append(c)
            # the contact sample stays in the trace at gap 0; the world
            # resets to the steady gap on the following sample
            follow_pos[c] = lead_pos[c]
            follow_speed[c] = lead_speed[c]
            driver.reset()
            if c + 1 < n:
                follow_pos[c + 1] = lead_pos[c + 1] - s_level
                follow_speed[c + 1] = lead_speed[c + 1]
                pedal_col[c + 1] = 0.0
                j = c + 1
            else:
                j = c
        else:
            j += k


def _assemble_trials(events, lead_speed, gap, t, pedal_col, collisions,
                     onset_threshold, trial_id_col, phase_col,
                     repeat_of_map=None):
    trials = []
    coll = np.array(sorted(collisions), dtype=int)
    for i, ev in enumerate(events):
        end_idx = events[i + 1].onset_idx if i + 1 < len(events) else t.size - 1
        seg = slice(ev.onset_idx, end_idx)
        trial_id_col[seg] = i
        phase_col[ev.onset_idx:ev.completion_idx + 1] = \
            1 if ev.kind == "decel" else 2
        hit = coll[(coll >= ev.onset_idx) & (coll < end_idx)]
        rec = TrialRecord(
            trial_id=i,
            kind=ev.kind,
            delta_s=realized_delta_s(lead_speed, ev),
            mean_gap=float(gap[seg].mean()),
            end_time=float(t[end_idx]),
            collided=bool(hit.size),
            repeat_of=(repeat_of_map or {}).get(i),
        )
        rec.response_onset = detect_response_onset(
            t, pedal_col, float(t[ev.onset_idx]), rec.end_time,
            threshold=onset_threshold)
        trials.append(rec)
    return trials


def run_condition(cond: Condition, driver: DriverParams, seed: int,
                  trials_per_kind: int = 20, lead_accel: float = 3.0,
                  spacing_s: float = 8.0,
                  onset_threshold: float = 0.02) -> SimRun:
    """Full condition: base schedule plus one repeat per collided trial.

    Both cars start at cruise speed with the condition gap.  Repeats are
    appended after the base schedule; a repeat that collides again is not
    re-queued.
    """
    profile = generate_lead_profile(cond, trials_per_kind, seed,
                                    lead_accel=lead_accel,
                                    spacing_s=spacing_s)
    rng = np.random.default_rng((seed << 8) ^ driver.seed ^ 0x5EED)
    drv = SyntheticDriver(driver, cond.s_level, rng)

    events = list(profile.events)
    n = profile.n_samples
    lead_speed, lead_pos = lead_arrays(profile)
    follow_speed = np.empty(n)
    follow_pos = np.empty(n)
    pedal_col = np.zeros(n)
    follow_speed[0] = BASE_SPEED_MS
    follow_pos[0] = -cond.s_level
    collisions: list[int] = []
    _simulate_follower(lead_speed, lead_pos, cond.s_level, drv, 0,
                       follow_speed, follow_pos, pedal_col, collisions)

    # one repeat per collided base trial, appended at the schedule end
    gap = lead_pos - follow_pos
    t = np.arange(n) * DT
    trial_id_col = np.full(n, -1, dtype=int)
    phase_col = np.zeros(n, dtype=int)
    base_trials = _assemble_trials(events, lead_speed, gap, t, pedal_col,
                                   collisions, onset_threshold,
                                   trial_id_col, phase_col)
    to_repeat = [tr for tr in base_trials if tr.collided]
    if to_repeat:
        speed = events[-1].target_speed if events else BASE_SPEED_MS
        onset = n - 1 + _sec_to_idx(spacing_s)
        extra = []
        for tr in to_repeat:
            orig = events[tr.trial_id]
            dv = abs(orig.target_speed - orig.start_speed)
            if orig.kind == "decel":
                target = max(cond.speed_low, speed - dv)
            else:
                target = min(cond.speed_high, speed + dv)
            jitter = float(rng.uniform(-0.25, 0.25))
            dur = _sec_to_idx(abs(target - speed) / lead_accel)
            extra.append(LeadEvent(onset, onset + dur, orig.kind, speed, target))
            speed = target
            onset = max(onset + _sec_to_idx(spacing_s + jitter),
                        onset + dur + _sec_to_idx(0.3))
        n2 = extra[-1].completion_idx + _sec_to_idx(2.5) + 1
        prof2 = LeadProfile(tuple(events) + tuple(extra), n2, lead_accel)
        lead_speed, lead_pos = lead_arrays(prof2)
        fs2 = np.empty(n2); fp2 = np.empty(n2); pc2 = np.zeros(n2)
        fs2[:n] = follow_speed; fp2[:n] = follow_pos; pc2[:n] = pedal_col
        _simulate_follower(lead_speed, lead_pos, cond.s_level, drv, n - 1,
                           fs2, fp2, pc2, collisions)
        follow_speed, follow_pos, pedal_col = fs2, fp2, pc2
        n = n2
        events = list(prof2.events)
        gap = lead_pos - follow_pos
        t = np.arange(n) * DT
        trial_id_col = np.full(n, -1, dtype=int)
        phase_col = np.zeros(n, dtype=int)
        repeat_of = {len(profile.events) + k: tr.trial_id
                     for k, tr in enumerate(to_repeat)}
        trials = _assemble_trials(events, lead_speed, gap, t, pedal_col,
                                  collisions, onset_threshold,
                                  trial_id_col, phase_col, repeat_of)
        for rid, oid in repeat_of.items():
            trials[oid].repeat_id = rid
    else:
        trials = base_trials

    return SimRun(cond, seed, DT, t, lead_pos, lead_speed, follow_pos,
                  follow_speed, pedal_col, trial_id_col, phase_col, trials)


# ---------------------------------------------------------------------------
# Reference driver: consumed information equals the target law by construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReferenceDriverParams:
    """Target log-law and noise for the pipeline-recovery construction."""

    capacity_a: float = -0.02
    capacity_b: float = 0.25
    noise_sigma_bits: float = 0.02
    remain_base_bits: float = 0.05
    lead_accel: float = 6.0
    seed: int = 0


def _window_waveform(n_window: int) -> tuple[np.ndarray, float, float]:
    """Unit gap-dip waveform over an inclusive window.

    Zero at both edges (continuous joins), a smoothstep descent to a -1
    plateau, and a brief cosine-squared spike back above the plateau at
    the window center.  The spike pushes the window sigma up relative to
    the trough depth, so surprise values approaching 1 bit stay
    encodable without the gap collapsing.  Returns the samples with
    their discrete mean and population sigma.
    """
    tau = np.arange(n_window + 1) / n_window
    ramp = 0.1
    rise = np.clip(tau / ramp, 0.0, 1.0)
    fall = np.clip((1.0 - tau) / ramp, 0.0, 1.0)
    edge = np.minimum(rise, fall)
    plateau = edge * edge * (3.0 - 2.0 * edge)  # smoothstep
    half = 0.15
    z = np.clip(np.abs(tau - 0.5) / half, 0.0, 1.0)
    spike = np.cos(0.5 * np.pi * z) ** 2
    u = -plateau + 1.5 * spike
    return u, float(u.mean()), float(u.std())


def run_reference_condition(cond: Condition, params: ReferenceDriverParams,
                            seed: int, trials_per_kind: int = 20) -> SimRun:
    """Synthesize a trace whose measured consumed info per decel trial is
    a + b*log2(delta_s/mean_gap + 1) + N(0, noise) by construction.

    Each decel trial gets two cosine dips in the gap: one filling the
    1-second window that ends at the (synthesized) response onset, one
    filling the window that ends at the trial end.  Dip amplitudes are
    solved so the window noise-to-signal ratios encode the stimulus and
    remaining bits exactly.
    """
    profile = generate_lead_profile(
        cond, trials_per_kind, seed, lead_accel=params.lead_accel,
        spacing_s=3.0, jitter_s=0.25, min_gap_after_s=1.5, tail_s=3.0)
    rng = np.random.default_rng((seed << 8) ^ params.seed ^ 0xAEF)
    n = profile.n_samples
    lead_speed, lead_pos = lead_arrays(profile)
    t = np.arange(n) * DT
    gap = np.full(n, cond.s_level)
    pedal_col = np.zeros(n)
    trial_id_col = np.full(n, -1, dtype=int)
    phase_col = np.zeros(n, dtype=int)

    win = _sec_to_idx(1.0)
    u, u_mean, u_sigma = _window_waveform(win)
    events = list(profile.events)
    trials: list[TrialRecord] = []

    for i, ev in enumerate(events):
        o = ev.onset_idx
        e = events[i + 1].onset_idx if i + 1 < len(events) else n - 1
        seg = slice(o, e)
        trial_id_col[seg] = i
        phase_col[o:ev.completion_idx + 1] = 1 if ev.kind == "decel" else 2
        delta_s = realized_delta_s(lead_speed, ev)
        end_time = float(t[e])

        if ev.kind != "decel":
            trials.append(TrialRecord(i, ev.kind, delta_s, cond.s_level,
                                      end_time))
            continue

        t1 = o + win  # response one second after the event onset
        eps = min(0.06, max(-0.06, params.noise_sigma_bits
                            * float(rng.standard_normal())))
        # dip amplitudes shift the trial mean, which feeds back into the
        # target through x = delta_s / mean_gap: iterate to a fixed point
        amp_s = amp_r = 0.0
        trial_len = e - o
        u_sum = float(u.sum())
        for _ in range(60):
            mean_gap = cond.s_level + (amp_s + amp_r) * u_sum / trial_len
            x = delta_s / mean_gap
            target = params.capacity_a + params.capacity_b * math.log2(x + 1.0) + eps
            stim = max(target, 0.0) + params.remain_base_bits
            rem = params.remain_base_bits + max(-target, 0.0)
            new_s = _dip_amplitude(stim, cond.s_level, u_mean, u_sigma,
                                   float(u.min()))
            new_r = _dip_amplitude(rem, cond.s_level, u_mean, u_sigma,
                                   float(u.min()))
            if abs(new_s - amp_s) < 1e-12 and abs(new_r - amp_r) < 1e-12:
                break
            amp_s, amp_r = new_s, new_r
        gap[o:o + win + 1] += amp_s * u
        gap[e - win:e + 1] += amp_r * u
        pedal_col[t1:min(e, t1 + _sec_to_idx(0.6))] = -0.4
        mean_gap = float(gap[seg].mean())
        trials.append(TrialRecord(i, ev.kind, delta_s, mean_gap, end_time,
                                  response_onset=float(t[t1])))

    follow_pos = lead_pos - gap
    follow_speed = np.empty(n)
    follow_speed[0] = lead_speed[0]
    follow_speed[1:] = np.diff(follow_pos) / DT
    return SimRun(cond, seed, DT, t, lead_pos, lead_speed, follow_pos,
                  follow_speed, pedal_col, trial_id_col, phase_col, trials)


def _dip_amplitude(bits: float, base_gap: float, u_mean: float,
                   u_sigma: float, u_min: float = -1.0) -> float:
    """Amplitude A with (A*sigma_u / (G + A*mean_u))^2 == bits; mean_u < 0."""
    if bits <= 0:
        return 0.0
    r = math.sqrt(bits)
    amp = r * base_gap / (u_sigma - r * u_mean)
    if base_gap + amp * u_min <= 0:  # dip trough is G + A*min(u)
        raise ValueError(
            f"reference dip of {bits:.3f} bits collapses a {base_gap} m gap")
    return amp
