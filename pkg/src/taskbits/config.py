"""Study configuration: defaults plus JSON overrides."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass


class ConfigError(ValueError):
    """Bad or unknown configuration value."""


@dataclass(frozen=True)
class RunConfig:
    """One full study: the condition grid, cohort size, and all
    measurement-pipeline knobs with their default values."""

    s_levels: tuple[float, ...] = (2.84, 4.84, 6.84, 8.84)
    n_levels: tuple[int, ...] = (1, 2, 3)
    participants: int = 15
    trials_per_kind: int = 20
    master_seed: int = 0
    window_s: float = 1.0
    bin_capacity: float = 0.05
    bin_error: float = 0.5
    onset_threshold: float = 0.02
    lead_accel: float = 3.0
    driver: str = "synthetic"  # "synthetic" | "reference"
    reaction_delay: float = 0.7
    control_gain: float = 1.2
    damping_gain: float = 1.1
    gap_noise_m: float = 0.02
    rel_noise_ms: float = 0.01
    capacity_cap: float = float("inf")

    def __post_init__(self):
        if self.participants < 1:
            raise ConfigError(f"participants must be >= 1, got {self.participants}")
        if self.trials_per_kind < 1:
            raise ConfigError(f"trials_per_kind must be >= 1, got {self.trials_per_kind}")
        if self.window_s <= 0 or self.bin_capacity <= 0 or self.bin_error <= 0:
            raise ConfigError("window and bin widths must be > 0")
        if self.driver not in ("synthetic", "reference"):
            raise ConfigError(f"unknown driver {self.driver!r}")

    def conditions(self):
        from .sim import Condition
        return [Condition(s, n) for s in self.s_levels for n in self.n_levels]

    def seed_for(self, participant: int, condition_index: int) -> int:
        # deterministic per-cell stream: no overlap across the grid
        return self.master_seed + participant * 10007 + condition_index


def load_config(path: str | None, **overrides) -> RunConfig:
    """Build a RunConfig from an optional JSON file plus keyword overrides.

    Unknown keys in either source are an error; list values become
    tuples so the result stays hashable.
    """
    raw: dict = {}
    if path is not None:
        with open(path) as f:
            try:
                raw = json.load(f)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be an object")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    names = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(raw) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("s_levels", "n_levels"):
        if key in raw and isinstance(raw[key], list):
            raw[key] = tuple(raw[key])
    return RunConfig(**raw)
