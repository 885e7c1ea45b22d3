#!/usr/bin/env python3
"""Print the closed-form law tables the package derives from one model.

Three views of the same capacity-limited correction loop:
  - aimed movement: error halving to a target of width W at distance A
  - choice: halving over n+1 alternatives
  - learning: remaining entropy under a linearly growing SNR schedule
"""

import math

from taskbits.laws import (FittsTask, HickTask, LearningSchedule,
                           fitts_capacity, fitts_run, hick_capacity,
                           hick_select, power_law_run)
from taskbits.surprise import CapacityParams

UNIT = CapacityParams(a=0.0, b=1.0)


def main() -> int:
    print("aimed movement: steps to target vs difficulty")
    print("  A/W      ID bits  steps  edges")
    for ratio in (1, 3, 7, 15, 31):
        task = FittsTask(float(ratio), 1.0)
        traj = fitts_run(task)
        edges = ",".join(f"{e:g}" for e in traj.edges[1:])
        print(f"  {ratio:5d}  {fitts_capacity(task, UNIT):8.3f}"
              f"  {traj.steps:5d}  {edges}")

    print("\nchoice: halving steps over n alternatives")
    print("  n   capacity bits  worst-case steps")
    for n in (2, 4, 7, 8, 15, 16):
        steps = max(hick_select(n, t) for t in range(1, n + 1))
        print(f"  {n:2d}  {hick_capacity(HickTask(n)):13.3f}  {steps:5d}")

    print("\nlearning: remaining entropy, a=10 b=1, snr(x)=x")
    sched = LearningSchedule(trials=1025, snr_of_trial=lambda x: float(x),
                             a=10.0, b=1.0)
    marks = {1, 2, 4, 16, 64, 256, 1023, 1024}
    for x, h in power_law_run(sched):
        if x in marks:
            print(f"  trial {x:5d}  H={h:.4f} bits"
                  + ("   <- a - b*log2(snr) hits zero" if h == 0.0 else ""))
    # sanity: zero crossing sits at snr = 2**(a/b)
    assert 2 ** (10.0 / 1.0) == 1024
    assert math.log2(1024) == 10
    return 0


if __name__ == "__main__":
    import sys
    sys.exit(main())
