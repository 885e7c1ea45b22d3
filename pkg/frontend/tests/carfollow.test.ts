import { describe, expect, it } from "vitest";

import {
  apparentWidth,
  barWidth,
  BUMPER_WIDTH_M,
  collided,
  DT,
  gapOf,
  initialWorld,
  instruction,
  MAX_ACCEL,
  MAX_BRAKE,
  pedalFromKeys,
  stepWorld,
} from "../src/carfollow.js";

describe("world physics", () => {
  it("starts at the goal gap with matched speeds", () => {
    const w = initialWorld(4.84, 27);
    expect(gapOf(w)).toBeCloseTo(4.84, 12);
    expect(w.followSpeed).toBe(w.leadSpeed);
  });

  it("uses semi-implicit Euler with asymmetric pedal authority", () => {
    const w0 = initialWorld(4.84, 27);
    const up = stepWorld(w0, 1);
    expect(up.followSpeed).toBeCloseTo(27 + MAX_ACCEL * DT, 12);
    expect(up.followPos).toBeCloseTo(w0.followPos + up.followSpeed * DT, 12);
    const down = stepWorld(w0, -1);
    expect(down.followSpeed).toBeCloseTo(27 - MAX_BRAKE * DT, 12);
  });

  it("never reverses", () => {
    let w = initialWorld(4.84, 0.05);
    for (let i = 0; i < 120; i++) w = stepWorld(w, -1);
    expect(w.followSpeed).toBe(0);
  });

  it("maps keys to a three-state pedal", () => {
    expect(pedalFromKeys(true, false)).toBe(1);
    expect(pedalFromKeys(false, true)).toBe(-1);
    expect(pedalFromKeys(true, true)).toBe(0);
    expect(pedalFromKeys(false, false)).toBe(0);
  });

  it("flags collisions at contact", () => {
    expect(collided(0)).toBe(true);
    expect(collided(0.01)).toBe(false);
  });
});

describe("bar-matching aid", () => {
  it("accelerate state holds exactly when the bar is wider than the bumper", () => {
    for (let i = 0; i < 500; i++) {
      const sLevel = 2 + 8 * ((i * 29) % 97) / 97;
      const gap = 0.5 + 15 * ((i * 31) % 101) / 101;
      const wider = barWidth(sLevel) > apparentWidth(BUMPER_WIDTH_M, gap);
      expect(instruction(gap, sLevel) === "accelerate").toBe(wider);
    }
  });

  it("bar equals bumper at the goal gap", () => {
    expect(barWidth(4.84)).toBeCloseTo(apparentWidth(BUMPER_WIDTH_M, 4.84), 12);
    expect(instruction(4.84, 4.84)).toBe("hold");
    expect(instruction(10, 4.84)).toBe("accelerate");
    expect(instruction(2, 4.84)).toBe("decelerate");
  });
});
