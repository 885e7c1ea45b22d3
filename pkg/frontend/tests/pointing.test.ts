import { describe, expect, it } from "vitest";

import {
  clickHistogram,
  hitTest,
  initialState,
  makeTask,
  registerClick,
  targetCenters,
} from "../src/pointing.js";

describe("pointing geometry", () => {
  it("places targets amplitude apart", () => {
    const [l, r] = targetCenters(makeTask(7, 1));
    expect(r - l).toBe(7);
    expect(l).toBe(-3.5);
  });

  it("hit test is inclusive of the target edge", () => {
    expect(hitTest(3.5, 3.5, 1)).toBe(true);
    expect(hitTest(4.0, 3.5, 1)).toBe(true);
    expect(hitTest(4.01, 3.5, 1)).toBe(false);
  });

  it("rejects degenerate tasks", () => {
    expect(() => makeTask(0, 1)).toThrow();
    expect(() => makeTask(7, -1)).toThrow();
  });

  it("alternates the active target on every click, hit or miss", () => {
    const task = makeTask(7, 1);
    let state = initialState();
    expect(state.active).toBe(1);
    state = registerClick(task, state, 0.5, 3.5); // hit right
    expect(state.active).toBe(0);
    expect(state.clicks[0]!.hit).toBe(true);
    state = registerClick(task, state, 1.1, 0.0); // miss left
    expect(state.active).toBe(1);
    expect(state.clicks[1]!.hit).toBe(false);
  });

  it("builds a click-location histogram", () => {
    const clicks = [
      { t: 0, x: 3.4, hit: true },
      { t: 1, x: 3.6, hit: true },
      { t: 2, x: -3.5, hit: true },
    ];
    const bins = clickHistogram(clicks, 0.5);
    const total = bins.reduce((acc, b) => acc + b.count, 0);
    expect(total).toBe(3);
    expect(bins[0]!.x0).toBeLessThan(0);
    expect(() => clickHistogram(clicks, 0)).toThrow();
  });
});
