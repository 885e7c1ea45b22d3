/**
 * Reciprocal pointing tasklet: two targets of width W separated by
 * amplitude A, clicks alternate between them.  This module holds only
 * geometry and bookkeeping; ID and throughput shown after a block come
 * from the service summary.
 */

export interface PointingTask {
  amplitude: number;
  width: number;
}

export interface ClickEvent {
  t: number;
  x: number;
  hit: boolean;
}

export interface PointingState {
  clicks: ClickEvent[];
  /** index of the target the next click should land on (0 left, 1 right) */
  active: 0 | 1;
}

export function makeTask(amplitude: number, width: number): PointingTask {
  if (!(amplitude > 0) || !(width > 0)) {
    throw new Error(`amplitude and width must be > 0, got ${amplitude}, ${width}`);
  }
  return { amplitude, width };
}

export function targetCenters(task: PointingTask): [number, number] {
  return [-task.amplitude / 2, task.amplitude / 2];
}

export function initialState(): PointingState {
  return { clicks: [], active: 1 };
}

export function hitTest(x: number, center: number, width: number): boolean {
  return Math.abs(x - center) <= width / 2;
}

/** Register a click at cursor x; alternates the active target either way. */
export function registerClick(
  task: PointingTask,
  state: PointingState,
  t: number,
  x: number,
): PointingState {
  const center = targetCenters(task)[state.active];
  const hit = hitTest(x, center, task.width);
  return {
    clicks: [...state.clicks, { t, x, hit }],
    active: state.active === 0 ? 1 : 0,
  };
}

export interface HistogramBin {
  x0: number;
  x1: number;
  count: number;
}

/** Click-location histogram rendered after a block. */
export function clickHistogram(
  clicks: ClickEvent[],
  binWidth: number,
): HistogramBin[] {
  if (!(binWidth > 0)) throw new Error(`binWidth must be > 0, got ${binWidth}`);
  const counts = new Map<number, number>();
  for (const c of clicks) {
    const k = Math.floor(c.x / binWidth);
    counts.set(k, (counts.get(k) ?? 0) + 1);
  }
  return [...counts.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([k, count]) => ({ x0: k * binWidth, x1: (k + 1) * binWidth, count }));
}
