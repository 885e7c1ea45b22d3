/** Canvas drawing helpers; values to display arrive pre-computed. */

import { apparentWidth, barWidth, BUMPER_WIDTH_M, Instruction } from "./carfollow.js";
import { MetricRecord } from "./protocol.js";
import { HistogramBin, PointingTask, targetCenters } from "./pointing.js";

export const WIDTH = 960;
export const HEIGHT = 540;

function fmt(v: number | null): string {
  return v === null ? "--" : v.toFixed(3);
}

export function drawCarScene(
  ctx: CanvasRenderingContext2D,
  gap: number,
  sLevel: number,
  instr: Instruction,
  flash: boolean,
): void {
  ctx.fillStyle = flash ? "#5a1111" : "#101418";
  ctx.fillRect(0, 0, WIDTH, HEIGHT);

  const cx = WIDTH / 2;
  const horizon = HEIGHT * 0.45;
  ctx.strokeStyle = "#3a4149";
  ctx.beginPath();
  ctx.moveTo(0, horizon);
  ctx.lineTo(WIDTH, horizon);
  ctx.stroke();

  // lead car bumper, perspective-scaled by the current gap
  const bumperPx = Math.min(apparentWidth(BUMPER_WIDTH_M, gap), WIDTH);
  const bumperH = Math.min(bumperPx * 0.28, HEIGHT * 0.3);
  ctx.fillStyle = "#c23b3b";
  ctx.fillRect(cx - bumperPx / 2, horizon - bumperH, bumperPx, bumperH);

  // fixed-width matching bar just below the horizon
  const barPx = Math.min(barWidth(sLevel), WIDTH);
  ctx.fillStyle = "#3ba2c2";
  ctx.fillRect(cx - barPx / 2, horizon + 18, barPx, 14);

  ctx.fillStyle = "#e8e8e8";
  ctx.font = "20px system-ui, sans-serif";
  ctx.fillText(`gap ${gap.toFixed(2)} m`, 24, 36);
  ctx.fillText(instr.toUpperCase(), cx - 50, horizon + 70);
}

export function drawMetricMeter(
  ctx: CanvasRenderingContext2D,
  metric: MetricRecord | null,
): void {
  ctx.fillStyle = "#e8e8e8";
  ctx.font = "16px monospace";
  const lines =
    metric === null
      ? ["surprise --", "remaining --"]
      : metric.unbounded
        ? ["surprise UNBOUNDED", "remaining --"]
        : [
            `surprise ${fmt(metric.surprise_bits)} bits`,
            `remaining ${fmt(metric.remaining_bits)} bits`,
          ];
    lines.forEach((l, i) => ctx.fillText(l, WIDTH - 280, 36 + 22 * i));

  if (metric !== null && metric.remaining_bits !== null) {
    const frac = Math.max(0, Math.min(1, metric.remaining_bits));
    ctx.strokeStyle = "#e8e8e8";
    ctx.strokeRect(WIDTH - 280, 84, 200, 12);
    ctx.fillStyle = frac > 0.2 ? "#4fae57" : "#c2a23b";
    ctx.fillRect(WIDTH - 280, 84, 200 * frac, 12);
  }
}

export function drawPointingScene(
  ctx: CanvasRenderingContext2D,
  task: PointingTask,
  cursorX: number,
  active: 0 | 1,
  pxPerUnit: number,
): void {
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, 0, WIDTH, HEIGHT);
  const cy = HEIGHT / 2;
  const centers = targetCenters(task);
  centers.forEach((c, i) => {
    ctx.fillStyle = i === active ? "#4fae57" : "#3a4149";
    const w = task.width * pxPerUnit;
    ctx.fillRect(WIDTH / 2 + c * pxPerUnit - w / 2, cy - 60, w, 120);
  });
  ctx.strokeStyle = "#e8e8e8";
  ctx.beginPath();
  ctx.moveTo(WIDTH / 2 + cursorX * pxPerUnit, cy - 80);
  ctx.lineTo(WIDTH / 2 + cursorX * pxPerUnit, cy + 80);
  ctx.stroke();
}

export function drawHistogram(
  ctx: CanvasRenderingContext2D,
  bins: HistogramBin[],
  pxPerUnit: number,
): void {
  if (bins.length === 0) return;
  const peak = Math.max(...bins.map((b) => b.count));
  const base = HEIGHT - 30;
  ctx.fillStyle = "#7a86c2";
  for (const b of bins) {
    const h = (b.count / peak) * 90;
    ctx.fillRect(
      WIDTH / 2 + b.x0 * pxPerUnit,
      base - h,
      Math.max(1, (b.x1 - b.x0) * pxPerUnit - 1),
      h,
    );
  }
}

export function drawBanner(ctx: CanvasRenderingContext2D, text: string): void {
  ctx.fillStyle = "#5a1111";
  ctx.fillRect(0, 0, WIDTH, 44);
  ctx.fillStyle = "#ffffff";
  ctx.font = "20px system-ui, sans-serif";
  ctx.fillText(text, 24, 29);
}
