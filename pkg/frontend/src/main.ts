/**
 * Tasklet entry point.  URL query parameters select and configure the
 * task: task=carfollow|pointing, amplitude, width, s_level, port (the
 * WebSocket bridge port of the service).  Samples stream at 60 Hz; every
 * displayed bit value comes back from the service.
 */

import { SessionClient, WebSocketTransport } from "./client.js";
import {
  CarWorld,
  collided,
  DT,
  flashOnCollision,
  gapOf,
  initialWorld,
  instruction,
  pedalFromKeys,
  stepWorld,
} from "./carfollow.js";
import {
  clickHistogram,
  initialState,
  makeTask,
  registerClick,
  PointingState,
} from "./pointing.js";
import {
  drawBanner,
  drawCarScene,
  drawHistogram,
  drawMetricMeter,
  drawPointingScene,
  HEIGHT,
  WIDTH,
} from "./render.js";

const BASE_SPEED = 27.0; // m/s
const PX_PER_UNIT = 60;

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

function setupCanvas(): CanvasRenderingContext2D {
  const canvas = document.getElementById("stage") as HTMLCanvasElement;
  canvas.width = WIDTH;
  canvas.height = HEIGHT;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d canvas unavailable");
  return ctx;
}

function runCarfollow(client: SessionClient, ctx: CanvasRenderingContext2D, sLevel: number): void {
  let world: CarWorld = initialWorld(sLevel, BASE_SPEED);
  let flashUntil = -1;
  const keys = { up: false, down: false };
  window.addEventListener("keydown", (e) => {
    if (e.key === "ArrowUp") keys.up = true;
    if (e.key === "ArrowDown") keys.down = true;
  });
  window.addEventListener("keyup", (e) => {
    if (e.key === "ArrowUp") keys.up = false;
    if (e.key === "ArrowDown") keys.down = false;
  });

  void client.declare({
    task_kind: "car-following",
    s_level: sLevel,
    window_s: 1.0,
    rate_hz: 1 / DT,
  });

  let acc = 0;
  let last = performance.now();
  const frame = (now: number) => {
    acc += Math.min(now - last, 250) / 1000;
    last = now;
    while (acc >= DT) {
      acc -= DT;
      world = stepWorld(world, pedalFromKeys(keys.up, keys.down));
      if (collided(gapOf(world))) {
        flashUntil = flashOnCollision(world.t).until;
        world = initialWorld(sLevel, BASE_SPEED);
        world.t = flashUntil; // keep time monotone across the reset
      }
      if (!client.closed) client.sample(world.t, gapOf(world), "car-following");
    }
    const gap = gapOf(world);
    drawCarScene(ctx, gap, sLevel, instruction(gap, sLevel), world.t < flashUntil);
    drawMetricMeter(ctx, client.lastMetric);
    if (client.closed) drawBanner(ctx, "service unreachable: input disabled");
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

function runPointing(
  client: SessionClient,
  ctx: CanvasRenderingContext2D,
  amplitude: number,
  width: number,
): void {
  const task = makeTask(amplitude, width);
  let state: PointingState = initialState();
  let cursorX = 0;
  let t = 0;
  let summaryText: string[] = [];

  void client.declare({ task_kind: "pointing", amplitude, width, window_s: 1.0, rate_hz: 1 / DT });

  window.addEventListener("mousemove", (e) => {
    cursorX = (e.clientX - WIDTH / 2) / PX_PER_UNIT;
  });
  window.addEventListener("mousedown", () => {
    if (client.closed) return;
    state = registerClick(task, state, t, cursorX);
    const c = state.clicks[state.clicks.length - 1]!;
    client.click(c.t, c.hit);
  });
  window.addEventListener("keydown", (e) => {
    if (e.key !== "Enter" || client.closed) return;
    void client.end().then((summary) => {
      // block numbers displayed verbatim from the service summary
      summaryText = summary.blocks.map(
        (b) =>
          `ID ${b.id_bits.toFixed(3)} bits  throughput ` +
          `${b.throughput_bps === null ? "--" : b.throughput_bps.toFixed(3)} bits/s  ` +
          `errors ${(100 * b.error_rate).toFixed(1)}%`,
      );
    });
  });

  let acc = 0;
  let last = performance.now();
  const frame = (now: number) => {
    acc += Math.min(now - last, 250) / 1000;
    last = now;
    while (acc >= DT) {
      acc -= DT;
      t += DT;
      if (!client.closed && client.summary === null) {
        client.sample(t, cursorX, "pointing");
      }
    }
    drawPointingScene(ctx, task, cursorX, state.active, PX_PER_UNIT);
    drawMetricMeter(ctx, client.lastMetric);
    if (client.summary !== null) {
      drawHistogram(ctx, clickHistogram(state.clicks, width / 4), PX_PER_UNIT);
      ctx.fillStyle = "#e8e8e8";
      ctx.font = "18px monospace";
      summaryText.forEach((l, i) => ctx.fillText(l, 24, HEIGHT - 80 + 24 * i));
    }
    if (client.closed) drawBanner(ctx, "service unreachable: input disabled");
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

export function start(): void {
  const ctx = setupCanvas();
  const port = parseInt(param("port", "8766"), 10);
  const ws = new WebSocket(`ws://127.0.0.1:${port}`);
  const client = new SessionClient(new WebSocketTransport(ws));
  const task = param("task", "carfollow");
  if (task === "pointing") {
    runPointing(
      client,
      ctx,
      parseFloat(param("amplitude", "7")),
      parseFloat(param("width", "1")),
    );
  } else {
    runCarfollow(client, ctx, parseFloat(param("s_level", "4.84")));
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.addEventListener("DOMContentLoaded", start);
}
