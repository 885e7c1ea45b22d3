/**
 * End-to-end checks against a real service process: protocol behavior
 * through the SessionClient, and the UI-fidelity acceptance criterion
 * (live pointing throughput vs offline re-analysis of the recorded
 * session; carfollow instruction state vs bar/bumper geometry).
 */

import fs from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionClient } from "../src/client.js";
import { apparentWidth, barWidth, BUMPER_WIDTH_M, instruction } from "../src/carfollow.js";
import { connect, Service, startService } from "./helpers.js";

const SRC_DIR = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "src");

let service: Service;

beforeAll(async () => {
  service = await startService();
}, 30000);

afterAll(() => {
  service?.stop();
});

async function newClient(): Promise<SessionClient> {
  return new SessionClient(await connect(service.port));
}

describe("session client against the live service", () => {
  it("declares and receives an ack metric", async () => {
    const client = await newClient();
    const ack = await client.declare({ task_kind: "car-following", s_level: 4.84 });
    expect(ack.type).toBe("metric");
    client.close();
  });

  it("constant gap drives surprise to zero", async () => {
    const client = await newClient();
    await client.declare({ task_kind: "car-following", s_level: 4.84, window_s: 1.0 });
    let last: Awaited<ReturnType<typeof client.sampleAwaited>> | null = null;
    for (let i = 0; i < 120; i++) {
      last = await client.sampleAwaited(i / 60, 4.84, "car-following");
    }
    expect(last!.type).toBe("metric");
    if (last!.type === "metric") expect(last!.surprise_bits).toBeLessThan(1e-9);
    client.close();
  });

  it("flags gap collapse as a collision", async () => {
    const client = await newClient();
    await client.declare({ task_kind: "car-following", s_level: 4.84 });
    const m = await client.sampleAwaited(0.1, 0, "car-following");
    expect(m.type).toBe("metric");
    if (m.type === "metric") {
      expect(m.collision_flag).toBe(true);
      expect(m.unbounded).toBe(true);
    }
    client.close();
  });
});

describe("UI fidelity", () => {
  it("live pointing throughput matches offline re-analysis of the record", async () => {
    const label = "9 pointing throughput live vs offline, bar/bumper instruction";
    try {
      const amplitude = 7;
      const width = 1;
      const client = await newClient();
      await client.declare({ task_kind: "pointing", amplitude, width, window_s: 1.0 });

      // scripted reciprocal session at 60 Hz; clicks every ~0.8 s, two misses
      let side = 1;
      const clickTimes: number[] = [];
      for (let i = 1; i <= 600; i++) {
        const t = i / 60;
        client.sample(t, side * 3.5 * Math.sin((Math.PI * (t % 0.8)) / 0.8), "pointing");
        if (i % 48 === 0) {
          const nClick = clickTimes.length;
          client.click(t, nClick !== 3 && nClick !== 7);
          clickTimes.push(t);
          side = -side;
        }
      }
      const summary = await client.end();
      client.close();
      expect(summary.blocks.length).toBe(1);
      const live = summary.blocks[0]!;

      // offline re-analysis from the recorded session lines only
      const clicks = client.sentLines
        .map((l) => JSON.parse(l))
        .filter((r) => r.type === "click");
      expect(clicks.length).toBe(clickTimes.length);
      const mts: number[] = [];
      for (let i = 1; i < clicks.length; i++) mts.push(clicks[i].t - clicks[i - 1].t);
      const meanMt = mts.reduce((a, b) => a + b, 0) / mts.length;
      const idBits = Math.log2(amplitude / width + 1);
      const offlineThroughput = idBits / meanMt;
      const offlineErrRate = clicks.filter((r) => !r.hit).length / clicks.length;

      expect(Math.abs(live.throughput_bps! - offlineThroughput)).toBeLessThan(1e-6);
      expect(Math.abs(live.id_bits - idBits)).toBeLessThan(1e-6);
      expect(Math.abs(live.error_rate - offlineErrRate)).toBeLessThan(1e-12);

      // carfollow aid: accelerate iff the bar is wider than the bumper
      for (let i = 0; i < 400; i++) {
        const sLevel = 2.84 + 6 * ((i * 37) % 89) / 89;
        const gap = 0.25 + 18 * ((i * 41) % 103) / 103;
        const wider = barWidth(sLevel) > apparentWidth(BUMPER_WIDTH_M, gap);
        expect(instruction(gap, sLevel) === "accelerate").toBe(wider);
      }
      console.log(`ACCEPTANCE ${label}: PASS`);
    } catch (err) {
      console.log(`ACCEPTANCE ${label}: FAIL`);
      throw err;
    }
  }, 30000);

  it("UI modules do no local bit math", () => {
    for (const name of ["carfollow.ts", "pointing.ts", "render.ts", "main.ts"]) {
      const text = fs.readFileSync(path.join(SRC_DIR, name), "utf8");
      expect(text.includes("log2"), `${name} must not compute bits locally`).toBe(false);
    }
  });
});
