/**
 * Session client over an injectable line transport.  The browser build
 * uses the WebSocket bridge of the service; tests inject a raw TCP
 * transport.  Every outbound line is recorded so a session can be
 * re-analyzed offline record-for-record.
 */

import {
  ClientRecord,
  DeclareRecord,
  ErrorRecord,
  LineSplitter,
  MetricRecord,
  parseServerRecord,
  SCHEMA_VERSION,
  ServerRecord,
  SummaryRecord,
  TaskKind,
  encodeRecord,
} from "./protocol.js";

export interface LineTransport {
  send(line: string): void;
  onLine(cb: (line: string) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export class WebSocketTransport implements LineTransport {
  private readonly splitter = new LineSplitter();
  private lineCb: ((line: string) => void) | null = null;
  private closeCb: (() => void) | null = null;
  private readonly queue: string[] = [];
  private open = false;

  constructor(private readonly ws: WebSocket) {
    ws.onopen = () => {
      this.open = true;
      for (const line of this.queue.splice(0)) ws.send(line);
    };
    ws.onmessage = (ev) => {
      // the bridge strips the trailing newline from each frame
      const text = typeof ev.data === "string" ? ev.data : "";
      for (const line of this.splitter.push(text + "\n")) {
        this.lineCb?.(line);
      }
    };
    ws.onclose = () => this.closeCb?.();
    ws.onerror = () => this.closeCb?.();
  }

  send(line: string): void {
    if (this.open) this.ws.send(line);
    else this.queue.push(line);
  }

  onLine(cb: (line: string) => void): void {
    this.lineCb = cb;
  }

  onClose(cb: () => void): void {
    this.closeCb = cb;
  }

  close(): void {
    this.ws.close();
  }
}

export interface DeclareFields {
  task_kind: TaskKind;
  window_s?: number;
  capacity_a?: number;
  capacity_b?: number;
  s_level?: number;
  amplitude?: number;
  width?: number;
  rate_hz?: number;
}

const METRIC_HISTORY = 600;

// Omit must distribute over the record union, not collapse it
type Outbound<T> = T extends { seq: number } ? Omit<T, "seq"> : never;

export class SessionClient {
  /** Every line sent, verbatim, for offline re-analysis. */
  readonly sentLines: string[] = [];
  /** Metric history as received; the UI renders these values only. */
  readonly metrics: MetricRecord[] = [];
  lastMetric: MetricRecord | null = null;
  lastError: ErrorRecord | null = null;
  summary: SummaryRecord | null = null;
  closed = false;

  private seq = 0;
  private readonly waiters = new Map<number, (rec: ServerRecord) => void>();
  private readonly splitter = new LineSplitter();

  constructor(private readonly transport: LineTransport) {
    transport.onLine((line) => this.dispatch(line));
    transport.onClose(() => {
      this.closed = true;
      for (const resolve of this.waiters.values()) {
        resolve({ type: "error", seq: null, message: "connection closed" });
      }
      this.waiters.clear();
    });
  }

  private dispatch(line: string): void {
    const rec = parseServerRecord(line);
    if (rec.type === "metric") {
      this.lastMetric = rec;
      this.metrics.push(rec);
      if (this.metrics.length > METRIC_HISTORY) this.metrics.shift();
    } else if (rec.type === "error") {
      this.lastError = rec;
    } else {
      this.summary = rec;
    }
    if (rec.seq !== null && rec.seq !== undefined) {
      const waiter = this.waiters.get(rec.seq);
      if (waiter) {
        this.waiters.delete(rec.seq);
        waiter(rec);
      }
    }
  }

  private post(rec: Outbound<ClientRecord>): number {
    const seq = ++this.seq;
    const line = encodeRecord({ ...rec, seq } as ClientRecord);
    this.sentLines.push(line);
    this.transport.send(line);
    return seq;
  }

  private request(rec: Outbound<ClientRecord>): Promise<ServerRecord> {
    return new Promise((resolve) => {
      const seq = this.post(rec);
      this.waiters.set(seq, resolve);
    });
  }

  declare(fields: DeclareFields): Promise<ServerRecord> {
    return this.request({ type: "declare", schema: SCHEMA_VERSION, ...fields });
  }

  /** Fire-and-forget; the metric reply lands in `metrics` on arrival. */
  sample(t: number, value: number, kind: TaskKind): number {
    return kind === "car-following"
      ? this.post({ type: "sample", t, gap: value })
      : this.post({ type: "sample", t, x: value });
  }

  sampleAwaited(t: number, value: number, kind: TaskKind): Promise<ServerRecord> {
    return kind === "car-following"
      ? this.request({ type: "sample", t, gap: value })
      : this.request({ type: "sample", t, x: value });
  }

  click(t: number, hit: boolean): number {
    return this.post({ type: "click", t, hit });
  }

  trial(fields: {
    trial_id: number;
    kind: "decel" | "accel";
    delta_s: number;
    mean_gap: number;
    response_onset: number | null;
    end_time: number;
    collided?: boolean;
  }): number {
    return this.post({ type: "trial", ...fields });
  }

  async end(): Promise<SummaryRecord> {
    const reply = await this.request({ type: "end" });
    if (reply.type !== "summary") {
      throw new Error(`expected summary, got ${reply.type}`);
    }
    return reply;
  }

  close(): void {
    this.transport.close();
  }
}
