/**
 * Record grammar of the live session service: one JSON object per line,
 * `seq` echoed in every reply.  This module only shapes and frames the
 * records; no task math lives on the client side.
 */

export const SCHEMA_VERSION = 1;

export type TaskKind = "car-following" | "pointing";

export interface DeclareRecord {
  type: "declare";
  seq: number;
  schema: number;
  task_kind: TaskKind;
  window_s?: number;
  capacity_a?: number;
  capacity_b?: number;
  s_level?: number;
  amplitude?: number;
  width?: number;
  rate_hz?: number;
}

export interface SampleRecord {
  type: "sample";
  seq: number;
  t: number;
  gap?: number; // car-following
  x?: number;   // pointing
}

export interface TrialMarkRecord {
  type: "trial";
  seq: number;
  trial_id: number;
  kind: "decel" | "accel";
  delta_s: number;
  mean_gap: number;
  response_onset: number | null;
  end_time: number;
  collided?: boolean;
}

export interface ClickRecord {
  type: "click";
  seq: number;
  t: number;
  hit: boolean;
}

export interface EndRecord {
  type: "end";
  seq: number;
}

export type ClientRecord =
  | DeclareRecord
  | SampleRecord
  | TrialMarkRecord
  | ClickRecord
  | EndRecord;

export interface MetricRecord {
  type: "metric";
  seq: number | null;
  t: number | null;
  ns_ratio: number | null;
  surprise_bits: number | null;
  capacity_bits: number | null;
  remaining_bits: number | null;
  collision_flag: boolean;
  unbounded: boolean;
}

export interface ErrorRecord {
  type: "error";
  seq: number | null;
  message: string;
}

export interface SummaryTrial {
  trial_id: number;
  kind: string;
  ns_ratio?: number;
  stimulus_bits?: number;
  remaining_bits?: number;
  consumed_bits?: number;
  skipped?: string;
}

export interface SummaryBlock {
  id_bits: number;
  mean_mt_s: number;
  throughput_bps: number | null;
  n_clicks: number;
  error_rate: number;
  error_bits: number | null;
}

export interface SummaryRecord {
  type: "summary";
  seq: number | null;
  trials: SummaryTrial[];
  blocks: SummaryBlock[];
  n_samples: number;
}

export type ServerRecord = MetricRecord | ErrorRecord | SummaryRecord;

export function encodeRecord(rec: ClientRecord): string {
  return JSON.stringify(rec) + "\n";
}

/** Accumulates raw chunks and yields complete newline-terminated lines. */
export class LineSplitter {
  private tail = "";

  push(chunk: string): string[] {
    const parts = (this.tail + chunk).split("\n");
    this.tail = parts.pop() ?? "";
    return parts.filter((p) => p.length > 0);
  }
}

export function parseServerRecord(line: string): ServerRecord {
  const doc = JSON.parse(line);
  if (doc.type !== "metric" && doc.type !== "error" && doc.type !== "summary") {
    throw new Error(`unexpected server record type ${String(doc.type)}`);
  }
  return doc as ServerRecord;
}
