// Shapes of the edge HTTP API payloads.

export interface MapData {
  resolution: number;
  origin: { x: number; y: number };
  rows: string[];
}

export interface PoseInfo {
  x: number;
  y: number;
  theta: number;
  age_ms: number;
}

export interface CommandRecord {
  id: number;
  source: string;
  command: { op: string; deg?: number; m?: number };
  seq: number | null;
  status: string;
  detail: string | null;
  timestamps: Record<string, number>;
}

export interface EdgeSnapshot {
  mode: "manual" | "auto";
  session: { state: "alive" | "degraded" | "dead"; rtt_ms: number | null };
  pose: PoseInfo | null;
  active: CommandRecord | null;
  queue: CommandRecord[];
  speaker: { angle_deg: number; age_ms: number } | null;
  media: string;
}

export interface OdomEvent {
  x: number;
  y: number;
  theta: number;
  t: number;
}

export interface GoalResponse {
  id_first: number;
  count: number;
  path: [number, number][];
}

export const TERMINAL_STATUSES = new Set(["completed", "failed", "timed_out", "cancelled"]);
