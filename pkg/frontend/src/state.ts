// Console view state: rebuilt from GET /state + /map on load, then folded
// forward by stream events. The console never invents truth of its own.

import { canvasToWorld, MapMeta, metaFromMap } from "./transform";
import {
  CommandRecord,
  EdgeSnapshot,
  MapData,
  OdomEvent,
  TERMINAL_STATUSES,
} from "./types";

export const TRAIL_LIMIT = 500;
export const SPEAKER_FRESH_MS = 2000;

export interface ViewState {
  snapshot: EdgeSnapshot;
  map: MapData;
  meta: MapMeta;
  poseTrail: [number, number][];
  connection: "live" | "reconnecting";
  pendingActions: number;
  plannedPath: [number, number][];
  speakerSeenAt: number | null; // ms timestamp from performance/Date
  lastError: string | null;
}

export function bootstrap(snapshot: EdgeSnapshot, map: MapData, scale = 20): ViewState {
  const trail: [number, number][] = [];
  if (snapshot.pose) {
    trail.push([snapshot.pose.x, snapshot.pose.y]);
  }
  return {
    snapshot,
    map,
    meta: metaFromMap(map, scale),
    poseTrail: trail,
    connection: "live",
    pendingActions: 0,
    plannedPath: [],
    speakerSeenAt: null,
    lastError: null,
  };
}

export function applyOdom(view: ViewState, odom: OdomEvent): void {
  view.snapshot.pose = { x: odom.x, y: odom.y, theta: odom.theta, age_ms: 0 };
  view.poseTrail.push([odom.x, odom.y]);
  if (view.poseTrail.length > TRAIL_LIMIT) {
    view.poseTrail.splice(0, view.poseTrail.length - TRAIL_LIMIT);
  }
}

export function applyCommand(view: ViewState, record: CommandRecord): void {
  const queue = view.snapshot.queue;
  const index = queue.findIndex((r) => r.id === record.id);
  if (index >= 0) {
    queue[index] = record;
  } else {
    queue.push(record);
    if (queue.length > 100) {
      queue.splice(0, queue.length - 100);
    }
  }
  if (TERMINAL_STATUSES.has(record.status)) {
    if (view.snapshot.active?.id === record.id) {
      view.snapshot.active = null;
    }
  } else if (record.status !== "queued") {
    view.snapshot.active = record;
  }
}

export function applySession(view: ViewState, session: EdgeSnapshot["session"]): void {
  view.snapshot.session = session;
}

export function applyMode(view: ViewState, mode: "manual" | "auto"): void {
  view.snapshot.mode = mode;
}

export function applySpeaker(view: ViewState, angleDeg: number, nowMs: number): void {
  view.snapshot.speaker = { angle_deg: angleDeg, age_ms: 0 };
  view.speakerSeenAt = nowMs;
}

/**
 * Map-click gate: in auto mode returns the world coordinates to post as the
 * goal; in manual mode clicks are inert and the caller shows a hint.
 */
export function clickToGoal(
  px: number,
  py: number,
  view: ViewState,
): [number, number] | null {
  if (view.snapshot.mode !== "auto") {
    return null;
  }
  return canvasToWorld(px, py, view.meta);
}
