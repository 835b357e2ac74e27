// HTTP calls to the edge plus the exact manual-pad command payloads.

import { EdgeSnapshot, GoalResponse, MapData } from "./types";

export const DRIVE_STEP_M = 0.5;
export const TURN_STEP_DEG = 15;

// These are the wire payloads; snapshot-tested, do not reshape.
export const MANUAL_BUTTONS: Record<string, object> = {
  "turn-left": { op: "turn-left", deg: TURN_STEP_DEG },
  "turn-right": { op: "turn-right", deg: TURN_STEP_DEG },
  "drive-forward": { op: "drive-forward", m: DRIVE_STEP_M },
  "drive-left": { op: "drive-left", m: DRIVE_STEP_M },
  "drive-right": { op: "drive-right", m: DRIVE_STEP_M },
  "stop-drive": { op: "stop-drive" },
  park: { op: "park" },
};

export class ApiError extends Error {
  constructor(public status: number, public reason: string) {
    super(`${status}: ${reason}`);
  }
}

type Fetch = typeof globalThis.fetch;

async function request<T>(
  fetchFn: Fetch,
  method: string,
  url: string,
  body?: object,
): Promise<T> {
  const response = await fetchFn(url, {
    method,
    headers: body ? { "Content-Type": "application/json" } : undefined,
    body: body ? JSON.stringify(body) : undefined,
  });
  const text = await response.text();
  const data = text ? JSON.parse(text) : {};
  if (!response.ok) {
    throw new ApiError(response.status, data.error ?? response.statusText);
  }
  return data as T;
}

export function getState(fetchFn: Fetch = fetch): Promise<EdgeSnapshot> {
  return request(fetchFn, "GET", "/api/v1/state");
}

export function getMap(fetchFn: Fetch = fetch): Promise<MapData> {
  return request(fetchFn, "GET", "/api/v1/map");
}

export function putMode(
  mode: "manual" | "auto",
  fetchFn: Fetch = fetch,
): Promise<{ previous: string; cancelled: number }> {
  return request(fetchFn, "PUT", "/api/v1/mode", { mode });
}

export function postCommand(payload: object, fetchFn: Fetch = fetch): Promise<{ id: number }> {
  return request(fetchFn, "POST", "/api/v1/commands", payload);
}

export function postGoal(x: number, y: number, fetchFn: Fetch = fetch): Promise<GoalResponse> {
  return request(fetchFn, "POST", "/api/v1/goal", { x, y });
}

export function postStop(fetchFn: Fetch = fetch): Promise<{ id: number }> {
  return request(fetchFn, "POST", "/api/v1/stop");
}
