import { describe, expect, it } from "vitest";

import { postGoal } from "../src/api";
import { bootstrap, clickToGoal } from "../src/state";
import { EdgeSnapshot, MapData } from "../src/types";

const MAP: MapData = {
  resolution: 0.25,
  origin: { x: 0.125, y: 0.125 },
  rows: Array(20).fill("....................") as string[],
};

function snapshot(mode: "manual" | "auto"): EdgeSnapshot {
  return {
    mode,
    session: { state: "alive", rtt_ms: 12 },
    pose: { x: 0.875, y: 0.875, theta: 0, age_ms: 50 },
    active: null,
    queue: [],
    speaker: null,
    media: "external",
  };
}

describe("map click", () => {
  it("is inert in manual mode", () => {
    const view = bootstrap(snapshot("manual"), MAP);
    expect(clickToGoal(200, 200, view)).toBeNull();
  });

  it("converts the pixel to world coordinates in auto mode", () => {
    const view = bootstrap(snapshot("auto"), MAP);
    // canvas (340, 60): x = 0.125 + 340/20*0.25 = 4.375, y = 0.125 + (400-60)/20*0.25 = 4.375
    expect(clickToGoal(340, 60, view)).toEqual([4.375, 4.375]);
  });

  it("issues a goal POST with the converted coordinates", async () => {
    const view = bootstrap(snapshot("auto"), MAP);
    const goal = clickToGoal(340, 60, view)!;
    const calls: { url: string; init: RequestInit }[] = [];
    const fakeFetch = (async (url: any, init: any) => {
      calls.push({ url: String(url), init });
      return new Response(
        JSON.stringify({ id_first: 7, count: 3, path: [[0.875, 0.875], [4.375, 4.375]] }),
        { status: 202, headers: { "Content-Type": "application/json" } },
      );
    }) as typeof fetch;

    const response = await postGoal(goal[0], goal[1], fakeFetch);
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe("/api/v1/goal");
    expect(calls[0].init.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init.body))).toEqual({ x: 4.375, y: 4.375 });
    expect(response.count).toBe(3);
    expect(response.path[1]).toEqual([4.375, 4.375]);
  });

  it("surfaces the server reason on 422", async () => {
    const fakeFetch = (async () =>
      new Response(JSON.stringify({ error: "goal cell (9, 9) is occupied" }), {
        status: 422,
      })) as typeof fetch;
    await expect(postGoal(1, 1, fakeFetch)).rejects.toMatchObject({
      status: 422,
      reason: "goal cell (9, 9) is occupied",
    });
  });
});
