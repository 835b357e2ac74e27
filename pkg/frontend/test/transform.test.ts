import { describe, expect, it } from "vitest";

import {
  canvasToWorld,
  halfPixelWorld,
  metaFromMap,
  worldToCanvas,
} from "../src/transform";
import { MapData } from "../src/types";

const MAP: MapData = {
  resolution: 0.25,
  origin: { x: 0, y: 0 },
  rows: Array(20).fill("....................") as string[],
};

describe("world<->canvas transform", () => {
  const meta = metaFromMap(MAP, 20);

  it("anchors the origin at the bottom-left corner", () => {
    expect(meta.heightPx).toBe(400);
    expect(worldToCanvas(0, 0, meta)).toEqual([0, 400]);
  });

  it("maps 1 m to 4 cells of 20 px", () => {
    expect(worldToCanvas(1.0, 0, meta)).toEqual([80, 400]);
  });

  it("flips the y axis", () => {
    const [, py] = worldToCanvas(0, 5.0, meta);
    expect(py).toBe(0);
  });

  it("inverse round-trips random points within half a pixel's world size", () => {
    const tolerance = halfPixelWorld(meta);
    let seed = 42;
    const rand = () => {
      // xorshift: deterministic without a RNG dependency
      seed ^= seed << 13;
      seed ^= seed >>> 17;
      seed ^= seed << 5;
      return (seed >>> 0) / 0xffffffff;
    };
    for (let i = 0; i < 500; i++) {
      const x = rand() * 10 - 2.5;
      const y = rand() * 10 - 2.5;
      const [px, py] = worldToCanvas(x, y, meta);
      const [x2, y2] = canvasToWorld(px, py, meta);
      expect(Math.abs(x2 - x)).toBeLessThanOrEqual(tolerance);
      expect(Math.abs(y2 - y)).toBeLessThanOrEqual(tolerance);
    }
  });

  it("round-trips pixel centers exactly back to their pixel", () => {
    const meta2 = metaFromMap({ ...MAP, origin: { x: 0.125, y: 0.125 } }, 20);
    for (const [px, py] of [[10.5, 390.5], [200.5, 0.5], [399.5, 123.5]] as const) {
      const [x, y] = canvasToWorld(px, py, meta2);
      const [px2, py2] = worldToCanvas(x, y, meta2);
      expect(px2).toBeCloseTo(px, 9);
      expect(py2).toBeCloseTo(py, 9);
    }
  });
});
