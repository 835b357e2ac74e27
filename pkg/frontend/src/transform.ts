// World <-> canvas affine transform. Screen y grows downward, world y upward:
// world (origin_x, origin_y) anchors at canvas (0, H).

import { MapData } from "./types";

export interface MapMeta {
  originX: number;
  originY: number;
  resolution: number;
  cols: number;
  rows: number;
  scale: number; // pixels per cell
  widthPx: number;
  heightPx: number;
}

export function metaFromMap(map: MapData, scale = 20): MapMeta {
  const rows = map.rows.length;
  const cols = rows > 0 ? map.rows[0].length : 0;
  return {
    originX: map.origin.x,
    originY: map.origin.y,
    resolution: map.resolution,
    cols,
    rows,
    scale,
    widthPx: cols * scale,
    heightPx: rows * scale,
  };
}

export function worldToCanvas(x: number, y: number, meta: MapMeta): [number, number] {
  const px = ((x - meta.originX) / meta.resolution) * meta.scale;
  const py = meta.heightPx - ((y - meta.originY) / meta.resolution) * meta.scale;
  return [px, py];
}

export function canvasToWorld(px: number, py: number, meta: MapMeta): [number, number] {
  const x = meta.originX + (px / meta.scale) * meta.resolution;
  const y = meta.originY + ((meta.heightPx - py) / meta.scale) * meta.resolution;
  return [x, y];
}

/** Half of one pixel's world size: the round-trip tolerance. */
export function halfPixelWorld(meta: MapMeta): number {
  return meta.resolution / meta.scale / 2;
}
