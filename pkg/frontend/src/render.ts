// Canvas rendering: occupancy cells, pose trail, planned path, avatar glyph,
// speaker wedge. All geometry goes through the shared world<->canvas affine.

import { MapMeta, worldToCanvas } from "./transform";
import { SPEAKER_FRESH_MS, ViewState } from "./state";

const COLORS = {
  free: "#f4f1ea",
  occupied: "#3a3f4b",
  grid: "#e0dcd2",
  trail: "#9dbcd4",
  path: "#2f7d4f",
  avatar: "#c0392b",
  speaker: "rgba(240, 180, 30, 0.55)",
};

function cellRect(i: number, j: number, meta: MapMeta): [number, number, number, number] {
  const cx = meta.originX + i * meta.resolution;
  const cy = meta.originY + j * meta.resolution;
  const [x0, y0] = worldToCanvas(cx - meta.resolution / 2, cy + meta.resolution / 2, meta);
  return [x0, y0, meta.scale, meta.scale];
}

export function draw(ctx: CanvasRenderingContext2D, view: ViewState, nowMs: number): void {
  const meta = view.meta;
  ctx.fillStyle = COLORS.free;
  ctx.fillRect(0, 0, meta.widthPx, meta.heightPx);

  for (let j = 0; j < meta.rows; j++) {
    const row = view.map.rows[j];
    for (let i = 0; i < meta.cols; i++) {
      if (row[i] === "#") {
        ctx.fillStyle = COLORS.occupied;
        const [x, y, w, h] = cellRect(i, j, meta);
        ctx.fillRect(x, y, w, h);
      }
    }
  }

  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 1;
  for (let i = 0; i <= meta.cols; i++) {
    ctx.beginPath();
    ctx.moveTo(i * meta.scale, 0);
    ctx.lineTo(i * meta.scale, meta.heightPx);
    ctx.stroke();
  }
  for (let j = 0; j <= meta.rows; j++) {
    ctx.beginPath();
    ctx.moveTo(0, j * meta.scale);
    ctx.lineTo(meta.widthPx, j * meta.scale);
    ctx.stroke();
  }

  if (view.plannedPath.length > 1) {
    ctx.strokeStyle = COLORS.path;
    ctx.lineWidth = 2;
    ctx.beginPath();
    view.plannedPath.forEach(([x, y], index) => {
      const [px, py] = worldToCanvas(x, y, meta);
      if (index === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  if (view.poseTrail.length > 1) {
    ctx.strokeStyle = COLORS.trail;
    ctx.lineWidth = 2;
    ctx.beginPath();
    view.poseTrail.forEach(([x, y], index) => {
      const [px, py] = worldToCanvas(x, y, meta);
      if (index === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  const pose = view.snapshot.pose;
  if (pose) {
    const [px, py] = worldToCanvas(pose.x, pose.y, meta);
    const r = meta.scale * 0.6;

    const speaker = view.snapshot.speaker;
    if (
      speaker &&
      view.speakerSeenAt !== null &&
      nowMs - view.speakerSeenAt < SPEAKER_FRESH_MS
    ) {
      const bearing = pose.theta + (speaker.angle_deg * Math.PI) / 180;
      ctx.fillStyle = COLORS.speaker;
      ctx.beginPath();
      ctx.moveTo(px, py);
      ctx.arc(px, py, r * 2.2, -bearing - 0.25, -bearing + 0.25);
      ctx.closePath();
      ctx.fill();
    }

    ctx.fillStyle = COLORS.avatar;
    ctx.beginPath();
    // screen angle is -theta because canvas y points down
    const a = -pose.theta;
    ctx.moveTo(px + r * Math.cos(a), py + r * Math.sin(a));
    ctx.lineTo(px + r * Math.cos(a + 2.5), py + r * Math.sin(a + 2.5));
    ctx.lineTo(px + r * Math.cos(a - 2.5), py + r * Math.sin(a - 2.5));
    ctx.closePath();
    ctx.fill();
  }
}
