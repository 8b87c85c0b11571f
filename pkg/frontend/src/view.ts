/**
 * Top-down scene rendering: vehicles, formation edges, payload, and a
 * side gauge for altitude. Pure coordinate helpers are split out so
 * they can be tested without a canvas.
 */

import { Telemetry } from "./protocol.js";

export interface Bounds {
  cx: number;
  cy: number;
  span: number;
}

/**
 * World-space square covering the formation, centered on its centroid.
 * minSpan keeps the zoom sane when vehicles converge.
 */
export function formationBounds(
  positions: ReadonlyArray<readonly [number, number, number]>,
  minSpan = 4,
  margin = 1.5,
): Bounds {
  if (positions.length === 0) return { cx: 0, cy: 0, span: minSpan };
  let sx = 0;
  let sy = 0;
  for (const p of positions) {
    sx += p[0];
    sy += p[1];
  }
  const cx = sx / positions.length;
  const cy = sy / positions.length;
  let ext = 0;
  for (const p of positions) {
    ext = Math.max(ext, Math.abs(p[0] - cx), Math.abs(p[1] - cy));
  }
  return { cx, cy, span: Math.max(minSpan, 2 * (ext + margin)) };
}

/** y-up world metres -> y-down canvas pixels inside a square viewport. */
export function worldToCanvas(
  x: number,
  y: number,
  b: Bounds,
  size: number,
): [number, number] {
  const px = ((x - b.cx) / b.span + 0.5) * size;
  const py = (0.5 - (y - b.cy) / b.span) * size;
  return [px, py];
}

/** Fraction of the altitude gauge filled, clamped to [0, 1]. */
export function altitudeFraction(alt: number, lo = 0, hi = 10): number {
  return Math.min(1, Math.max(0, (alt - lo) / (hi - lo)));
}

/** Recent ground-track points per vehicle, for motion trails. */
export class Trails {
  private points: [number, number][][];

  constructor(
    readonly nVehicles: number,
    readonly maxPoints = 240,
  ) {
    this.points = Array.from({ length: nVehicles }, () => []);
  }

  push(positions: ReadonlyArray<readonly [number, number, number]>): void {
    for (let i = 0; i < this.nVehicles; i++) {
      const p = positions[i];
      if (!p) continue;
      const track = this.points[i]!;
      track.push([p[0], p[1]]);
      if (track.length > this.maxPoints) track.splice(0, track.length - this.maxPoints);
    }
  }

  track(i: number): ReadonlyArray<readonly [number, number]> {
    return this.points[i] ?? [];
  }
}

const GAUGE_WIDTH = 26;

export function drawScene(
  ctx: CanvasRenderingContext2D,
  frame: Telemetry,
  edges: ReadonlyArray<readonly [number, number]>,
  size: number,
  trails?: Trails,
): void {
  ctx.clearRect(0, 0, size + GAUGE_WIDTH + 12, size);
  ctx.fillStyle = "#111418";
  ctx.fillRect(0, 0, size, size);

  const b = formationBounds(
    frame.positions as ReadonlyArray<readonly [number, number, number]>,
  );

  // grid every metre
  ctx.strokeStyle = "#222830";
  ctx.lineWidth = 1;
  const step = size / b.span;
  if (step > 8) {
    const x0 = Math.ceil(b.cx - b.span / 2);
    const y0 = Math.ceil(b.cy - b.span / 2);
    ctx.beginPath();
    for (let gx = x0; gx <= b.cx + b.span / 2; gx++) {
      const [px] = worldToCanvas(gx, 0, b, size);
      ctx.moveTo(px, 0);
      ctx.lineTo(px, size);
    }
    for (let gy = y0; gy <= b.cy + b.span / 2; gy++) {
      const [, py] = worldToCanvas(0, gy, b, size);
      ctx.moveTo(0, py);
      ctx.lineTo(size, py);
    }
    ctx.stroke();
  }

  // motion trails under everything else
  if (trails) {
    ctx.strokeStyle = "#2e4a63";
    ctx.lineWidth = 1;
    for (let i = 0; i < frame.positions.length; i++) {
      const track = trails.track(i);
      if (track.length < 2) continue;
      ctx.beginPath();
      for (let j = 0; j < track.length; j++) {
        const [px, py] = worldToCanvas(track[j]![0], track[j]![1], b, size);
        if (j === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      }
      ctx.stroke();
    }
  }

  // formation edges, tinted by distance error
  for (let k = 0; k < edges.length; k++) {
    const [i, j] = edges[k]!;
    const pi = frame.positions[i];
    const pj = frame.positions[j];
    if (!pi || !pj) continue;
    const err = Math.abs(
      (frame.distances[k] ?? 0) - (frame.desired_distances[k] ?? 0),
    );
    ctx.strokeStyle = err > 0.15 ? "#e15759" : "#3f5a78";
    ctx.lineWidth = 2;
    const [ax, ay] = worldToCanvas(pi[0], pi[1], b, size);
    const [bx, by] = worldToCanvas(pj[0], pj[1], b, size);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
  }

  // payload
  const [plx, ply] = worldToCanvas(
    frame.payload_position[0],
    frame.payload_position[1],
    b,
    size,
  );
  ctx.fillStyle = "#edc948";
  ctx.beginPath();
  ctx.arc(plx, ply, 6, 0, Math.PI * 2);
  ctx.fill();

  // vehicles with heading ticks and velocity vectors
  for (let i = 0; i < frame.positions.length; i++) {
    const p = frame.positions[i]!;
    const v = frame.velocities[i]!;
    const [px, py] = worldToCanvas(p[0], p[1], b, size);
    const sat = (frame.saturated[i] ?? 0) > 0;
    ctx.fillStyle = sat ? "#e15759" : "#59a14f";
    ctx.beginPath();
    ctx.arc(px, py, 7, 0, Math.PI * 2);
    ctx.fill();
    ctx.strokeStyle = "#d5dbe3";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(px + v[0] * step, py - v[1] * step);
    ctx.stroke();
    ctx.fillStyle = "#d5dbe3";
    ctx.font = "11px sans-serif";
    ctx.fillText(String(i), px + 9, py - 9);
  }

  // altitude gauge at the right edge
  const meanAlt =
    frame.positions.reduce((a, p) => a + p[2], 0) /
    Math.max(1, frame.positions.length);
  const gx = size + 8;
  ctx.fillStyle = "#1a1f26";
  ctx.fillRect(gx, 0, GAUGE_WIDTH, size);
  const frac = altitudeFraction(meanAlt);
  ctx.fillStyle = "#4e79a7";
  ctx.fillRect(gx, size * (1 - frac), GAUGE_WIDTH, size * frac);
  const cmdFrac = altitudeFraction(frame.command.altitude);
  ctx.strokeStyle = "#edc948";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(gx, size * (1 - cmdFrac));
  ctx.lineTo(gx + GAUGE_WIDTH, size * (1 - cmdFrac));
  ctx.stroke();
  ctx.fillStyle = "#d5dbe3";
  ctx.font = "11px sans-serif";
  ctx.fillText(meanAlt.toFixed(2), gx, 12);
}
