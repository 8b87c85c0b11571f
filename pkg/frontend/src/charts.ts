/**
 * Rolling telemetry store and strip-chart configuration.
 *
 * The store keeps a sliding time window of the series the charts
 * display (edge distances against their targets, per-vehicle planar
 * velocities) in the column layout uPlot consumes directly, so a
 * render pass is push + setData with no per-frame reshaping.
 */

import type uPlot from "uplot";
import { Telemetry } from "./protocol.js";

const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#9c755f",
];

export class TelemetryStore {
  readonly t: number[] = [];
  readonly distances: number[][];
  readonly desired: number[][];
  readonly vx: number[][];
  readonly vy: number[][];

  constructor(
    readonly nVehicles: number,
    readonly nEdges: number,
    readonly windowSeconds = 60,
  ) {
    this.distances = Array.from({ length: nEdges }, () => []);
    this.desired = Array.from({ length: nEdges }, () => []);
    this.vx = Array.from({ length: nVehicles }, () => []);
    this.vy = Array.from({ length: nVehicles }, () => []);
  }

  push(frame: Telemetry): void {
    if (frame.distances.length !== this.nEdges) {
      throw new Error(
        `expected ${this.nEdges} edge distances, got ${frame.distances.length}`,
      );
    }
    if (frame.velocities.length !== this.nVehicles) {
      throw new Error(
        `expected ${this.nVehicles} velocities, got ${frame.velocities.length}`,
      );
    }
    this.t.push(frame.t);
    for (let k = 0; k < this.nEdges; k++) {
      this.distances[k]!.push(frame.distances[k]!);
      this.desired[k]!.push(frame.desired_distances[k]!);
    }
    for (let i = 0; i < this.nVehicles; i++) {
      this.vx[i]!.push(frame.velocities[i]![0]);
      this.vy[i]!.push(frame.velocities[i]![1]);
    }
    this.trim();
  }

  private trim(): void {
    const latest = this.t[this.t.length - 1]!;
    const cutoff = latest - this.windowSeconds;
    let drop = 0;
    while (drop < this.t.length && this.t[drop]! < cutoff) drop++;
    if (drop === 0) return;
    this.t.splice(0, drop);
    for (const col of this.distances) col.splice(0, drop);
    for (const col of this.desired) col.splice(0, drop);
    for (const col of this.vx) col.splice(0, drop);
    for (const col of this.vy) col.splice(0, drop);
  }

  get length(): number {
    return this.t.length;
  }

  /** [t, d_0..d_{E-1}, desired_0..desired_{E-1}] */
  distanceData(): uPlot.AlignedData {
    return [this.t, ...this.distances, ...this.desired] as uPlot.AlignedData;
  }

  /** [t, vx_0..vx_{N-1}, vy_0..vy_{N-1}] */
  velocityData(): uPlot.AlignedData {
    return [this.t, ...this.vx, ...this.vy] as uPlot.AlignedData;
  }
}

function baseOptions(title: string, width: number, height: number) {
  return {
    title,
    width,
    height,
    scales: { x: { time: false } },
    axes: [{ label: "sim time [s]" }, {}],
    legend: { show: true },
    cursor: { show: true },
  };
}

export function distanceChartOptions(
  nEdges: number,
  edges: ReadonlyArray<readonly [number, number]>,
  width: number,
  height: number,
): uPlot.Options {
  const series: uPlot.Series[] = [{ label: "t" }];
  for (let k = 0; k < nEdges; k++) {
    const [i, j] = edges[k] ?? [k, k];
    series.push({
      label: `d(${i},${j})`,
      stroke: PALETTE[k % PALETTE.length],
      width: 1.5,
    });
  }
  for (let k = 0; k < nEdges; k++) {
    series.push({
      label: `d*(${k})`,
      stroke: PALETTE[k % PALETTE.length],
      dash: [6, 4],
      width: 1,
    });
  }
  return { ...baseOptions("edge distances [m]", width, height), series };
}

export function velocityChartOptions(
  nVehicles: number,
  width: number,
  height: number,
): uPlot.Options {
  const series: uPlot.Series[] = [{ label: "t" }];
  for (let i = 0; i < nVehicles; i++) {
    series.push({
      label: `vx[${i}]`,
      stroke: PALETTE[i % PALETTE.length],
      width: 1.5,
    });
  }
  for (let i = 0; i < nVehicles; i++) {
    series.push({
      label: `vy[${i}]`,
      stroke: PALETTE[i % PALETTE.length],
      dash: [4, 4],
      width: 1.5,
    });
  }
  return { ...baseOptions("vehicle velocity [m/s]", width, height), series };
}
