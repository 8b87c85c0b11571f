/**
 * Shared utilities for the test suite: fixture loading, spectral and
 * spin-rate estimation, and spawning the simulator's websocket bridge
 * as a subprocess.
 */

import { spawn, ChildProcess } from "node:child_process";
import { connect } from "node:net";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { Telemetry, telemetrySchema } from "../src/protocol.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export function loadFixtureFrames(name: string): Telemetry[] {
  const raw = readFileSync(join(HERE, "fixtures", name), "utf8");
  return raw
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => telemetrySchema.parse(JSON.parse(line)));
}

/**
 * Dominant frequency of an irregularly sampled series via a direct
 * DFT on a fine frequency grid, Hann-weighted to tame leakage from
 * the finite record.
 */
export function dominantFrequencyHz(
  t: ReadonlyArray<number>,
  y: ReadonlyArray<number>,
  fMin = 0.002,
  fMax = 0.2,
  fStep = 0.0002,
): { frequency: number; power: number; meanOffPeakPower: number; maxOffPeakPower: number } {
  const n = t.length;
  if (n < 8) throw new Error("series too short");
  const mean = y.reduce((a, v) => a + v, 0) / n;
  const t0 = t[0]!;
  const span = t[n - 1]! - t0;
  const w: number[] = new Array(n);
  const yd: number[] = new Array(n);
  for (let i = 0; i < n; i++) {
    w[i] = 0.5 - 0.5 * Math.cos((2 * Math.PI * (t[i]! - t0)) / span);
    yd[i] = (y[i]! - mean) * w[i]!;
  }
  let best = { frequency: fMin, power: -1 };
  const powers: number[] = [];
  for (let f = fMin; f <= fMax + 1e-12; f += fStep) {
    let re = 0;
    let im = 0;
    const omega = 2 * Math.PI * f;
    for (let i = 0; i < n; i++) {
      const ph = omega * (t[i]! - t0);
      re += yd[i]! * Math.cos(ph);
      im -= yd[i]! * Math.sin(ph);
    }
    const p = re * re + im * im;
    powers.push(p);
    if (p > best.power) best = { frequency: f, power: p };
  }
  // background = everything past the Hann main lobe and first sidelobe
  // (half-width 2/span each); a second spectral line would land here
  const exclude = 4 / span;
  let acc = 0;
  let cnt = 0;
  let worst = 0;
  for (let k = 0; k < powers.length; k++) {
    const f = fMin + k * fStep;
    if (Math.abs(f - best.frequency) > exclude) {
      acc += powers[k]!;
      cnt++;
      if (powers[k]! > worst) worst = powers[k]!;
    }
  }
  return {
    ...best,
    meanOffPeakPower: cnt > 0 ? acc / cnt : 0,
    maxOffPeakPower: worst,
  };
}

/**
 * Spin rate in rad/s from vehicle 0's bearing about the formation
 * centroid: unwrap the angle series, least-squares slope against time.
 */
export function measureSpinRate(frames: ReadonlyArray<Telemetry>): number {
  const t: number[] = [];
  const angle: number[] = [];
  let prev = 0;
  let offset = 0;
  for (const f of frames) {
    let cx = 0;
    let cy = 0;
    for (const p of f.positions) {
      cx += p[0];
      cy += p[1];
    }
    cx /= f.positions.length;
    cy /= f.positions.length;
    const a = Math.atan2(f.positions[0]![1] - cy, f.positions[0]![0] - cx);
    if (t.length > 0) {
      let d = a - prev;
      while (d > Math.PI) d -= 2 * Math.PI;
      while (d < -Math.PI) d += 2 * Math.PI;
      offset += d;
    }
    prev = a;
    t.push(f.t);
    angle.push(offset);
  }
  const n = t.length;
  const tm = t.reduce((a, v) => a + v, 0) / n;
  const am = angle.reduce((a, v) => a + v, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (t[i]! - tm) * (angle[i]! - am);
    den += (t[i]! - tm) * (t[i]! - tm);
  }
  return num / den;
}

export interface ServerHandle {
  proc: ChildProcess;
  port: number;
  url: string;
  stop(): Promise<void>;
}

async function portOpen(port: number): Promise<boolean> {
  return new Promise((resolve) => {
    const sock = connect({ port, host: "127.0.0.1" });
    sock.once("connect", () => {
      sock.destroy();
      resolve(true);
    });
    sock.once("error", () => resolve(false));
  });
}

/** Spawn `swarmlift serve` on the given scenario and wait for the port. */
export async function startServer(
  scenario: Record<string, unknown>,
  port: number,
  timeScale: number,
): Promise<ServerHandle> {
  const dir = mkdtempSync(join(tmpdir(), "console-test-"));
  const scenarioPath = join(dir, "scenario.json");
  writeFileSync(scenarioPath, JSON.stringify(scenario));
  const proc = spawn(
    "python3",
    [
      "-m",
      "swarmlift.cli",
      "serve",
      scenarioPath,
      "--port",
      String(port),
      "--time-scale",
      String(timeScale),
    ],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  proc.stderr?.on("data", (chunk) => (stderr += String(chunk)));

  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    if (proc.exitCode !== null) {
      throw new Error(`server exited early (code ${proc.exitCode}): ${stderr}`);
    }
    if (await portOpen(port)) break;
    await sleep(200);
  }
  if (!(await portOpen(port))) {
    proc.kill();
    throw new Error(`server never opened port ${port}: ${stderr}`);
  }

  return {
    proc,
    port,
    url: `ws://127.0.0.1:${port}/ws`,
    stop: () =>
      new Promise<void>((resolve) => {
        proc.once("exit", () => resolve());
        proc.kill("SIGTERM");
        setTimeout(() => {
          if (proc.exitCode === null) proc.kill("SIGKILL");
        }, 5000).unref();
      }),
  };
}

export const sleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));
