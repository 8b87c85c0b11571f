/**
 * Browser entry point. Wires the websocket client, the on-screen
 * sticks, keyboard input, the scene canvas, and the strip charts.
 *
 * One rendering loop (requestAnimationFrame) drains queued telemetry;
 * websocket callbacks only enqueue. Commands go out on a fixed 100 ms
 * timer, decoupled from both. Only the operator sends; observers see
 * the same telemetry with the controls inert.
 */

import uPlot from "uplot";
import { ConsoleClient, SocketLike } from "./client.js";
import {
  TelemetryStore,
  distanceChartOptions,
  velocityChartOptions,
} from "./charts.js";
import {
  ALTITUDE_STEP,
  CommandSender,
  StickState,
  ZERO_STICKS,
  combineSticks,
  padSticks,
  sticksFromKeys,
} from "./sticks.js";
import { Trails, drawScene } from "./view.js";

const COMMAND_INTERVAL_MS = 100;
const SCENE_SIZE = 540;
const CHART_WIDTH = 620;
const CHART_HEIGHT = 220;

function wsUrl(): string {
  const q = new URLSearchParams(window.location.search).get("ws");
  if (q) return q;
  const host = window.location.hostname || "localhost";
  return `ws://${host}:8000/ws`;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

/** Draggable knob pad; reads as a pair of [-1, 1] axes, recenters on release. */
class StickPad {
  x = 0;
  y = 0;

  constructor(
    private pad: HTMLElement,
    private knob: HTMLElement,
  ) {
    pad.addEventListener("pointerdown", (ev) => {
      pad.setPointerCapture(ev.pointerId);
      this.track(ev);
    });
    pad.addEventListener("pointermove", (ev) => {
      if (pad.hasPointerCapture(ev.pointerId)) this.track(ev);
    });
    const release = (ev: PointerEvent) => {
      if (pad.hasPointerCapture(ev.pointerId)) pad.releasePointerCapture(ev.pointerId);
      this.x = 0;
      this.y = 0;
      this.place();
    };
    pad.addEventListener("pointerup", release);
    pad.addEventListener("pointercancel", release);
    this.place();
  }

  private track(ev: PointerEvent): void {
    const rect = this.pad.getBoundingClientRect();
    const radius = rect.width / 2;
    const v = padSticks(
      ev.clientX - (rect.left + radius),
      ev.clientY - (rect.top + radius),
      radius,
    );
    this.x = v.x;
    this.y = v.y;
    this.place();
  }

  private place(): void {
    const half = this.pad.clientWidth / 2;
    this.knob.style.left = `${half + this.x * half * 0.7 - this.knob.offsetWidth / 2}px`;
    this.knob.style.top = `${half - this.y * half * 0.7 - this.knob.offsetHeight / 2}px`;
  }
}

/** Button that reads 1 while held down. */
function holdButton(node: HTMLElement): () => number {
  let held = 0;
  node.addEventListener("pointerdown", (ev) => {
    node.setPointerCapture(ev.pointerId);
    held = 1;
  });
  const clear = () => (held = 0);
  node.addEventListener("pointerup", clear);
  node.addEventListener("pointercancel", clear);
  return () => held;
}

async function main(): Promise<void> {
  const banner = el<HTMLDivElement>("banner");
  const roleBadge = el<HTMLSpanElement>("role");
  const controls = el<HTMLDivElement>("controls");
  const canvas = el<HTMLCanvasElement>("scene");
  canvas.width = SCENE_SIZE + 38;
  canvas.height = SCENE_SIZE;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");

  const showRole = (role: string) => {
    roleBadge.textContent = role;
    roleBadge.className = role;
    controls.classList.toggle("inert", role !== "operator");
  };

  const client = new ConsoleClient({
    onRole: (msg) => showRole(msg.role),
    onError: (msg) => {
      banner.textContent = msg.reason;
      banner.style.display = "block";
      window.setTimeout(() => (banner.style.display = "none"), 4000);
    },
    onClose: () => {
      banner.textContent = "disconnected";
      banner.style.display = "block";
      showRole("offline");
    },
  });

  const url = wsUrl();
  banner.textContent = `connecting to ${url}`;
  banner.style.display = "block";
  const hello = await client.connect(
    url,
    (u) => new WebSocket(u) as unknown as SocketLike,
  );
  banner.style.display = "none";
  showRole(hello.role);
  el<HTMLSpanElement>("meta").textContent =
    `${hello.n_vehicles} vehicles, telemetry ${hello.telemetry_hz} Hz, ` +
    `time x${hello.time_scale}`;

  const edges = hello.edges;
  const store = new TelemetryStore(hello.n_vehicles, edges.length, 60);
  const trails = new Trails(hello.n_vehicles);

  const distChart = new uPlot(
    distanceChartOptions(edges.length, edges, CHART_WIDTH, CHART_HEIGHT),
    store.distanceData(),
    el("distance-chart"),
  );
  const velChart = new uPlot(
    velocityChartOptions(hello.n_vehicles, CHART_WIDTH, CHART_HEIGHT),
    store.velocityData(),
    el("velocity-chart"),
  );

  // input sources: keyboard set, two pads, altitude hold buttons
  const down = new Set<string>();
  window.addEventListener("keydown", (ev) => {
    if (ev.repeat) return;
    down.add(ev.code);
  });
  window.addEventListener("keyup", (ev) => down.delete(ev.code));
  window.addEventListener("blur", () => down.clear());

  const movePad = new StickPad(el("move-pad"), el("move-knob"));
  const turnPad = new StickPad(el("turn-pad"), el("turn-knob"));
  const altUp = holdButton(el("alt-up"));
  const altDown = holdButton(el("alt-down"));

  const currentSticks = (): StickState =>
    combineSticks(sticksFromKeys(down), {
      stick_x: movePad.x,
      stick_y: movePad.y,
      // dragging right turns clockwise; up grows the formation
      spin: -turnPad.x,
      scale: turnPad.y,
      altitude_delta: (altUp() - altDown()) * ALTITUDE_STEP,
    });

  const sender = new CommandSender((cmd) => client.sendCommand(cmd));
  window.setInterval(() => {
    if (client.role === "operator") {
      sender.tick(currentSticks());
    } else {
      sender.tick(ZERO_STICKS);
    }
  }, COMMAND_INTERVAL_MS);

  const clock = el<HTMLSpanElement>("clock");
  const render = () => {
    const frames = client.takeFrames();
    if (frames.length > 0) {
      for (const f of frames) {
        store.push(f);
        trails.push(f.positions as ReadonlyArray<readonly [number, number, number]>);
      }
      const last = frames[frames.length - 1]!;
      drawScene(ctx, last, edges, SCENE_SIZE, trails);
      distChart.setData(store.distanceData());
      velChart.setData(store.velocityData());
      clock.textContent = `t = ${last.t.toFixed(1)} s`;
    }
    requestAnimationFrame(render);
  };
  requestAnimationFrame(render);
}

main().catch((err) => {
  const banner = document.getElementById("banner");
  if (banner) {
    banner.textContent = `failed to start: ${String(err)}`;
    banner.style.display = "block";
  }
  console.error(err);
});
