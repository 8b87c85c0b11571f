/**
 * Keyboard-to-stick mapping and the fixed-rate command sender.
 *
 * WASD translates, Q/E spins, R/F scales, arrow up/down steps the
 * altitude setpoint. Keys act as full-deflection virtual sticks; the
 * server clamps and integrates.
 */

import { OperatorCommand } from "./protocol.js";

export interface StickState {
  stick_x: number;
  stick_y: number;
  spin: number;
  scale: number;
  altitude_delta: number;
}

export const ZERO_STICKS: StickState = {
  stick_x: 0,
  stick_y: 0,
  spin: 0,
  scale: 0,
  altitude_delta: 0,
};

// Per keypress-tick altitude step in metres; ten ticks a second while
// held gives 0.5 m/s of setpoint slew.
export const ALTITUDE_STEP = 0.05;

const clamp = (v: number, lo: number, hi: number) =>
  Math.min(hi, Math.max(lo, v));

export function clampSticks(s: StickState): StickState {
  return {
    stick_x: clamp(s.stick_x, -1, 1),
    stick_y: clamp(s.stick_y, -1, 1),
    spin: clamp(s.spin, -1, 1),
    scale: clamp(s.scale, -1, 1),
    altitude_delta: clamp(s.altitude_delta, -0.5, 0.5),
  };
}

/** Map the set of held key codes to a stick state. */
export function sticksFromKeys(down: ReadonlySet<string>): StickState {
  const has = (code: string) => (down.has(code) ? 1 : 0);
  return clampSticks({
    stick_x: has("KeyD") - has("KeyA"),
    stick_y: has("KeyW") - has("KeyS"),
    spin: has("KeyQ") - has("KeyE"),
    scale: has("KeyR") - has("KeyF"),
    altitude_delta: (has("ArrowUp") - has("ArrowDown")) * ALTITUDE_STEP,
  });
}

/** Pointer offset inside a pad (screen y down) to stick axes (y up). */
export function padSticks(
  dx: number,
  dy: number,
  radius: number,
): { x: number; y: number } {
  const clamp1 = (v: number) => Math.min(1, Math.max(-1, v));
  return { x: clamp1(dx / radius), y: clamp1(-dy / radius) };
}

/** Sum several stick sources (keyboard, pads) and clamp the result. */
export function combineSticks(...states: StickState[]): StickState {
  const sum = { ...ZERO_STICKS };
  for (const s of states) {
    sum.stick_x += s.stick_x;
    sum.stick_y += s.stick_y;
    sum.spin += s.spin;
    sum.scale += s.scale;
    sum.altitude_delta += s.altitude_delta;
  }
  return clampSticks(sum);
}

export function isZero(s: StickState): boolean {
  return (
    s.stick_x === 0 &&
    s.stick_y === 0 &&
    s.spin === 0 &&
    s.scale === 0 &&
    s.altitude_delta === 0
  );
}

/**
 * Send while deflected, plus exactly one trailing zero so the server
 * sees the release without being spammed at rest.
 */
export function shouldSend(prev: StickState, cur: StickState): boolean {
  return !isZero(cur) || !isZero(prev);
}

export function toCommand(s: StickState): OperatorCommand {
  return { type: "command", ...clampSticks(s) };
}

/**
 * Drives command emission on a fixed timer. The caller owns the timer;
 * tick() is called with the current stick state and reports whether a
 * command went out.
 */
export class CommandSender {
  private prev: StickState = ZERO_STICKS;

  constructor(private send: (cmd: OperatorCommand) => void) {}

  tick(cur: StickState): boolean {
    const fire = shouldSend(this.prev, cur);
    if (fire) this.send(toCommand(cur));
    this.prev = cur;
    return fire;
  }

  reset(): void {
    this.prev = ZERO_STICKS;
  }
}
