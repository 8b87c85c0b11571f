/**
 * Websocket client for the operator console.
 *
 * Keeps the transport swappable: the browser passes the native
 * WebSocket constructor, tests pass the `ws` package. Both expose the
 * same onopen/onmessage/onclose/onerror surface.
 */

import {
  Ack,
  Hello,
  OperatorCommand,
  RoleChange,
  ServerError,
  Telemetry,
  parseServerMessage,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientEvents {
  onTelemetry?: (frame: Telemetry) => void;
  onAck?: (ack: Ack) => void;
  onRole?: (role: RoleChange) => void;
  onError?: (err: ServerError) => void;
  onClose?: () => void;
}

// Bound on buffered frames between rendering passes; at 20 Hz this is
// 30 s of backlog, far more than a stalled tab ever needs.
const MAX_QUEUED_FRAMES = 600;

export class ConsoleClient {
  private socket: SocketLike | null = null;
  private queue: Telemetry[] = [];
  private helloMsg: Hello | null = null;
  private currentRole: "operator" | "observer" | null = null;

  constructor(private events: ClientEvents = {}) {}

  get hello(): Hello | null {
    return this.helloMsg;
  }

  get role(): "operator" | "observer" | null {
    return this.currentRole;
  }

  get lastFrame(): Telemetry | null {
    return this.last;
  }

  private last: Telemetry | null = null;

  /** Resolves once the server's hello has been received and validated. */
  connect(url: string, factory: SocketFactory): Promise<Hello> {
    return new Promise((resolve, reject) => {
      const socket = factory(url);
      this.socket = socket;
      let settled = false;

      socket.onerror = (ev) => {
        if (!settled) {
          settled = true;
          reject(ev instanceof Error ? ev : new Error("websocket error"));
        }
      };

      socket.onclose = () => {
        if (!settled) {
          settled = true;
          reject(new Error("socket closed before hello"));
        }
        this.events.onClose?.();
      };

      socket.onmessage = (ev) => {
        let msg;
        try {
          msg = parseServerMessage(String(ev.data));
        } catch (err) {
          if (!settled) {
            settled = true;
            reject(err);
            socket.close();
            return;
          }
          this.events.onError?.({
            type: "error",
            reason: `malformed frame: ${String(err)}`,
          });
          return;
        }

        switch (msg.type) {
          case "hello":
            this.helloMsg = msg;
            this.currentRole = msg.role;
            if (!settled) {
              settled = true;
              resolve(msg);
            }
            break;
          case "telemetry":
            this.last = msg;
            this.queue.push(msg);
            if (this.queue.length > MAX_QUEUED_FRAMES) {
              this.queue.splice(0, this.queue.length - MAX_QUEUED_FRAMES);
            }
            this.events.onTelemetry?.(msg);
            break;
          case "ack":
            this.events.onAck?.(msg);
            break;
          case "role":
            this.currentRole = msg.role;
            this.events.onRole?.(msg);
            break;
          case "error":
            this.events.onError?.(msg);
            break;
        }
      };
    });
  }

  /** Drain frames accumulated since the last call, oldest first. */
  takeFrames(): Telemetry[] {
    if (this.queue.length === 0) return [];
    const out = this.queue;
    this.queue = [];
    return out;
  }

  sendCommand(cmd: OperatorCommand): void {
    if (!this.socket) throw new Error("not connected");
    this.socket.send(JSON.stringify(cmd));
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }
}
