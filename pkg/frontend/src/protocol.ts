/**
 * Wire protocol for the simulator's websocket bridge, schema_version 1.
 *
 * Every inbound frame is validated before the rest of the console sees
 * it, so a server drift or a truncated frame fails loudly at the edge
 * instead of as NaN in a chart.
 */

import { z } from "zod";

export const SCHEMA_VERSION = 1;

const vec3 = z.tuple([z.number(), z.number(), z.number()]);

export const helloSchema = z.object({
  type: z.literal("hello"),
  schema_version: z.literal(SCHEMA_VERSION),
  role: z.enum(["operator", "observer"]),
  n_vehicles: z.number().int().positive(),
  edges: z.array(z.tuple([z.number().int(), z.number().int()])),
  desired_distances: z.array(z.number()),
  rates: z.object({
    plant_hz: z.number(),
    control_hz: z.number(),
    guidance_hz: z.number(),
  }),
  telemetry_hz: z.number(),
  time_scale: z.number(),
});

/** The clamped motion command the sim is actually flying. */
export const appliedCommandSchema = z.object({
  v_x: z.number(),
  v_y: z.number(),
  spin: z.number(),
  scale_rate: z.number(),
  altitude: z.number(),
});

export const telemetrySchema = z.object({
  type: z.literal("telemetry"),
  t: z.number(),
  positions: z.array(vec3),
  velocities: z.array(vec3),
  attitudes: z.array(vec3),
  distances: z.array(z.number()),
  desired_distances: z.array(z.number()),
  payload_position: vec3,
  tensions: z.array(z.number()),
  saturated: z.array(z.number()),
  command: appliedCommandSchema,
});

export const sticksSchema = z.object({
  stick_x: z.number(),
  stick_y: z.number(),
  spin: z.number(),
  scale: z.number(),
  altitude_delta: z.number(),
});

export const ackSchema = z.object({
  type: z.literal("ack"),
  command: sticksSchema,
  applied: appliedCommandSchema,
  t: z.number().nullable(),
});

export const roleSchema = z.object({
  type: z.literal("role"),
  role: z.enum(["operator", "observer"]),
});

export const errorSchema = z.object({
  type: z.literal("error"),
  reason: z.string(),
});

export const serverMessageSchema = z.discriminatedUnion("type", [
  helloSchema,
  telemetrySchema,
  ackSchema,
  roleSchema,
  errorSchema,
]);

export type Hello = z.infer<typeof helloSchema>;
export type Telemetry = z.infer<typeof telemetrySchema>;
export type Ack = z.infer<typeof ackSchema>;
export type RoleChange = z.infer<typeof roleSchema>;
export type ServerError = z.infer<typeof errorSchema>;
export type ServerMessage = z.infer<typeof serverMessageSchema>;

/** Client -> server. Omitted sticks are treated as centered by the server. */
export interface OperatorCommand {
  type: "command";
  stick_x?: number;
  stick_y?: number;
  spin?: number;
  scale?: number;
  altitude_delta?: number;
}

export function parseServerMessage(raw: string): ServerMessage {
  return serverMessageSchema.parse(JSON.parse(raw));
}
