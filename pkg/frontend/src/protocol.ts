/**
 * Wire schema for the match protocol (docs/protocol.md), version 1.
 *
 * Every schema is strict: an unknown field in a server message is a schema
 * mismatch and surfaces as a protocol-error banner rather than being
 * silently dropped, so drift between client and server is caught early.
 */
import { z } from "zod";

export const PROTO_VERSION = 1;

const statusSchema = z.union([z.string(), z.null()]);

export const monViewSchema = z
  .object({
    species: z.string(),
    hp_fraction: z.number().min(0).max(1),
    status: statusSchema,
    fainted: z.boolean(),
    revealed: z.boolean(),
    tera_active: z.boolean(),
    active_slot: z.union([z.number().int().min(0).max(1), z.null()]),
    // present only while active
    boosts: z.record(z.number().int()).optional(),
    // own side or open team sheets: full; otherwise only revealed info
    moves: z.array(z.string()).optional(),
    ability: z.string().optional(),
    item: z.union([z.string(), z.null()]).optional(),
    tera_type: z.string().optional(),
    // own side only
    stats: z.record(z.number()).optional(),
  })
  .strict();

export const sideViewSchema = z
  .object({
    player: z.number().int().min(1).max(2),
    own: z.boolean(),
    team: z.array(monViewSchema).length(6),
    chosen: z.array(z.number().int().min(1).max(6)),
    active: z.array(z.union([z.number().int().min(1).max(6), z.null()])),
    tera_used: z.boolean(),
    conditions: z.record(z.number()),
  })
  .strict();

export const stateSchema = z
  .object({
    type: z.literal("state"),
    proto: z.literal(PROTO_VERSION),
    phase: z.enum(["TeamPreview1", "TeamPreview2", "Turn", "Terminal"]),
    turn: z.number().int().min(0),
    weather: z.union([z.string(), z.null()]),
    weather_turns: z.number().int(),
    terrain: z.union([z.string(), z.null()]),
    terrain_turns: z.number().int(),
    sides: z.array(sideViewSchema).length(2),
    winner: z.union([z.number().int().min(1).max(2), z.null()]),
  })
  .strict();

export const sessionSchema = z
  .object({
    type: z.literal("session"),
    proto: z.literal(PROTO_VERSION),
    token: z.string(),
    games_played: z.number().int().min(0),
    games_total: z.number().int().min(1),
    score: z.object({ you: z.number().int(), agent: z.number().int() }).strict(),
    session_complete: z.boolean(),
  })
  .strict();

export const requestSchema = z
  .object({
    type: z.literal("request"),
    proto: z.literal(PROTO_VERSION),
    phase: z.string(),
    turn: z.number().int(),
    legal_a: z.array(z.number().int().min(0).max(106)),
    legal_b: z.array(z.number().int().min(0).max(106)),
    forbid_pass_pass: z.boolean(),
    deadline: z.null(),
  })
  .strict();

export const commitSchema = z
  .object({
    type: z.literal("commit"),
    proto: z.literal(PROTO_VERSION),
    turn: z.number().int(),
  })
  .strict();

export const revealSchema = z
  .object({
    type: z.literal("reveal"),
    proto: z.literal(PROTO_VERSION),
    events: z.array(z.string()),
  })
  .strict();

export const endSchema = z
  .object({
    type: z.literal("end"),
    proto: z.literal(PROTO_VERSION),
    winner: z.number().int().min(1).max(2),
    you_won: z.boolean(),
    score: z.object({ you: z.number().int(), agent: z.number().int() }).strict(),
    games_played: z.number().int(),
    games_total: z.number().int(),
    session_complete: z.boolean(),
  })
  .strict();

export const errorSchema = z
  .object({
    type: z.literal("error"),
    proto: z.literal(PROTO_VERSION),
    message: z.string(),
    index: z.number().int().optional(),
  })
  .strict();

export const serverMessageSchema = z.discriminatedUnion("type", [
  sessionSchema,
  stateSchema,
  requestSchema,
  commitSchema,
  revealSchema,
  endSchema,
  errorSchema,
]);

export type MonView = z.infer<typeof monViewSchema>;
export type SideView = z.infer<typeof sideViewSchema>;
export type StateMessage = z.infer<typeof stateSchema>;
export type SessionMessage = z.infer<typeof sessionSchema>;
export type RequestMessage = z.infer<typeof requestSchema>;
export type CommitMessage = z.infer<typeof commitSchema>;
export type RevealMessage = z.infer<typeof revealSchema>;
export type EndMessage = z.infer<typeof endSchema>;
export type ErrorMessage = z.infer<typeof errorSchema>;
export type ServerMessage = z.infer<typeof serverMessageSchema>;

export interface HelloMessage {
  type: "hello";
  proto: typeof PROTO_VERSION;
  token?: string;
}

export interface ChooseMessage {
  type: "choose";
  proto: typeof PROTO_VERSION;
  actions: [number, number];
}

export function hello(token?: string): HelloMessage {
  return token === undefined
    ? { type: "hello", proto: PROTO_VERSION }
    : { type: "hello", proto: PROTO_VERSION, token };
}

export function choose(a: number, b: number): ChooseMessage {
  return { type: "choose", proto: PROTO_VERSION, actions: [a, b] };
}
