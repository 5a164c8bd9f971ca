/** Wire types for the table service, plus the response-grammar formatter.
 *
 * The server is the only rules authority: every choice offered to the user
 * comes from the observation's legal set, already filtered per seat.  The
 * client's sole protocol duty is rendering a chosen legal action as one
 * grammar line; the shared conformance vectors pin this formatter to the
 * server-side parser.
 */

import { compareTiles, kindIndex, kindOf, sortTiles } from "./tiles.js";

export type ActionKindName =
  | "draw"
  | "discard"
  | "chow"
  | "pung"
  | "melded_kong"
  | "concealed_kong"
  | "added_kong"
  | "win_self_draw"
  | "win_discard"
  | "win_rob_kong"
  | "pass";

export interface ActionPayload {
  kind: ActionKindName;
  tile: string | null;
  using: string[];
}

export interface MeldPayload {
  seat: number;
  kind: string;
  /** null when a rival's concealed kong hides its tiles */
  tiles: string[] | null;
  claimed_from: number | null;
}

export interface EventPayload {
  seat: number;
  action: ActionKindName;
  tiles: string[];
}

export interface ObservationPayload {
  match_id: string;
  seat: number;
  request_kind: "act_now" | "claim_or_pass" | null;
  phase: string;
  concealed: string[];
  melds: MeldPayload[];
  discards: string[][];
  wall_remaining: number;
  current_seat: number;
  legal: ActionPayload[];
  events: EventPayload[];
  claim_tile: string | null;
  visible_counts: number[];
  last_drawn: string | null;
}

export interface FanEntry {
  pattern_id: number;
  points: number;
  name?: string;
}

export interface ResultPayload {
  winner: number | null;
  fan_list: FanEntry[];
  fan_total: number;
  scores: number[];
  compensated_scores: number[] | null;
  forfeit?: number;
}

export interface MatchRecordPayload {
  match_id: string;
  seed: number | null;
  ruleset_id: string;
  wall: string[];
  events: EventPayload[];
  result: ResultPayload;
}

export interface WelcomeFrame {
  type: "welcome";
  table_id: string;
  seat: number;
  status: string;
  taken_over: boolean;
  timeouts?: { act: number; claim: number };
}

export interface ObservationFrame {
  type: "observation";
  step: number;
  data: ObservationPayload;
  grammar: string[];
}

export interface ResultFrame {
  type: "result";
  match_id: string;
  data: ResultPayload;
}

export interface RejectedFrame {
  type: "rejected";
  reason: string;
  legal: string[];
}

export type ServerFrame = WelcomeFrame | ObservationFrame | ResultFrame | RejectedFrame;

export function parseFrame(text: string): ServerFrame {
  const data = JSON.parse(text);
  if (
    typeof data !== "object" ||
    data === null ||
    !["welcome", "observation", "result", "rejected"].includes(data.type)
  ) {
    throw new Error(`unrecognized frame: ${text.slice(0, 120)}`);
  }
  return data as ServerFrame;
}

/** Anything the formatter needs beyond the action: the claim tile (for the
 * chow's middle-tile name) and the concealed hand (for the planned follow-up
 * discard that PENG/CHI carry in their textual slot). */
export interface GrammarContext {
  claim_tile: string | null;
  concealed: readonly string[];
}

/** Lowest concealed tile not committed to the claim; the textual follow-up
 * slot only — the server collects the real discard in its own request. */
function followTile(action: ActionPayload, ctx: GrammarContext): string {
  const used = new Set(action.using);
  const spare = sortTiles(ctx.concealed).filter((t) => !used.has(t));
  if (spare.length === 0) throw new Error("no spare tile for the follow-up slot");
  return spare[0];
}

function chowMid(action: ActionPayload, ctx: GrammarContext): string {
  const kinds = action.using.map((t) => kindIndex(t));
  if (ctx.claim_tile !== null) kinds.push(kindIndex(ctx.claim_tile));
  kinds.sort((a, b) => a - b);
  const mid = kinds[Math.floor(kinds.length / 2)];
  // suited kinds only: 0..26 in 9-rank suits
  const suit = "WBT"[Math.floor(mid / 9)];
  return `${suit}${(mid % 9) + 1}`;
}

/** One legal action rendered in the response grammar. */
export function actionLine(action: ActionPayload, ctx: GrammarContext): string {
  switch (action.kind) {
    case "pass":
      return "PASS";
    case "win_self_draw":
    case "win_discard":
    case "win_rob_kong":
      return "HU";
    case "discard":
      return `PLAY ${kindOf(action.tile!)}`;
    case "pung":
      return `PENG ${kindOf(followTile(action, ctx))}`;
    case "chow":
      return `CHI ${chowMid(action, ctx)} ${kindOf(followTile(action, ctx))}`;
    case "concealed_kong":
      return `GANG ${kindOf(action.using[0])}`;
    case "melded_kong":
      return "GANG";
    case "added_kong":
      return `BUGANG ${kindOf(action.tile!)}`;
    case "draw":
      throw new Error("the forced draw has no grammar form");
  }
}

export interface Choice {
  action: ActionPayload;
  line: string;
}

function actionOrder(a: ActionPayload, b: ActionPayload): number {
  if (a.kind !== b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.tile && b.tile) return compareTiles(a.tile, b.tile);
  return 0;
}

/** The observation's legal set as tappable choices, one per grammar line.
 *
 * Pure pre-filtering: only server-approved actions appear, the forced draw
 * is omitted (the server takes it silently), and actions that render to the
 * same line collapse into one button.
 */
export function choicesFor(obs: ObservationPayload): Choice[] {
  const ctx: GrammarContext = { claim_tile: obs.claim_tile, concealed: obs.concealed };
  const seen = new Set<string>();
  const choices: Choice[] = [];
  for (const action of [...obs.legal].sort(actionOrder)) {
    if (action.kind === "draw") continue;
    const line = actionLine(action, ctx);
    if (seen.has(line)) continue;
    seen.add(line);
    choices.push({ action, line });
  }
  return choices;
}
