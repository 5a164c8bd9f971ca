/** The client-side table view and its frame reducer.
 *
 * The view renders only what the observation frame carries: the own hand,
 * every seat's melds and discards, the wall count, whose turn it is, and the
 * pending prompt.  Rival concealed tiles never reach the client, so there is
 * nothing here that could leak them.
 */

import type {
  Choice,
  EventPayload,
  MeldPayload,
  ObservationPayload,
  ResultPayload,
  ServerFrame,
} from "./protocol.js";
import { choicesFor } from "./protocol.js";
import { renderSettlement, Settlement } from "./settlement.js";
import { sortTiles } from "./tiles.js";

export interface ClaimPrompt {
  requestKind: "act_now" | "claim_or_pass";
  choices: Choice[];
  claimTile: string | null;
  /** epoch ms when the seat auto-passes / the bot takes the turn */
  deadline: number;
  /** observation step the prompt belongs to; one response per prompt */
  step: number;
}

export interface TableView {
  connection: "connecting" | "open" | "closed";
  tableId: string | null;
  matchId: string | null;
  rulesetId: string;
  status: string;
  seat: number;
  takenOver: boolean;
  hand: string[];
  lastDrawn: string | null;
  melds: MeldPayload[];
  discards: string[][];
  wallRemaining: number;
  currentSeat: number;
  myTurn: boolean;
  prompt: ClaimPrompt | null;
  events: EventPayload[];
  settlement: Settlement | null;
  lastRejection: string | null;
  timeouts: { act: number; claim: number };
}

export function initialView(rulesetId: string): TableView {
  return {
    connection: "connecting",
    tableId: null,
    matchId: null,
    rulesetId,
    status: "waiting",
    seat: -1,
    takenOver: false,
    hand: [],
    lastDrawn: null,
    melds: [],
    discards: [[], [], [], []],
    wallRemaining: 0,
    currentSeat: 0,
    myTurn: false,
    prompt: null,
    events: [],
    settlement: null,
    lastRejection: null,
    timeouts: { act: 30, claim: 10 },
  };
}

function promptFrom(
  obs: ObservationPayload,
  step: number,
  now: number,
  timeouts: { act: number; claim: number },
): ClaimPrompt | null {
  if (!obs.request_kind) return null;
  const choices = choicesFor(obs);
  if (choices.length === 0) return null; // forced draw: the server moves on its own
  const seconds = obs.request_kind === "claim_or_pass" ? timeouts.claim : timeouts.act;
  return {
    requestKind: obs.request_kind,
    choices,
    claimTile: obs.claim_tile,
    deadline: now + seconds * 1000,
    step,
  };
}

/** Apply one server frame; pure, returns a fresh view. */
export function applyFrame(view: TableView, frame: ServerFrame, now: number): TableView {
  switch (frame.type) {
    case "welcome":
      return {
        ...view,
        connection: "open",
        tableId: frame.table_id,
        seat: frame.seat,
        status: frame.status,
        takenOver: frame.taken_over,
        timeouts: frame.timeouts ?? view.timeouts,
      };
    case "observation": {
      const obs = frame.data;
      const prompt = promptFrom(obs, frame.step, now, view.timeouts);
      const samePrompt =
        prompt !== null &&
        view.prompt !== null &&
        view.prompt.step === frame.step &&
        view.prompt.requestKind === prompt.requestKind;
      return {
        ...view,
        status: "playing",
        matchId: obs.match_id,
        seat: obs.seat,
        hand: sortTiles(obs.concealed),
        lastDrawn: obs.last_drawn,
        melds: obs.melds,
        discards: obs.discards,
        wallRemaining: obs.wall_remaining,
        currentSeat: obs.current_seat,
        myTurn: obs.current_seat === obs.seat,
        // a re-sent observation (reconnect) keeps the original deadline
        prompt: samePrompt ? view.prompt : prompt,
        events: obs.events,
        lastRejection: null,
      };
    }
    case "result":
      return {
        ...view,
        status: "finished",
        prompt: null,
        settlement: renderSettlement(frame.data as ResultPayload),
      };
    case "rejected":
      return { ...view, lastRejection: frame.reason };
  }
}
