/** Replay viewer: steps a stored match record event by event.
 *
 * A record carries the full wall and the unredacted event log, so the
 * viewer reconstructs every seat's hand with container bookkeeping only:
 * the deal takes the first 52 wall tiles round-robin, draw events consume
 * the wall front, kong replacements consume the wall back (the referee
 * takes those silently, so they never appear as events), and claim windows
 * resolve by the recorded responses (win over pung/kong over chow, nearer
 * seat first).  No scoring happens here; the final panel renders the
 * record's own settlement.
 */

import type { ActionKindName, EventPayload, MatchRecordPayload, MeldPayload } from "./protocol.js";
import { renderSettlement, Settlement } from "./settlement.js";
import { kindIndex, sortTiles } from "./tiles.js";

const DEAL_COUNT = 52;

const CLAIM_RESPONSES: ReadonlySet<ActionKindName> = new Set([
  "pass",
  "chow",
  "pung",
  "melded_kong",
  "win_discard",
  "win_rob_kong",
]);

interface PendingWindow {
  trigger: "discard" | "rob";
  sourceSeat: number;
  tile: string;
  responses: { seat: number; event: EventPayload }[];
}

export interface ReplayFrame {
  /** events applied so far (claim responses count as events) */
  step: number;
  hands: string[][];
  melds: MeldPayload[];
  discards: string[][];
  wallRemaining: number;
  lastEvent: EventPayload | null;
  finished: boolean;
  settlement: Settlement | null;
}

function claimPriority(kind: ActionKindName): number {
  if (kind === "win_discard" || kind === "win_rob_kong") return 3;
  if (kind === "pung" || kind === "melded_kong") return 2;
  if (kind === "chow") return 1;
  return 0;
}

export class ReplayViewer {
  readonly record: MatchRecordPayload;
  private hands: string[][] = [[], [], [], []];
  private melds: MeldPayload[] = [];
  private discards: string[][] = [[], [], [], []];
  private front = 0;
  private back: number;
  private cursor = 0;
  private window: PendingWindow | null = null;
  private lastEvent: EventPayload | null = null;

  constructor(record: MatchRecordPayload) {
    if (!Array.isArray(record.wall) || !Array.isArray(record.events)) {
      throw new Error("not a full match record (wall and events required)");
    }
    this.record = record;
    this.back = record.wall.length - 1;
    for (let i = 0; i < DEAL_COUNT; i += 1) {
      this.hands[i % 4].push(this.record.wall[this.front]);
      this.front += 1;
    }
  }

  get length(): number {
    return this.record.events.length;
  }

  get step(): number {
    return this.cursor;
  }

  frame(): ReplayFrame {
    const finished = this.cursor >= this.length;
    return {
      step: this.cursor,
      hands: this.hands.map((h) => sortTiles(h)),
      melds: [...this.melds],
      discards: this.discards.map((d) => [...d]),
      wallRemaining: this.back - this.front + 1,
      lastEvent: this.lastEvent,
      finished,
      settlement: finished ? renderSettlement(this.record.result) : null,
    };
  }

  /** Apply the next event; returns the new frame (or the final one). */
  next(): ReplayFrame {
    if (this.cursor >= this.length) return this.frame();
    const event = this.record.events[this.cursor];
    this.cursor += 1;
    this.apply(event);
    this.lastEvent = event;
    if (this.cursor >= this.length) this.resolveWindow();
    return this.frame();
  }

  /** Run the remaining events; the returned frame holds the settlement. */
  toEnd(): ReplayFrame {
    while (this.cursor < this.length) this.next();
    return this.frame();
  }

  private apply(event: EventPayload): void {
    if (this.window) {
      if (
        CLAIM_RESPONSES.has(event.action) &&
        event.seat !== this.window.sourceSeat &&
        !this.window.responses.some((r) => r.seat === event.seat)
      ) {
        this.window.responses.push({ seat: event.seat, event });
        return;
      }
      this.resolveWindow();
    }
    const hand = this.hands[event.seat];
    switch (event.action) {
      case "draw": {
        hand.push(this.record.wall[this.front]);
        this.front += 1;
        break;
      }
      case "discard": {
        this.removeTile(hand, event.tiles[0]);
        this.discards[event.seat].push(event.tiles[0]);
        this.window = {
          trigger: "discard",
          sourceSeat: event.seat,
          tile: event.tiles[0],
          responses: [],
        };
        break;
      }
      case "concealed_kong": {
        for (const t of event.tiles) this.removeTile(hand, t);
        this.melds.push({
          seat: event.seat,
          kind: "kong_concealed",
          tiles: [...event.tiles],
          claimed_from: null,
        });
        this.replacementDraw(event.seat);
        break;
      }
      case "added_kong": {
        this.removeTile(hand, event.tiles[0]);
        this.window = {
          trigger: "rob",
          sourceSeat: event.seat,
          tile: event.tiles[0],
          responses: [],
        };
        break;
      }
      case "win_self_draw": {
        break; // scores live in the record's settlement
      }
      default:
        throw new Error(`event ${event.action} outside a claim window`);
    }
  }

  private resolveWindow(): void {
    const window = this.window;
    if (!window) return;
    this.window = null;
    let best: { seat: number; event: EventPayload } | null = null;
    let bestRank = 0;
    for (let dist = 1; dist < 4; dist += 1) {
      const seat = (window.sourceSeat + dist) % 4;
      const response = window.responses.find((r) => r.seat === seat);
      if (!response) continue;
      const rank = claimPriority(response.event.action);
      if (rank > bestRank) {
        best = response;
        bestRank = rank;
      }
    }
    if (window.trigger === "rob") {
      if (best && best.event.action === "win_rob_kong") return; // match over
      this.completeAddedKong(window.sourceSeat, window.tile);
      return;
    }
    if (!best || best.event.action === "pass") return;
    const claimed = this.discards[window.sourceSeat].pop();
    if (claimed === undefined) throw new Error("claim with an empty discard row");
    if (best.event.action === "win_discard") return;
    const claimant = this.hands[best.seat];
    const using = best.event.tiles;
    for (const t of using) this.removeTile(claimant, t);
    const meldTiles =
      best.event.action === "chow"
        ? [...using, claimed].sort((a, b) => kindIndex(a) - kindIndex(b))
        : [...using, claimed];
    const meldKind =
      best.event.action === "chow"
        ? "chow"
        : best.event.action === "pung"
          ? "pung"
          : "kong_melded";
    this.melds.push({
      seat: best.seat,
      kind: meldKind,
      tiles: meldTiles,
      claimed_from: window.sourceSeat,
    });
    if (best.event.action === "melded_kong") this.replacementDraw(best.seat);
  }

  private completeAddedKong(seat: number, tile: string): void {
    const kind = kindIndex(tile);
    for (const meld of this.melds) {
      if (
        meld.seat === seat &&
        meld.kind === "pung" &&
        meld.tiles !== null &&
        kindIndex(meld.tiles[0]) === kind
      ) {
        meld.kind = "kong_added";
        meld.tiles = [...meld.tiles, tile];
        this.replacementDraw(seat);
        return;
      }
    }
    throw new Error("added kong without a matching pung");
  }

  private replacementDraw(seat: number): void {
    // silent in the log: the referee hands the tile from the wall back
    this.hands[seat].push(this.record.wall[this.back]);
    this.back -= 1;
  }

  private removeTile(hand: string[], tile: string): void {
    const at = hand.indexOf(tile);
    if (at === -1) throw new Error(`tile ${tile} not in hand`);
    hand.splice(at, 1);
  }
}
