/** Settlement panel model: fan breakdown, raw scores, the per-seat
 * compensation line (when the ruleset defines one), and final totals.
 *
 * Accepts either a live result frame's data (fan entries already named by
 * the server) or a stored match record's result (names looked up locally).
 * Anything structurally off produces an error panel instead of a crash.
 */

import fanNames from "./fanNames.json";
import type { ResultPayload } from "./protocol.js";

export interface FanRow {
  patternId: number;
  name: string;
  points: number;
  multiplicity: number;
}

export interface SettlementView {
  ok: true;
  winner: number | null;
  draw: boolean;
  forfeit: number | null;
  fanRows: FanRow[];
  fanTotal: number;
  rawScores: number[];
  /** per-seat compensation, shown as its own line; null when the ruleset
   * settles raw (classic) */
  compensation: number[] | null;
  totals: number[];
}

export interface SettlementError {
  ok: false;
  error: string;
}

export type Settlement = SettlementView | SettlementError;

const NAMES: Record<string, string> = fanNames;

function isNumberArray(value: unknown, length: number): value is number[] {
  return (
    Array.isArray(value) &&
    value.length === length &&
    value.every((x) => typeof x === "number" && Number.isFinite(x))
  );
}

/** Round away float dust from score+compensation sums (grid is 0.1). */
function clean(x: number): number {
  return Math.round(x * 10) / 10;
}

export function renderSettlement(result: unknown): Settlement {
  if (typeof result !== "object" || result === null) {
    return { ok: false, error: "settlement data is not an object" };
  }
  const data = result as Partial<ResultPayload>;
  if (data.winner !== null && typeof data.winner !== "number") {
    return { ok: false, error: "settlement has no winner field" };
  }
  if (!isNumberArray(data.scores, 4)) {
    return { ok: false, error: "settlement needs four numeric scores" };
  }
  if (!Array.isArray(data.fan_list)) {
    return { ok: false, error: "settlement fan list is missing" };
  }
  const compensated = data.compensated_scores ?? null;
  if (compensated !== null && !isNumberArray(compensated, 4)) {
    return { ok: false, error: "compensated scores must be four numbers" };
  }

  const rows = new Map<string, FanRow>();
  for (const entry of data.fan_list) {
    if (
      typeof entry !== "object" ||
      entry === null ||
      typeof entry.pattern_id !== "number" ||
      typeof entry.points !== "number"
    ) {
      return { ok: false, error: "settlement fan list entry is malformed" };
    }
    const name = entry.name ?? NAMES[String(entry.pattern_id)];
    if (typeof name !== "string") {
      return { ok: false, error: `unknown fan pattern id ${entry.pattern_id}` };
    }
    const key = `${entry.pattern_id}:${entry.points}`;
    const row = rows.get(key);
    if (row) {
      row.multiplicity += 1;
    } else {
      rows.set(key, {
        patternId: entry.pattern_id,
        name,
        points: entry.points,
        multiplicity: 1,
      });
    }
  }

  const rawScores = data.scores;
  const totals = compensated ? compensated.map(clean) : [...rawScores];
  const compensation = compensated
    ? compensated.map((c, i) => clean(c - rawScores[i]))
    : null;

  return {
    ok: true,
    winner: data.winner ?? null,
    draw: data.winner === null || data.winner === undefined,
    forfeit: typeof data.forfeit === "number" ? data.forfeit : null,
    fanRows: [...rows.values()].sort((a, b) => b.points - a.points || a.patternId - b.patternId),
    fanTotal: typeof data.fan_total === "number" ? data.fan_total : 0,
    rawScores,
    compensation,
    totals,
  };
}

const SEAT_NAMES = ["East", "South", "West", "North"];

export function seatName(seat: number): string {
  return SEAT_NAMES[seat] ?? `seat ${seat}`;
}

function signed(x: number): string {
  const text = Number.isInteger(x) ? String(x) : x.toFixed(1);
  return x > 0 ? `+${text}` : text;
}

/** Plain-text form of the panel (for tests, logs, and the replay footer). */
export function settlementText(s: Settlement): string {
  if (!s.ok) return `settlement unavailable: ${s.error}`;
  const lines: string[] = [];
  if (s.forfeit !== null) {
    lines.push(`forfeit by ${seatName(s.forfeit)}`);
  } else if (s.draw) {
    lines.push("drawn match");
  } else {
    lines.push(`${seatName(s.winner!)} wins, ${s.fanTotal} points`);
    for (const row of s.fanRows) {
      const mult = row.multiplicity > 1 ? ` x${row.multiplicity}` : "";
      lines.push(`  ${row.name}${mult}  ${row.points * row.multiplicity}`);
    }
  }
  lines.push(`scores: [${s.rawScores.join(", ")}]`);
  if (s.compensation) {
    lines.push(`compensation: [${s.compensation.map(signed).join(", ")}]`);
  }
  lines.push(`totals: [${s.totals.map((x) => (Number.isInteger(x) ? String(x) : x.toFixed(1))).join(", ")}]`);
  return lines.join("\n");
}
