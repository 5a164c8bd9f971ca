/** HTML renderers: pure functions from view models to markup strings.
 *
 * Everything here draws observation data as-is; the only transformation is
 * display sorting, which the state layer already did.
 */

import type { ReplayFrame } from "./replay.js";
import { seatName, Settlement } from "./settlement.js";
import type { TableView } from "./state.js";
import { tileGlyph, kindOf } from "./tiles.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function tileSpan(code: string, extra = ""): string {
  const kind = kindOf(code);
  return (
    `<span class="tile${extra}" data-tile="${escapeHtml(code)}">` +
    `<span class="glyph">${tileGlyph(code)}</span>` +
    `<span class="code">${escapeHtml(kind)}</span></span>`
  );
}

function tileRow(codes: readonly string[]): string {
  return codes.map((c) => tileSpan(c)).join("");
}

export function renderHand(view: TableView): string {
  const tiles = view.hand
    .map((code) => tileSpan(code, code === view.lastDrawn ? " drawn" : " own"))
    .join("");
  return `<div class="hand" data-zone="hand">${tiles}</div>`;
}

export function renderSeats(view: TableView): string {
  const rows: string[] = [];
  for (let seat = 0; seat < 4; seat += 1) {
    const turn = seat === view.currentSeat ? " turn" : "";
    const me = seat === view.seat ? " me" : "";
    const melds = view.melds
      .filter((m) => m.seat === seat)
      .map((m) => {
        const tiles = m.tiles === null ? "🀫🀫🀫🀫" : tileRow(m.tiles);
        return `<span class="meld" title="${escapeHtml(m.kind)}">${tiles}</span>`;
      })
      .join("");
    const discards = tileRow(view.discards[seat] ?? []);
    rows.push(
      `<div class="seat${turn}${me}" data-seat="${seat}">` +
        `<div class="seat-name">${seatName(seat)}${me ? " (you)" : ""}` +
        `${turn ? '<span class="turn-marker"> ◀ to act</span>' : ""}</div>` +
        `<div class="melds">${melds}</div>` +
        `<div class="discards">${discards}</div>` +
        `</div>`,
    );
  }
  return rows.join("");
}

export function renderStatusBar(view: TableView, secondsLeft: number | null): string {
  const badge = `<span class="badge ruleset">${escapeHtml(view.rulesetId)}</span>`;
  const wall = `<span class="wall">wall ${view.wallRemaining}</span>`;
  const turn = `<span class="turn">turn: ${seatName(view.currentSeat)}</span>`;
  const conn = `<span class="conn ${view.connection}">${view.connection}</span>`;
  const countdown =
    secondsLeft !== null ? `<span class="countdown">${secondsLeft.toFixed(0)}s</span>` : "";
  return `${badge}${wall}${turn}${conn}${countdown}`;
}

export function renderPrompt(view: TableView, secondsLeft: number | null): string {
  const prompt = view.prompt;
  if (!prompt) return "";
  const claim =
    prompt.claimTile !== null
      ? `<span class="claim-tile">on ${tileSpan(prompt.claimTile)}</span>`
      : "";
  const buttons = prompt.choices
    .map(
      (c, i) =>
        `<button class="choice" data-choice="${i}">${escapeHtml(c.line)}</button>`,
    )
    .join("");
  const timer =
    secondsLeft !== null
      ? `<span class="prompt-countdown">${Math.max(0, secondsLeft).toFixed(0)}s</span>`
      : "";
  const kind = prompt.requestKind === "claim_or_pass" ? "claim?" : "your move";
  return `<div class="prompt">${kind} ${claim}${buttons}${timer}</div>`;
}

export function renderSettlementPanel(settlement: Settlement | null): string {
  if (settlement === null) return "";
  if (!settlement.ok) {
    return `<div class="settlement error">settlement unavailable: ${escapeHtml(settlement.error)}</div>`;
  }
  const head = settlement.forfeit !== null
    ? `forfeit by ${seatName(settlement.forfeit)}`
    : settlement.draw
      ? "drawn match"
      : `${seatName(settlement.winner!)} wins with ${settlement.fanTotal} points`;
  const fanRows = settlement.fanRows
    .map((row) => {
      const mult = row.multiplicity > 1 ? ` ×${row.multiplicity}` : "";
      return `<tr><td>${escapeHtml(row.name)}${mult}</td><td class="num">${row.points * row.multiplicity}</td></tr>`;
    })
    .join("");
  const fanTable = fanRows
    ? `<table class="fans"><tbody>${fanRows}</tbody></table>`
    : "";
  const num = (x: number) => (Number.isInteger(x) ? String(x) : x.toFixed(1));
  const scoreRow = (label: string, xs: readonly number[], cls = "") =>
    `<tr class="${cls}"><td>${label}</td>` +
    xs.map((x) => `<td class="num">${num(x)}</td>`).join("") +
    "</tr>";
  const rows = [scoreRow("score", settlement.rawScores)];
  if (settlement.compensation) {
    rows.push(
      scoreRow(
        "compensation",
        settlement.compensation,
        "compensation",
      ),
    );
  }
  rows.push(scoreRow("total", settlement.totals, "totals"));
  const header =
    "<tr><td></td>" +
    [0, 1, 2, 3].map((s) => `<td class="num">${seatName(s)}</td>`).join("") +
    "</tr>";
  return (
    `<div class="settlement"><div class="head">${head}</div>${fanTable}` +
    `<table class="scores"><tbody>${header}${rows.join("")}</tbody></table></div>`
  );
}

export function renderReplayFrame(frame: ReplayFrame): string {
  const seats = [0, 1, 2, 3]
    .map((seat) => {
      const melds = frame.melds
        .filter((m) => m.seat === seat)
        .map((m) => `<span class="meld">${tileRow(m.tiles ?? [])}</span>`)
        .join("");
      return (
        `<div class="seat" data-seat="${seat}">` +
        `<div class="seat-name">${seatName(seat)}</div>` +
        `<div class="hand">${tileRow(frame.hands[seat])}</div>` +
        `<div class="melds">${melds}</div>` +
        `<div class="discards">${tileRow(frame.discards[seat])}</div></div>`
      );
    })
    .join("");
  const last = frame.lastEvent
    ? `<div class="last-event">#${frame.step} ${seatName(frame.lastEvent.seat)} ${escapeHtml(frame.lastEvent.action)} ${escapeHtml(frame.lastEvent.tiles.join(" "))}</div>`
    : `<div class="last-event">deal</div>`;
  return (
    `<div class="replay-board">` +
    `<div class="statusbar"><span class="wall">wall ${frame.wallRemaining}</span></div>` +
    `${seats}${last}${renderSettlementPanel(frame.settlement)}</div>`
  );
}
