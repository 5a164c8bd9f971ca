/** Live-table session: one WebSocket, one view, one pending prompt.
 *
 * Response discipline: exactly one grammar line goes out per prompt, either
 * the user's tap or an automatic PASS when the countdown expires (PASS is
 * only auto-sent for claim prompts; on the own turn the server's safe
 * default already covers expiry, so the client just lets it fire).  Every
 * outbound line comes from the prompt's pre-filtered choices, so nothing
 * outside the server's legal set can ever be sent.
 */

import type { Choice, ServerFrame } from "./protocol.js";
import { parseFrame } from "./protocol.js";
import { applyFrame, initialView, TableView } from "./state.js";

export interface SocketLike {
  send(text: string): void;
  close(): void;
  onmessage: ((text: string) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
}

export interface SessionOptions {
  /** builds the transport; injectable for tests */
  connect: (url: string) => SocketLike;
  url: string;
  rulesetId: string;
  onChange?: (view: TableView) => void;
  now?: () => number;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
  /** resend cadence is owned by the caller; reconnect() is manual */
}

export class TableSession {
  view: TableView;
  /** every line handed to the transport, in order (used by the wire audit) */
  readonly sent: string[] = [];
  private socket: SocketLike | null = null;
  private readonly opts: Required<Pick<SessionOptions, "connect" | "url" | "rulesetId">> &
    SessionOptions;
  private timer: unknown = null;
  private answeredStep = -1;

  constructor(opts: SessionOptions) {
    this.opts = opts;
    this.view = initialView(opts.rulesetId);
  }

  private get now(): number {
    return this.opts.now ? this.opts.now() : Date.now();
  }

  private emit(): void {
    this.opts.onChange?.(this.view);
  }

  open(): void {
    const socket = this.opts.connect(this.opts.url);
    this.socket = socket;
    socket.onopen = () => {
      this.view = { ...this.view, connection: "open" };
      this.emit();
    };
    socket.onmessage = (text) => this.handleFrame(parseFrame(text));
    socket.onclose = () => {
      this.cancelTimer();
      this.view = { ...this.view, connection: "closed" };
      this.emit();
    };
  }

  /** Fresh socket, same token URL; the server replays the current state. */
  reconnect(): void {
    this.socket?.close();
    this.open();
  }

  close(): void {
    this.cancelTimer();
    this.socket?.close();
  }

  handleFrame(frame: ServerFrame): void {
    if (frame.type === "welcome") this.answeredStep = -1; // reconnect replays the prompt
    this.view = applyFrame(this.view, frame, this.now);
    this.armAutoPass();
    this.emit();
  }

  /** Send the tapped choice; ignores taps once the prompt is answered. */
  choose(choice: Choice): void {
    const prompt = this.view.prompt;
    if (!prompt || this.answeredStep === prompt.step) return;
    if (!prompt.choices.some((c) => c.line === choice.line)) return;
    this.sendLine(choice.line, prompt.step);
  }

  /** Tap a concealed tile: discard it when the server offers that discard. */
  tapTile(code: string): void {
    const prompt = this.view.prompt;
    if (!prompt) return;
    const kind = code.split(".")[0];
    const line = `PLAY ${kind}`;
    const match = prompt.choices.find((c) => c.line === line);
    if (match) this.choose(match);
  }

  private sendLine(line: string, step: number): void {
    if (!this.socket) return;
    this.cancelTimer();
    this.answeredStep = step;
    this.sent.push(line);
    this.socket.send(line);
  }

  private armAutoPass(): void {
    this.cancelTimer();
    const prompt = this.view.prompt;
    if (!prompt || this.answeredStep === prompt.step) return;
    if (prompt.requestKind !== "claim_or_pass") return;
    const pass = prompt.choices.find((c) => c.line === "PASS");
    if (!pass) return;
    const delay = Math.max(0, prompt.deadline - this.now);
    const setTimer = this.opts.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.timer = setTimer(() => {
      const current = this.view.prompt;
      if (current && current.step === prompt.step && this.answeredStep !== prompt.step) {
        this.sendLine("PASS", prompt.step);
      }
    }, delay);
  }

  private cancelTimer(): void {
    if (this.timer !== null) {
      const clearTimer = this.opts.clearTimer ?? ((h) => clearTimeout(h as number));
      clearTimer(this.timer);
      this.timer = null;
    }
  }
}
