/** Lobby REST calls: create a table, list tables, claim a seat, fetch a
 * stored replay.  Thin fetch wrappers; every error surfaces as an Error with
 * the server's detail text. */

import type { MatchRecordPayload } from "./protocol.js";

export interface SeatSummary {
  seat: number;
  controller: string;
  label: string | null;
  connected: boolean;
  taken_over: boolean;
}

export interface TableSummary {
  table_id: string;
  ruleset_id: string;
  status: string;
  match_id: string | null;
  open_seats: number[];
  seats: SeatSummary[];
}

export interface JoinGrant {
  table_id: string;
  token: string;
  seat: number;
  status: string;
}

type FetchLike = typeof fetch;

export class LobbyClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        // plain-text error body
      }
      throw new Error(`${response.status}: ${detail}`);
    }
    return JSON.parse(text) as T;
  }

  createTable(rulesetId: string, bots: string[], seed?: number): Promise<TableSummary> {
    return this.request<TableSummary>("/tables", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ruleset_id: rulesetId, bots, seed: seed ?? null }),
    });
  }

  async listTables(): Promise<TableSummary[]> {
    const data = await this.request<{ tables: TableSummary[] }>("/tables");
    return data.tables;
  }

  table(tableId: string): Promise<TableSummary> {
    return this.request<TableSummary>(`/tables/${tableId}`);
  }

  join(tableId: string, seat?: number, token?: string): Promise<JoinGrant> {
    return this.request<JoinGrant>(`/tables/${tableId}/join`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ seat: seat ?? null, token: token ?? null }),
    });
  }

  replay(matchId: string): Promise<MatchRecordPayload> {
    return this.request<MatchRecordPayload>(`/replays/${matchId}`);
  }

  /** ws:// URL for a seat's play socket. */
  playUrl(tableId: string, token: string): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    return `${ws}/tables/${tableId}/play?token=${encodeURIComponent(token)}`;
  }
}
