"""Live-table service: a lobby of four-seat tables where humans and bots
share one referee, plus replay storage and the HTTP/WebSocket transport.

The referee in :mod:`mahjong_lab.engine` arbitrates every match; this module
adds the clock, the wire, and the persistence around it:

* Bots answer their requests immediately.  The forced wall draw is taken
  silently for humans too, since the response grammar has no word for it;
  the drawn tile shows up in the next observation.
* A human decision left unanswered past its deadline degrades to the safe
  default: pass the claim window, or discard the freshly drawn tile.
  Humans are never forfeited; an unparseable or illegal submission comes
  back as a rejection carrying the currently legal grammar lines.
* A seat whose WebSocket stays disconnected past a grace period is taken
  over by a bot so the table always settles to a real, zero-sum record.
* Every finished match is appended to a replay store as one JSON line,
  byte-identical on retrieval, indexed by match id and by player token.

Outbound frames carry only the receiving seat's redacted observation, so no
message ever names a rival's concealed tiles.  Human clients answer with
the same one-line grammar external agents speak (``PLAY W3``, ``PENG B2``,
``GANG``, ``HU``, ``PASS``...).
"""
import asyncio
import json
import secrets
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Protocol, Sequence

from .agents import format_request_action, make_agent, parse_response
from .engine import (
    DRAW,
    PASS,
    SEATS,
    Action,
    ActionKind,
    AgentFailure,
    GameState,
    IllegalActionError,
    MatchRecord,
    Observation,
    Phase,
    _action_sort_key,
    legal_actions,
    new_match,
    observation_for,
    step,
)
from .rules import RuleSet, get_ruleset
from .tiles import Wall, build_wall, format_tile

__all__ = [
    "ServiceConfig",
    "TableStatus",
    "SeatBinding",
    "TableSession",
    "TableService",
    "MemoryReplayStore",
    "JsonlReplayStore",
    "ReplayStore",
    "UnknownTableError",
    "TableFullError",
    "SeatTakenError",
    "build_app",
    "serve",
]


class UnknownTableError(KeyError):
    """No table with that id."""


class TableFullError(RuntimeError):
    """Every seat is already occupied."""


class SeatTakenError(RuntimeError):
    """The requested seat preference is occupied."""


@dataclass(frozen=True)
class ServiceConfig:
    """Clock and persistence settings shared by all tables."""

    act_timeout: float = 30.0
    claim_timeout: float = 10.0
    takeover_grace: float = 30.0
    takeover_policy: str = "greedy"
    store_path: str | Path | None = None
    static_dir: str | Path | None = None

    def __post_init__(self) -> None:
        if min(self.act_timeout, self.claim_timeout, self.takeover_grace) <= 0:
            raise ValueError("timeouts must be positive")


class TableStatus(Enum):
    WAITING = "waiting"
    PLAYING = "playing"
    FINISHED = "finished"


# -- replay persistence ------------------------------------------------------


class ReplayStore(Protocol):  # pragma: no cover - typing aid
    def append(self, record: MatchRecord, *, tokens: Sequence[str] = ()) -> None: ...

    def raw(self, match_id: str) -> str: ...

    def get(self, match_id: str) -> MatchRecord: ...

    def match_ids(self) -> list[str]: ...

    def for_token(self, token: str) -> list[str]: ...


class MemoryReplayStore:
    """Append-only in-process store; the serialized line is the stored unit,
    so retrieval is byte-identical by construction."""

    def __init__(self) -> None:
        self._lines: dict[str, str] = {}
        self._token_index: dict[str, list[str]] = {}
        self._lock = threading.Lock()

    def append(self, record: MatchRecord, *, tokens: Sequence[str] = ()) -> None:
        line = record.to_json_line()
        with self._lock:
            if record.match_id in self._lines:
                raise ValueError(f"duplicate match id {record.match_id!r}")
            self._persist(line, record.match_id, tuple(tokens))
            self._lines[record.match_id] = line
            for token in tokens:
                self._token_index.setdefault(token, []).append(record.match_id)

    def _persist(self, line: str, match_id: str, tokens: tuple[str, ...]) -> None:
        pass

    def raw(self, match_id: str) -> str:
        with self._lock:
            return self._lines[match_id]

    def get(self, match_id: str) -> MatchRecord:
        return MatchRecord.from_json_line(self.raw(match_id))

    def match_ids(self) -> list[str]:
        with self._lock:
            return list(self._lines)

    def for_token(self, token: str) -> list[str]:
        with self._lock:
            return list(self._token_index.get(token, ()))


class JsonlReplayStore(MemoryReplayStore):
    """Records as flat JSON Lines, one verbatim line per match, plus a
    sidecar file mapping player tokens to match ids.  Reloads both on open."""

    def __init__(self, path: str | Path) -> None:
        super().__init__()
        self._path = Path(path)
        self._token_path = self._path.with_name(self._path.name + ".tokens")
        self._path.parent.mkdir(parents=True, exist_ok=True)
        if self._path.exists():
            for line in self._path.read_text().splitlines():
                if line:
                    self._lines[json.loads(line)["match_id"]] = line
        if self._token_path.exists():
            for line in self._token_path.read_text().splitlines():
                if line:
                    entry = json.loads(line)
                    for token in entry["tokens"]:
                        self._token_index.setdefault(token, []).append(entry["match_id"])

    def _persist(self, line: str, match_id: str, tokens: tuple[str, ...]) -> None:
        with self._path.open("a") as fh:
            fh.write(line + "\n")
        if tokens:
            with self._token_path.open("a") as fh:
                entry = {"match_id": match_id, "tokens": list(tokens)}
                fh.write(json.dumps(entry, separators=(",", ":")) + "\n")


# -- seats and tables --------------------------------------------------------


@dataclass
class SeatBinding:
    """Who controls one seat.  ``controller`` is ``open``, ``human``, or
    ``bot``; a disconnected human past grace keeps the binding but plays
    through ``agent`` with ``taken_over`` set."""

    controller: str = "open"
    agent: Any = None
    token: str | None = None
    connected: bool = False
    taken_over: bool = False
    label: str = ""

    @property
    def occupied(self) -> bool:
        return self.controller != "open"

    @property
    def bot_controlled(self) -> bool:
        return self.controller == "bot" or self.taken_over


_EXPIRY_SLACK = 1e-9


class TableSession:
    """One four-seat table: referee state, seat bindings, deadlines, sockets.

    All mutation happens under ``_lock`` on the event loop; the inner
    advance logic is synchronous, so a table can never interleave two
    referee steps.
    """

    def __init__(
        self,
        table_id: str,
        ruleset: RuleSet,
        config: ServiceConfig,
        store: ReplayStore,
        *,
        wall: Wall | None = None,
        seed: int | None = None,
        match_id: str | None = None,
    ) -> None:
        self.table_id = table_id
        self.ruleset = ruleset
        self.config = config
        self.store = store
        self.seats = [SeatBinding() for _ in range(SEATS)]
        self.status = TableStatus.WAITING
        self.state: GameState | None = None
        self.record: MatchRecord | None = None
        self._wall = wall
        self._seed = seed
        self._match_id = match_id
        self._wall_codes: list[str] = []
        self._lock = asyncio.Lock()
        self._deadlines: dict[int, float] = {}
        self._timer_version = 0
        self._grace_versions = [0] * SEATS
        self._sockets: dict[int, Any] = {}

    # -- lifecycle ----------------------------------------------------------

    @property
    def open_seats(self) -> list[int]:
        return [i for i, b in enumerate(self.seats) if not b.occupied]

    def summary(self) -> dict:
        return {
            "table_id": self.table_id,
            "ruleset_id": self.ruleset.ruleset_id,
            "status": self.status.value,
            "match_id": self.state.match_id if self.state is not None else None,
            "open_seats": self.open_seats,
            "seats": [
                {
                    "seat": i,
                    "controller": b.controller,
                    "label": b.label,
                    "connected": b.connected,
                    "taken_over": b.taken_over,
                }
                for i, b in enumerate(self.seats)
            ],
        }

    def _start_locked(self) -> None:
        assert self.status is TableStatus.WAITING
        wall = self._wall
        if wall is None:
            seed = self._seed if self._seed is not None else secrets.randbits(32)
            wall = build_wall(seed)
        self._wall = None
        self._seed = wall.seed
        self._wall_codes = [format_tile(t, with_copy=True) for t in wall.tiles]
        self.state = new_match(wall, self.ruleset, match_id=self._match_id)
        self.status = TableStatus.PLAYING

    # -- the pump -----------------------------------------------------------

    async def pump(self) -> None:
        """Advance the match as far as it can go without waiting on a human,
        then re-arm deadlines and push fresh observations."""
        async with self._lock:
            if self.status is not TableStatus.PLAYING:
                return
            now = asyncio.get_running_loop().time()
            self._advance_locked(now)
            earliest = self._arm_locked(now)
            frames = self._frames_locked()
            self._schedule_timer(earliest)
        await self._send_frames(frames)

    def _advance_locked(self, now: float) -> None:
        state = self.state
        assert state is not None
        while state.phase is not Phase.FINISHED:
            if state.phase is Phase.AWAIT_CLAIMS:
                pending = state.pending_claims
                assert pending is not None
                moved = False
                for seat in pending.undecided:
                    if self.seats[seat].bot_controlled:
                        self._bot_step_locked(seat)
                        moved = True
                        break
                    deadline = self._deadlines.get(seat)
                    if deadline is not None and now >= deadline - _EXPIRY_SLACK:
                        self._deadlines.pop(seat, None)
                        step(state, seat, PASS)
                        moved = True
                        break
                if not moved:
                    return
                continue
            seat = state.current_seat
            if self.seats[seat].bot_controlled:
                self._bot_step_locked(seat)
                continue
            legal = legal_actions(state, seat)
            if len(legal) == 1 and next(iter(legal)).kind is ActionKind.DRAW:
                # forced draw: the grammar has no word for it, take it silently
                step(state, seat, DRAW)
                self._deadlines.pop(seat, None)
                continue
            deadline = self._deadlines.get(seat)
            if deadline is not None and now >= deadline - _EXPIRY_SLACK:
                self._deadlines.pop(seat, None)
                self._apply_default_locked(seat, legal)
                continue
            return
        self._finalize_locked()

    def _bot_step_locked(self, seat: int) -> None:
        state = self.state
        assert state is not None
        binding = self.seats[seat]
        try:
            action = binding.agent.act(observation_for(state, seat))
            step(state, seat, action)
        except Exception:
            # live tables never forfeit: a failing bot degrades to the default
            self._apply_default_locked(seat, legal_actions(state, seat))

    def _apply_default_locked(self, seat: int, legal: frozenset[Action]) -> None:
        state = self.state
        assert state is not None
        for kind in (ActionKind.PASS, ActionKind.DRAW):
            for action in legal:
                if action.kind is kind:
                    step(state, seat, action)
                    return
        discards = [a for a in legal if a.kind is ActionKind.DISCARD]
        assert discards, "a decision point always offers pass, draw, or discard"
        drawn = state.last_drawn
        if drawn is not None and state.current_seat == seat:
            for action in discards:
                if action.tile == drawn:
                    step(state, seat, action)
                    return
        choice = max(discards, key=lambda a: (a.tile.kind.index, a.tile.copy))
        step(state, seat, choice)

    def _arm_locked(self, now: float) -> float | None:
        state = self.state
        if self.status is not TableStatus.PLAYING or state is None:
            self._deadlines.clear()
            return None
        waiting: list[int] = []
        timeout = self.config.act_timeout
        if state.phase is Phase.AWAIT_CLAIMS:
            assert state.pending_claims is not None
            timeout = self.config.claim_timeout
            waiting = [
                s
                for s in state.pending_claims.undecided
                if not self.seats[s].bot_controlled
            ]
        elif state.phase is not Phase.FINISHED:
            if not self.seats[state.current_seat].bot_controlled:
                waiting = [state.current_seat]
        self._deadlines = {
            s: self._deadlines.get(s, now + timeout) for s in waiting
        }
        return min(self._deadlines.values()) if self._deadlines else None

    def _schedule_timer(self, earliest: float | None) -> None:
        self._timer_version += 1
        if earliest is None:
            return
        version = self._timer_version
        loop = asyncio.get_running_loop()
        delay = max(0.0, earliest - loop.time())
        loop.create_task(self._timer_fire(version, delay))

    async def _timer_fire(self, version: int, delay: float) -> None:
        await asyncio.sleep(delay)
        if self._timer_version != version or self.status is not TableStatus.PLAYING:
            return
        await self.pump()

    def _finalize_locked(self) -> None:
        state = self.state
        assert state is not None and state.result is not None
        self.status = TableStatus.FINISHED
        self._deadlines.clear()
        self._timer_version += 1
        self.record = MatchRecord(
            match_id=state.match_id,
            seed=self._seed,
            ruleset_id=self.ruleset.ruleset_id,
            wall=self._wall_codes,
            events=[e.payload() for e in state.event_log],
            result=state.result.payload(),
        )
        tokens = [b.token for b in self.seats if b.token]
        self.store.append(self.record, tokens=tokens)

    # -- frames ---------------------------------------------------------------

    def _frames_locked(self) -> list[tuple[Any, dict]]:
        state = self.state
        if state is None:
            return []
        frames = [
            (sock, observation_frame(state, seat))
            for seat, sock in self._sockets.items()
        ]
        if self.status is TableStatus.FINISHED and self.record is not None:
            result = result_frame(self.record, self.ruleset)
            frames.extend((sock, result) for sock in self._sockets.values())
        return frames

    async def _send_frames(self, frames: Iterable[tuple[Any, dict]]) -> None:
        for sock, frame in frames:
            try:
                await sock.send_json(frame)
            except Exception:
                pass  # the socket's own handler notices the disconnect

    async def takeover_after_grace(self, seat: int, version: int) -> None:
        await asyncio.sleep(self.config.takeover_grace)
        run_pump = False
        async with self._lock:
            binding = self.seats[seat]
            if (
                self._grace_versions[seat] == version
                and self.status is TableStatus.PLAYING
                and binding.controller == "human"
                and not binding.connected
                and not binding.taken_over
            ):
                binding.taken_over = True
                binding.agent = make_agent(
                    self.config.takeover_policy,
                    agent_id=f"takeover-{self.table_id}-{seat}",
                )
                run_pump = True
        if run_pump:
            await self.pump()


def observation_frame(state: GameState, seat: int) -> dict:
    obs = observation_for(state, seat)
    return {
        "type": "observation",
        "step": len(state.event_log),
        "data": obs.to_payload(),
        "grammar": grammar_lines(obs),
    }


def result_frame(record: MatchRecord, ruleset: RuleSet) -> dict:
    result = dict(record.result)
    result["fan_list"] = [
        {**fan, "name": ruleset.fan_table.name(fan["pattern_id"])}
        for fan in result.get("fan_list", [])
    ]
    return {"type": "result", "match_id": record.match_id, "data": result}


def grammar_lines(obs: Observation) -> list[str]:
    """The legal actions rendered in the response grammar, deduplicated.

    The forced draw is omitted (no grammar form; the service takes it
    silently); claim verbs that carry a follow-up discard slot borrow the
    lowest concealed tile not committed to the claim.
    """
    lines: dict[str, None] = {}
    for action in sorted(obs.legal, key=_action_sort_key):
        if action.kind is ActionKind.DRAW:
            continue
        follow = None
        if action.kind in (ActionKind.PUNG, ActionKind.CHOW):
            used = {(t.kind.index, t.copy) for t in action.using}
            spare = [
                t
                for t in sorted(obs.concealed, key=lambda t: (t.kind.index, t.copy))
                if (t.kind.index, t.copy) not in used
            ]
            follow = spare[0]
        lines[format_request_action(action, obs, follow=follow)] = None
    return list(lines)


# -- the lobby ----------------------------------------------------------------


class TableService:
    """Creates tables, seats players, routes actions, and serves replays."""

    def __init__(
        self,
        config: ServiceConfig | None = None,
        *,
        store: ReplayStore | None = None,
    ) -> None:
        self.config = config or ServiceConfig()
        if store is None:
            store = (
                JsonlReplayStore(self.config.store_path)
                if self.config.store_path is not None
                else MemoryReplayStore()
            )
        self.store = store
        self.tables: dict[str, TableSession] = {}
        self._tokens: dict[str, tuple[str, int]] = {}

    # -- tables ---------------------------------------------------------------

    async def create_table(
        self,
        ruleset_id: str,
        bot_fill: Sequence[Any] = (),
        *,
        bot_seats: Sequence[int] | None = None,
        seed: int | None = None,
        wall: Wall | None = None,
        match_id: str | None = None,
    ) -> TableSession:
        """Open a table.  ``bot_fill`` entries are policy specs (``greedy``,
        ``random:7``...) or ready agent objects; they occupy the highest
        seats by default, leaving East for the first human.  A fully
        botted table starts (and plays out) immediately."""
        ruleset = get_ruleset(ruleset_id)
        bots = list(bot_fill)
        if len(bots) > SEATS:
            raise ValueError(f"a table seats {SEATS} players, got {len(bots)} bots")
        if bot_seats is None:
            bot_seats = list(range(SEATS - 1, SEATS - 1 - len(bots), -1))
        if len(bot_seats) != len(bots):
            raise ValueError("bot_seats must match bot_fill one to one")
        table_id = f"t{secrets.token_hex(4)}"
        while table_id in self.tables:
            table_id = f"t{secrets.token_hex(4)}"
        table = TableSession(
            table_id,
            ruleset,
            self.config,
            self.store,
            wall=wall,
            seed=seed,
            match_id=match_id,
        )
        for spec, seat in zip(bots, bot_seats):
            binding = table.seats[seat]
            if binding.occupied:
                raise ValueError(f"seat {seat} assigned twice")
            if hasattr(spec, "act"):
                agent, label = spec, getattr(spec, "id", "agent")
            else:
                label = str(spec)
                agent = make_agent(spec, agent_id=f"{table_id}-s{seat}")
            binding.controller = "bot"
            binding.agent = agent
            binding.label = label
        self.tables[table_id] = table
        if not table.open_seats:
            async with table._lock:
                table._start_locked()
            await table.pump()
        return table

    def table(self, table_id: str) -> TableSession:
        try:
            return self.tables[table_id]
        except KeyError:
            raise UnknownTableError(table_id) from None

    def summaries(self) -> list[dict]:
        return [t.summary() for t in self.tables.values()]

    def resolve_token(self, token: str) -> tuple[TableSession, int]:
        try:
            table_id, seat = self._tokens[token]
        except KeyError:
            raise UnknownTableError("unknown token") from None
        return self.tables[table_id], seat

    # -- joining ---------------------------------------------------------------

    async def join(
        self,
        table_id: str,
        *,
        token: str | None = None,
        seat: int | None = None,
    ) -> tuple[str, int]:
        """Seat a human.  Rejoining with a known token returns the same seat;
        the last join fills the table and starts the match."""
        table = self.table(table_id)
        started = False
        async with table._lock:
            if token is not None and token in self._tokens:
                bound_table, bound_seat = self._tokens[token]
                if bound_table != table_id:
                    raise SeatTakenError("token is bound to another table")
                return token, bound_seat
            open_seats = table.open_seats
            if not open_seats:
                raise TableFullError(f"table {table_id} has no open seats")
            if seat is not None:
                if not 0 <= seat < SEATS:
                    raise ValueError("seat out of range")
                if seat not in open_seats:
                    raise SeatTakenError(f"seat {seat} is occupied")
                chosen = seat
            else:
                chosen = open_seats[0]
            token = token or secrets.token_hex(12)
            binding = table.seats[chosen]
            binding.controller = "human"
            binding.token = token
            binding.label = "human"
            self._tokens[token] = (table_id, chosen)
            if not table.open_seats:
                table._start_locked()
                started = True
        if started:
            await table.pump()
        return token, chosen

    # -- play -------------------------------------------------------------------

    async def submit_action(self, token: str, line: str) -> dict:
        """Apply one grammar line for the token's seat.  Returns an ``ack``
        frame, or a ``rejected`` frame carrying the legal grammar lines;
        a rejection never costs the seat anything."""
        table, seat = self.resolve_token(token)
        async with table._lock:
            if table.status is not TableStatus.PLAYING:
                return _rejected(f"table is {table.status.value}", [])
            binding = table.seats[seat]
            if binding.taken_over:
                return _rejected("seat is under bot control", [])
            assert table.state is not None
            obs = observation_for(table.state, seat)
            if not obs.legal:
                return _rejected("no action is pending for this seat", [])
            try:
                action = parse_response(line, obs)
            except AgentFailure as exc:
                return _rejected(str(exc), grammar_lines(obs))
            try:
                step(table.state, seat, action)
            except IllegalActionError as exc:
                return _rejected(str(exc), grammar_lines(obs))
            table._deadlines.pop(seat, None)
            ack = {"type": "ack", "seat": seat, "action": action.payload()}
        await table.pump()
        return ack

    # -- settlement and replays ---------------------------------------------------

    async def settle_and_store(self, table_id: str) -> MatchRecord:
        """The finished table's persisted record (settled exactly once, at
        the moment the referee finished)."""
        table = self.table(table_id)
        async with table._lock:
            if table.record is None:
                raise RuntimeError(f"table {table_id} has not finished")
            return table.record

    def get_replay(self, match_id: str) -> MatchRecord:
        return self.store.get(match_id)

    def raw_replay(self, match_id: str) -> str:
        return self.store.raw(match_id)


def _rejected(reason: str, legal: list[str]) -> dict:
    return {"type": "rejected", "reason": reason, "legal": legal}


# -- HTTP / WebSocket transport -------------------------------------------------


def build_app(service: TableService | None = None, *, config: ServiceConfig | None = None):
    """The FastAPI app: a lobby over REST, live play over one WebSocket per
    seat, replays by match id."""
    from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
    from fastapi.responses import Response
    from pydantic import BaseModel, Field

    svc = service or TableService(config)
    app = FastAPI(title="mahjong-lab tables")
    app.state.service = svc

    class CreateTableBody(BaseModel):
        ruleset_id: str
        bots: list[str] = Field(default_factory=list)
        seed: int | None = None

    class JoinBody(BaseModel):
        seat: int | None = None
        token: str | None = None

    @app.post("/tables", status_code=201)
    async def create_table(body: CreateTableBody):
        try:
            table = await svc.create_table(body.ruleset_id, body.bots, seed=body.seed)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return table.summary()

    @app.get("/tables")
    async def list_tables():
        return {"tables": svc.summaries()}

    @app.get("/tables/{table_id}")
    async def show_table(table_id: str):
        try:
            return svc.table(table_id).summary()
        except UnknownTableError:
            raise HTTPException(status_code=404, detail=f"unknown table {table_id!r}")

    @app.post("/tables/{table_id}/join")
    async def join_table(table_id: str, body: JoinBody):
        try:
            token, seat = await svc.join(table_id, token=body.token, seat=body.seat)
        except UnknownTableError:
            raise HTTPException(status_code=404, detail=f"unknown table {table_id!r}")
        except (TableFullError, SeatTakenError) as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        table = svc.table(table_id)
        return {
            "table_id": table_id,
            "token": token,
            "seat": seat,
            "status": table.status.value,
        }

    @app.get("/replays/{match_id}")
    async def get_replay(match_id: str):
        try:
            line = svc.raw_replay(match_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no replay for {match_id!r}")
        return Response(content=line, media_type="application/json")

    @app.websocket("/tables/{table_id}/play")
    async def play(websocket: WebSocket, table_id: str, token: str):
        await websocket.accept()
        try:
            table, seat = svc.resolve_token(token)
        except UnknownTableError:
            await websocket.send_json(_rejected("unknown token", []))
            await websocket.close()
            return
        if table.table_id != table_id:
            await websocket.send_json(_rejected("token belongs to another table", []))
            await websocket.close()
            return
        async with table._lock:
            binding = table.seats[seat]
            binding.connected = True
            table._grace_versions[seat] += 1
            table._sockets[seat] = websocket
            welcome = {
                "type": "welcome",
                "table_id": table_id,
                "seat": seat,
                "status": table.status.value,
                "taken_over": binding.taken_over,
                "timeouts": {
                    "act": table.config.act_timeout,
                    "claim": table.config.claim_timeout,
                },
            }
            frames = [welcome]
            if table.state is not None:
                frames.append(observation_frame(table.state, seat))
            if table.status is TableStatus.FINISHED and table.record is not None:
                frames.append(result_frame(table.record, table.ruleset))
        for frame in frames:
            await websocket.send_json(frame)
        try:
            while True:
                text = await websocket.receive_text()
                line = text
                if text.lstrip().startswith("{"):
                    try:
                        line = json.loads(text).get("action", "")
                    except (json.JSONDecodeError, AttributeError):
                        line = ""
                reply = await svc.submit_action(token, line)
                if reply["type"] != "ack":
                    await websocket.send_json(reply)
        except WebSocketDisconnect:
            pass
        finally:
            async with table._lock:
                if table._sockets.get(seat) is websocket:
                    del table._sockets[seat]
                    binding.connected = False
                    if (
                        table.status is TableStatus.PLAYING
                        and not binding.taken_over
                    ):
                        table._grace_versions[seat] += 1
                        asyncio.get_running_loop().create_task(
                            table.takeover_after_grace(
                                seat, table._grace_versions[seat]
                            )
                        )

    if svc.config.static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # mounted last so API routes keep precedence
        app.mount(
            "/", StaticFiles(directory=svc.config.static_dir, html=True), name="static"
        )

    return app


def serve(
    host: str = "127.0.0.1",
    port: int = 8000,
    *,
    config: ServiceConfig | None = None,
) -> None:  # pragma: no cover - blocking server entry point
    """Run the table service under uvicorn until interrupted."""
    import uvicorn

    uvicorn.run(build_app(config=config), host=host, port=port, log_level="warning")
