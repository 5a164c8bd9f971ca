"""Four-player referee: turns, claims, kongs, scoring, and the event log.

The automaton has four phases.  ``AWAIT_DRAW`` obliges the current seat to
draw; ``AWAIT_DISCARD`` obliges it to discard (or declare a kong or a
self-drawn win); ``AWAIT_CLAIMS`` gathers claim-or-pass responses from every
seat entitled to react to a discard or to an added kong; ``FINISHED`` carries
the settled result.  All mutation goes through :func:`step`, which validates
the action against :func:`legal_actions` and appends exactly one event, so a
completed match certifies that every action was legal when taken.

Kong replacement tiles come from the tail of the single wall; there is no
dead wall, and the last-tile fans key off the wall simply running out.  The
dealer is always seat 0 and never rotates.
"""

from __future__ import annotations

import json
import uuid
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Protocol, Sequence

from .rules import RuleSet, get_ruleset
from .scoring import FanResult, WinBy, WinContext, best_fan, is_winning_shape, settle_total
from .tiles import (
    COPIES_PER_KIND,
    NUM_KINDS,
    Hand,
    Meld,
    MeldKind,
    Tile,
    Wall,
    deal,
    format_tile,
    is_suited,
    parse_tile,
    rank_of,
    suit_of,
)

SEATS = 4
PLAY_TILES = NUM_KINDS * COPIES_PER_KIND  # 136; flower tiles never enter play


class Phase(Enum):
    AWAIT_DRAW = "await_draw"
    AWAIT_DISCARD = "await_discard"
    AWAIT_CLAIMS = "await_claims"
    FINISHED = "finished"


class ActionKind(Enum):
    DRAW = "draw"
    DISCARD = "discard"
    CHOW = "chow"
    PUNG = "pung"
    MELDED_KONG = "melded_kong"
    CONCEALED_KONG = "concealed_kong"
    ADDED_KONG = "added_kong"
    WIN_SELF_DRAW = "win_self_draw"
    WIN_DISCARD = "win_discard"
    WIN_ROB_KONG = "win_rob_kong"
    PASS = "pass"


class RequestKind(Enum):
    ACT_NOW = "act_now"
    CLAIM_OR_PASS = "claim_or_pass"


@dataclass(frozen=True, slots=True)
class Action:
    """One move. ``tile`` is the single-tile argument (discard, added kong);
    ``using`` holds the concealed tiles committed to a claim or kong."""

    kind: ActionKind
    tile: Tile | None = None
    using: tuple[Tile, ...] = ()

    def payload(self) -> dict:
        return {
            "kind": self.kind.value,
            "tile": format_tile(self.tile, with_copy=True) if self.tile else None,
            "using": [format_tile(t, with_copy=True) for t in self.using],
        }

    @classmethod
    def from_payload(cls, data: dict) -> "Action":
        return cls(
            kind=ActionKind(data["kind"]),
            tile=parse_tile(data["tile"]) if data.get("tile") else None,
            using=tuple(parse_tile(c) for c in data.get("using", ())),
        )


DRAW = Action(ActionKind.DRAW)
PASS = Action(ActionKind.PASS)
WIN_SELF_DRAW = Action(ActionKind.WIN_SELF_DRAW)
WIN_DISCARD = Action(ActionKind.WIN_DISCARD)
WIN_ROB_KONG = Action(ActionKind.WIN_ROB_KONG)


@dataclass(frozen=True, slots=True)
class Event:
    """One log entry; ``revealed`` lists tiles the action made public."""

    seat: int
    action: Action
    revealed: tuple[Tile, ...]
    timestamp_index: int

    def redacted_for(self, viewer: int) -> "Event":
        if self.seat == viewer:
            return self
        if self.action.kind is ActionKind.DRAW and self.action.tile is not None:
            return replace(self, action=DRAW)
        if self.action.kind is ActionKind.CONCEALED_KONG and self.action.using:
            return replace(self, action=Action(ActionKind.CONCEALED_KONG))
        return self

    def payload(self) -> dict:
        tiles: list[str] = []
        if self.action.tile is not None:
            tiles.append(format_tile(self.action.tile, with_copy=True))
        tiles.extend(format_tile(t, with_copy=True) for t in self.action.using)
        return {"seat": self.seat, "action": self.action.kind.value, "tiles": tiles}


class IllegalActionError(Exception):
    """Rejection of an out-of-protocol action; carries the legal set."""

    def __init__(self, message: str, legal: frozenset[Action]):
        super().__init__(message)
        self.legal = legal


@dataclass(frozen=True)
class ForfeitPolicy:
    """Scores assigned when an agent times out or insists on illegal moves."""

    offender: int = -24
    others: int = 8

    def __post_init__(self) -> None:
        if self.offender + (SEATS - 1) * self.others != 0:
            raise ValueError("forfeit policy must be zero-sum")

    def scores(self, seat: int) -> list[int]:
        return [self.offender if s == seat else self.others for s in range(SEATS)]


DEFAULT_FORFEIT = ForfeitPolicy()


@dataclass
class PendingClaims:
    """An unresolved claim window: a discard or an added kong under threat."""

    trigger: str  # "discard" | "rob"
    source_seat: int
    tile: Tile
    options: dict[int, frozenset[Action]]
    responses: dict[int, Action] = field(default_factory=dict)

    @property
    def undecided(self) -> list[int]:
        order = [(self.source_seat + d) % SEATS for d in range(1, SEATS)]
        return [s for s in order if s in self.options and s not in self.responses]


@dataclass
class MatchResult:
    winner: int | None
    win_by: WinBy | None
    fan_result: FanResult | None
    scores: list[int]
    compensated: list[float] | None
    forfeit_seat: int | None = None

    def payload(self) -> dict:
        fan_list: list[dict] = []
        if self.fan_result is not None:
            for award in self.fan_result.fans:
                fan_list.extend(
                    {"pattern_id": award.pattern_id, "points": award.points}
                    for _ in range(award.multiplicity)
                )
        data = {
            "winner": self.winner,
            "fan_list": fan_list,
            "fan_total": self.fan_result.total if self.fan_result else 0,
            "scores": list(self.scores),
            "compensated_scores": list(self.compensated) if self.compensated else None,
        }
        if self.forfeit_seat is not None:
            data["forfeit"] = self.forfeit_seat
        return data


@dataclass(frozen=True)
class MeldView:
    """A meld as one seat sees it; a rival's concealed kong hides its tiles."""

    seat: int
    kind: MeldKind
    tiles: tuple[Tile, ...] | None
    claimed_from: int | None


@dataclass(frozen=True)
class Observation:
    """Everything one seat may legally see, plus its pending request."""

    match_id: str
    seat: int
    request_kind: RequestKind | None
    phase: Phase
    concealed: tuple[Tile, ...]
    melds: tuple[MeldView, ...]
    discards: tuple[tuple[Tile, ...], ...]
    wall_remaining: int
    current_seat: int
    legal: frozenset[Action]
    events: tuple[Event, ...]
    claim_tile: Tile | None
    visible_counts: tuple[int, ...]
    last_drawn: Tile | None

    def to_payload(self) -> dict:
        return {
            "match_id": self.match_id,
            "seat": self.seat,
            "request_kind": self.request_kind.value if self.request_kind else None,
            "phase": self.phase.value,
            "concealed": [format_tile(t, with_copy=True) for t in self.concealed],
            "melds": [
                {
                    "seat": view.seat,
                    "kind": view.kind.value,
                    "tiles": (
                        [format_tile(t, with_copy=True) for t in view.tiles]
                        if view.tiles is not None
                        else None
                    ),
                    "claimed_from": view.claimed_from,
                }
                for view in self.melds
            ],
            "discards": [
                [format_tile(t, with_copy=True) for t in row] for row in self.discards
            ],
            "wall_remaining": self.wall_remaining,
            "current_seat": self.current_seat,
            "legal": [a.payload() for a in sorted(self.legal, key=_action_sort_key)],
            "events": [e.payload() for e in self.events],
            "claim_tile": (
                format_tile(self.claim_tile, with_copy=True) if self.claim_tile else None
            ),
            "visible_counts": list(self.visible_counts),
            "last_drawn": (
                format_tile(self.last_drawn, with_copy=True) if self.last_drawn else None
            ),
        }


def _action_sort_key(a: Action) -> tuple:
    return (
        a.kind.value,
        (a.tile.kind.index, a.tile.copy) if a.tile else (-1, -1),
        tuple((t.kind.index, t.copy) for t in a.using),
    )


@dataclass
class GameState:
    match_id: str
    ruleset: RuleSet
    wall: Wall
    hands: list[Hand]
    discards: list[list[Tile]]
    current_seat: int
    phase: Phase
    event_log: list[Event]
    redacted_logs: list[list[Event]]
    visible_counts: list[int]
    concealed_throughout: list[bool]
    pending_claims: PendingClaims | None = None
    last_drawn: Tile | None = None
    last_draw_replacement: bool = False
    result: MatchResult | None = None
    _won_tile: Tile | None = None
    _legal_cache: dict[int, frozenset[Action]] = field(default_factory=dict)

    def census(self) -> dict[tuple[int, int], int]:
        """Count every tile the state accounts for, keyed by (kind, copy)."""
        out: dict[tuple[int, int], int] = {}

        def add(t: Tile) -> None:
            key = (t.kind.index, t.copy)
            out[key] = out.get(key, 0) + 1

        for t in self.wall.tiles[self.wall.front : self.wall.back + 1]:
            add(t)
        for hand in self.hands:
            for t in hand.concealed:
                add(t)
            for meld in hand.melds:
                for t in meld.tiles:
                    add(t)
        for row in self.discards:
            for t in row:
                add(t)
        if self.pending_claims is not None and self.pending_claims.trigger == "rob":
            add(self.pending_claims.tile)
        if self._won_tile is not None:
            add(self._won_tile)
        return out


def new_match(wall: Wall, ruleset: RuleSet | str, *, match_id: str | None = None) -> GameState:
    """Deal four hands from a complete wall and open play at seat 0."""
    if isinstance(ruleset, str):
        ruleset = get_ruleset(ruleset)
    _check_wall(wall)
    hands = [Hand(concealed=tiles, melds=[]) for tiles in deal(wall)]
    if match_id is None:
        match_id = f"m{wall.seed}" if wall.seed is not None else uuid.uuid4().hex[:12]
    state = GameState(
        match_id=match_id,
        ruleset=ruleset,
        wall=wall,
        hands=hands,
        discards=[[] for _ in range(SEATS)],
        current_seat=0,
        phase=Phase.AWAIT_DRAW,
        event_log=[],
        redacted_logs=[[] for _ in range(SEATS)],
        visible_counts=[0] * NUM_KINDS,
        concealed_throughout=[True] * SEATS,
    )
    return state


def _check_wall(wall: Wall) -> None:
    tiles = wall.tiles
    if wall.front != 0 or wall.back != len(tiles) - 1:
        raise ValueError("wall already partially drawn")
    if len(tiles) != PLAY_TILES:
        raise ValueError(f"wall must hold {PLAY_TILES} tiles, got {len(tiles)}")
    seen = set()
    for t in tiles:
        key = (t.kind.index, t.copy)
        if key in seen:
            raise ValueError(f"duplicate tile {format_tile(t, with_copy=True)} in wall")
        seen.add(key)


def legal_actions(state: GameState, seat: int) -> frozenset[Action]:
    """The exact action set open to ``seat``; empty when it has no decision."""
    if state.phase is Phase.FINISHED:
        raise ValueError("match is finished")
    if not 0 <= seat < SEATS:
        raise ValueError("seat out of range")
    cache_key = seat * 1_000_000 + len(state.event_log)
    cached = state._legal_cache.get(cache_key)
    if cached is not None:
        return cached
    legal = _compute_legal(state, seat)
    state._legal_cache[cache_key] = legal
    return legal


def _compute_legal(state: GameState, seat: int) -> frozenset[Action]:
    if state.phase is Phase.AWAIT_CLAIMS:
        pending = state.pending_claims
        assert pending is not None
        if seat in pending.options and seat not in pending.responses:
            return pending.options[seat]
        return frozenset()
    if seat != state.current_seat:
        return frozenset()
    if state.phase is Phase.AWAIT_DRAW:
        return frozenset({DRAW})
    # AWAIT_DISCARD: the seat holds a 14th tile (drawn or claimed)
    hand = state.hands[seat]
    actions: set[Action] = {
        Action(ActionKind.DISCARD, tile=t) for t in set(hand.concealed)
    }
    if state.wall.remaining >= 1:
        counts: dict[int, list[Tile]] = {}
        for t in hand.concealed:
            counts.setdefault(t.kind.index, []).append(t)
        for kind_tiles in counts.values():
            if len(kind_tiles) == COPIES_PER_KIND:
                using = tuple(sorted(kind_tiles, key=lambda t: t.copy))
                actions.add(Action(ActionKind.CONCEALED_KONG, using=using))
        pung_kinds = {
            m.base_index for m in hand.melds if m.kind is MeldKind.PUNG
        }
        for t in hand.concealed:
            if t.kind.index in pung_kinds:
                actions.add(Action(ActionKind.ADDED_KONG, tile=t))
    if state.last_drawn is not None and _self_draw_result(state, seat).is_win:
        actions.add(WIN_SELF_DRAW)
    return frozenset(actions)


def _shape_complete(hand: Hand, extra: Tile | None) -> bool:
    """Cheap cached screen run before full fan detection on win checks."""
    counts = hand.counts()
    if extra is not None:
        counts[extra.kind.index] += 1
    return is_winning_shape(counts, len(hand.melds))


def _non_win(state: GameState, tile: Tile) -> FanResult:
    return FanResult((), 0, state.ruleset.fan_table.threshold, tile.kind.index, None)


def _self_draw_result(state: GameState, seat: int) -> FanResult:
    drawn = state.last_drawn
    assert drawn is not None
    hand = state.hands[seat]
    if not _shape_complete(hand, None):
        return _non_win(state, drawn)
    rest = list(hand.concealed)
    rest.remove(drawn)
    probe = Hand(concealed=rest, melds=hand.melds)
    win_by = WinBy.REPLACEMENT if state.last_draw_replacement else WinBy.SELF_DRAW
    ctx = _win_context(state, seat, drawn, win_by, None, tile_visible=False)
    return best_fan(probe, drawn, ctx, table=state.ruleset.fan_table)


def _claim_win_result(
    state: GameState, seat: int, tile: Tile, win_by: WinBy, source: int
) -> FanResult:
    if not _shape_complete(state.hands[seat], tile):
        return _non_win(state, tile)
    ctx = _win_context(
        state, seat, tile, win_by, source, tile_visible=win_by is WinBy.DISCARD
    )
    return best_fan(state.hands[seat], tile, ctx, table=state.ruleset.fan_table)


def _win_context(
    state: GameState,
    seat: int,
    tile: Tile,
    win_by: WinBy,
    source: int | None,
    *,
    tile_visible: bool,
) -> WinContext:
    visible = list(state.visible_counts)
    if tile_visible:
        visible[tile.kind.index] -= 1
    return WinContext(
        win_by=win_by,
        seat_wind=seat + 1,
        prevalent_wind=1,
        winner=seat,
        discarder=source,
        last_wall_tile=state.wall.remaining == 0,
        concealed_throughout=state.concealed_throughout[seat],
        visible_counts=tuple(visible),
        winning_tile=tile,
    )


def step(state: GameState, seat: int, action: Action) -> GameState:
    """Apply one action, mutating and returning ``state``.

    Raises :class:`IllegalActionError` (carrying the legal set) for any
    action outside ``legal_actions(state, seat)``.
    """
    legal = legal_actions(state, seat)
    if action not in legal:
        raise IllegalActionError(
            f"illegal {action.kind.value} by seat {seat} in {state.phase.value}", legal
        )
    if state.phase is Phase.AWAIT_CLAIMS:
        _log(state, seat, action)
        pending = state.pending_claims
        assert pending is not None
        pending.responses[seat] = action
        if not pending.undecided:
            _resolve_claims(state)
        return state
    kind = action.kind
    if kind is ActionKind.DRAW:
        _do_draw(state, seat)
    elif kind is ActionKind.DISCARD:
        _do_discard(state, seat, action.tile)
    elif kind is ActionKind.CONCEALED_KONG:
        _do_concealed_kong(state, seat, action.using)
    elif kind is ActionKind.ADDED_KONG:
        _do_added_kong(state, seat, action.tile)
    elif kind is ActionKind.WIN_SELF_DRAW:
        _do_self_draw_win(state, seat)
    else:  # pragma: no cover - legality filter excludes everything else
        raise IllegalActionError(f"unhandled action kind {kind}", legal)
    return state


def _log(state: GameState, seat: int, action: Action, revealed: tuple[Tile, ...] = ()) -> None:
    ev = Event(seat, action, revealed, len(state.event_log))
    state.event_log.append(ev)
    rival_view = ev.redacted_for(-1)
    for viewer in range(SEATS):
        state.redacted_logs[viewer].append(ev if viewer == seat else rival_view)


def _do_draw(state: GameState, seat: int) -> None:
    drawn = state.wall.draw_front()
    state.hands[seat].concealed.append(drawn)
    state.last_drawn = drawn
    state.last_draw_replacement = False
    state.phase = Phase.AWAIT_DISCARD
    _log(state, seat, Action(ActionKind.DRAW, tile=drawn))


def _replacement_draw(state: GameState, seat: int) -> None:
    drawn = state.wall.draw_back()
    state.hands[seat].concealed.append(drawn)
    state.last_drawn = drawn
    state.last_draw_replacement = True
    state.phase = Phase.AWAIT_DISCARD
    state.current_seat = seat


def _do_discard(state: GameState, seat: int, tile: Tile | None) -> None:
    assert tile is not None
    hand = state.hands[seat]
    hand.concealed.remove(tile)
    state.discards[seat].append(tile)
    state.visible_counts[tile.kind.index] += 1
    state.last_drawn = None
    _log(state, seat, Action(ActionKind.DISCARD, tile=tile), revealed=(tile,))
    options = _discard_claim_options(state, seat, tile)
    if options:
        state.phase = Phase.AWAIT_CLAIMS
        state.pending_claims = PendingClaims("discard", seat, tile, options)
    else:
        _advance_to_draw(state, (seat + 1) % SEATS)


def _discard_claim_options(
    state: GameState, discarder: int, tile: Tile
) -> dict[int, frozenset[Action]]:
    options: dict[int, frozenset[Action]] = {}
    for seat in range(SEATS):
        if seat == discarder:
            continue
        claims: set[Action] = set()
        hand = state.hands[seat]
        same_kind = sorted(
            (t for t in hand.concealed if t.kind.index == tile.kind.index),
            key=lambda t: t.copy,
        )
        if len(same_kind) >= 2:
            claims.add(Action(ActionKind.PUNG, using=tuple(same_kind[:2])))
        if len(same_kind) == 3 and state.wall.remaining >= 1:
            claims.add(Action(ActionKind.MELDED_KONG, using=tuple(same_kind)))
        if seat == (discarder + 1) % SEATS:
            claims.update(_chow_claims(hand, tile))
        if _claim_win_result(state, seat, tile, WinBy.DISCARD, discarder).is_win:
            claims.add(WIN_DISCARD)
        if claims:
            claims.add(PASS)
            options[seat] = frozenset(claims)
    return options


def _chow_claims(hand: Hand, tile: Tile) -> set[Action]:
    if not is_suited(tile.kind.index):
        return set()
    claims: set[Action] = set()
    suit = suit_of(tile.kind.index)
    rank = rank_of(tile.kind.index)
    by_kind: dict[int, Tile] = {}
    for t in sorted(hand.concealed, key=lambda t: t.copy, reverse=True):
        if is_suited(t.kind.index) and suit_of(t.kind.index) == suit:
            by_kind[rank_of(t.kind.index)] = t
    for lo, hi in ((rank - 2, rank - 1), (rank - 1, rank + 1), (rank + 1, rank + 2)):
        if 1 <= lo and hi <= 9 and lo in by_kind and hi in by_kind:
            claims.add(Action(ActionKind.CHOW, using=(by_kind[lo], by_kind[hi])))
    return claims


def _do_concealed_kong(state: GameState, seat: int, using: tuple[Tile, ...]) -> None:
    hand = state.hands[seat]
    for t in using:
        hand.concealed.remove(t)
    hand.melds.append(Meld(MeldKind.KONG_CONCEALED, tuple(using)))
    _log(state, seat, Action(ActionKind.CONCEALED_KONG, using=tuple(using)))
    _replacement_draw(state, seat)


def _do_added_kong(state: GameState, seat: int, tile: Tile | None) -> None:
    assert tile is not None
    hand = state.hands[seat]
    hand.concealed.remove(tile)
    state.last_drawn = None
    _log(state, seat, Action(ActionKind.ADDED_KONG, tile=tile), revealed=(tile,))
    options: dict[int, frozenset[Action]] = {}
    for other in range(SEATS):
        if other == seat:
            continue
        if _claim_win_result(state, other, tile, WinBy.ROB_KONG, seat).is_win:
            options[other] = frozenset({WIN_ROB_KONG, PASS})
    if options:
        state.phase = Phase.AWAIT_CLAIMS
        state.pending_claims = PendingClaims("rob", seat, tile, options)
    else:
        _complete_added_kong(state, seat, tile)


def _complete_added_kong(state: GameState, seat: int, tile: Tile) -> None:
    hand = state.hands[seat]
    for i, meld in enumerate(hand.melds):
        if meld.kind is MeldKind.PUNG and meld.base_index == tile.kind.index:
            hand.melds[i] = Meld(
                MeldKind.KONG_ADDED,
                meld.tiles + (tile,),
                claimed_from=meld.claimed_from,
                claimed_tile=meld.claimed_tile,
            )
            break
    else:  # pragma: no cover - legality filter guarantees the pung exists
        raise RuntimeError("added kong without matching pung")
    state.visible_counts[tile.kind.index] += 1
    _replacement_draw(state, seat)


def _do_self_draw_win(state: GameState, seat: int) -> None:
    result = _self_draw_result(state, seat)
    drawn = state.last_drawn
    assert drawn is not None
    hand = state.hands[seat]
    hand.concealed.remove(drawn)
    win_by = WinBy.REPLACEMENT if state.last_draw_replacement else WinBy.SELF_DRAW
    _log(
        state,
        seat,
        Action(ActionKind.WIN_SELF_DRAW),
        revealed=tuple(hand.concealed) + (drawn,),
    )
    _finish_win(state, seat, result, win_by, None, drawn)


def _resolve_claims(state: GameState) -> None:
    pending = state.pending_claims
    assert pending is not None
    state.pending_claims = None

    def priority(action: Action) -> int:
        if action.kind in (ActionKind.WIN_DISCARD, ActionKind.WIN_ROB_KONG):
            return 3
        if action.kind in (ActionKind.PUNG, ActionKind.MELDED_KONG):
            return 2
        if action.kind is ActionKind.CHOW:
            return 1
        return 0

    best_seat: int | None = None
    best_action: Action | None = None
    best_rank = 0
    for dist in range(1, SEATS):
        seat = (pending.source_seat + dist) % SEATS
        action = pending.responses.get(seat)
        if action is None:
            continue
        rank = priority(action)
        if rank > best_rank:
            best_seat, best_action, best_rank = seat, action, rank
    if best_action is None or best_action.kind is ActionKind.PASS:
        if pending.trigger == "rob":
            _complete_added_kong(state, pending.source_seat, pending.tile)
        else:
            _advance_to_draw(state, (pending.source_seat + 1) % SEATS)
        return
    seat = best_seat
    assert seat is not None
    if best_action.kind is ActionKind.WIN_ROB_KONG:
        result = _claim_win_result(state, seat, pending.tile, WinBy.ROB_KONG, pending.source_seat)
        _finish_win(state, seat, result, WinBy.ROB_KONG, pending.source_seat, pending.tile)
        return
    if best_action.kind is ActionKind.WIN_DISCARD:
        # score first: the context subtracts the winning tile from the
        # visible counts while it still sits in the discard row
        result = _claim_win_result(state, seat, pending.tile, WinBy.DISCARD, pending.source_seat)
        claimed = state.discards[pending.source_seat].pop()
        state.visible_counts[claimed.kind.index] -= 1
        _finish_win(state, seat, result, WinBy.DISCARD, pending.source_seat, claimed)
        return
    # a meld claim: the discard leaves the row and joins the claimant's melds
    claimed = state.discards[pending.source_seat].pop()
    hand = state.hands[seat]
    for t in best_action.using:
        hand.concealed.remove(t)
        state.visible_counts[t.kind.index] += 1
    if best_action.kind is ActionKind.CHOW:
        run = tuple(sorted(best_action.using + (claimed,), key=lambda t: t.kind.index))
        meld = Meld(MeldKind.CHOW, run, claimed_from=pending.source_seat, claimed_tile=claimed)
    elif best_action.kind is ActionKind.PUNG:
        meld = Meld(
            MeldKind.PUNG,
            best_action.using + (claimed,),
            claimed_from=pending.source_seat,
            claimed_tile=claimed,
        )
    else:
        meld = Meld(
            MeldKind.KONG_MELDED,
            best_action.using + (claimed,),
            claimed_from=pending.source_seat,
            claimed_tile=claimed,
        )
    hand.melds.append(meld)
    state.concealed_throughout[seat] = False
    state.last_drawn = None
    if best_action.kind is ActionKind.MELDED_KONG:
        _replacement_draw(state, seat)
    else:
        state.current_seat = seat
        state.phase = Phase.AWAIT_DISCARD


def _advance_to_draw(state: GameState, seat: int) -> None:
    state.current_seat = seat
    if state.wall.remaining == 0:
        _finish_draw(state)
    else:
        state.phase = Phase.AWAIT_DRAW


def _finish_draw(state: GameState) -> None:
    scores = [0] * SEATS
    state.result = MatchResult(
        winner=None,
        win_by=None,
        fan_result=None,
        scores=scores,
        compensated=state.ruleset.compensated(scores),
    )
    state.phase = Phase.FINISHED


def _finish_win(
    state: GameState,
    seat: int,
    result: FanResult,
    win_by: WinBy,
    payer: int | None,
    win_tile: Tile,
) -> None:
    payer_seat = payer if win_by in (WinBy.DISCARD, WinBy.ROB_KONG) else None
    scores = settle_total(result.total, win_by, seat, payer_seat)
    state.result = MatchResult(
        winner=seat,
        win_by=win_by,
        fan_result=result,
        scores=scores,
        compensated=state.ruleset.compensated(scores),
    )
    state._won_tile = win_tile
    state.phase = Phase.FINISHED


def _finish_forfeit(state: GameState, seat: int, policy: ForfeitPolicy) -> None:
    scores = policy.scores(seat)
    state.result = MatchResult(
        winner=None,
        win_by=None,
        fan_result=None,
        scores=scores,
        compensated=state.ruleset.compensated(scores),
        forfeit_seat=seat,
    )
    state.phase = Phase.FINISHED


def observation_for(state: GameState, seat: int) -> Observation:
    """Project the state onto what ``seat`` may see, with its pending request."""
    if not 0 <= seat < SEATS:
        raise ValueError("seat out of range")
    legal: frozenset[Action] = frozenset()
    request: RequestKind | None = None
    if state.phase is not Phase.FINISHED:
        legal = legal_actions(state, seat)
        if legal:
            request = (
                RequestKind.CLAIM_OR_PASS
                if state.phase is Phase.AWAIT_CLAIMS
                else RequestKind.ACT_NOW
            )
    melds = tuple(
        MeldView(
            seat=s,
            kind=meld.kind,
            tiles=(
                meld.tiles
                if s == seat or meld.kind is not MeldKind.KONG_CONCEALED
                else None
            ),
            claimed_from=meld.claimed_from,
        )
        for s in range(SEATS)
        for meld in state.hands[s].melds
    )
    claim_tile = state.pending_claims.tile if state.pending_claims else None
    return Observation(
        match_id=state.match_id,
        seat=seat,
        request_kind=request,
        phase=state.phase,
        concealed=tuple(state.hands[seat].concealed),
        melds=melds,
        discards=tuple(tuple(row) for row in state.discards),
        wall_remaining=state.wall.remaining,
        current_seat=state.current_seat,
        legal=legal,
        events=tuple(state.redacted_logs[seat]),
        claim_tile=claim_tile,
        visible_counts=tuple(state.visible_counts),
        last_drawn=state.last_drawn if seat == state.current_seat else None,
    )


class AgentLike(Protocol):  # pragma: no cover - typing aid
    id: str

    def act(self, obs: Observation) -> Action: ...


class AgentFailure(Exception):
    """An agent timed out, died, or produced an unparseable response."""


@dataclass
class MatchRecord:
    match_id: str
    seed: int | None
    ruleset_id: str
    wall: list[str]
    events: list[dict]
    result: dict

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "match_id": self.match_id,
                "seed": self.seed,
                "ruleset_id": self.ruleset_id,
                "wall": self.wall,
                "events": self.events,
                "result": self.result,
            },
            separators=(",", ":"),
        )

    @classmethod
    def from_json_line(cls, line: str) -> "MatchRecord":
        data = json.loads(line)
        return cls(
            match_id=data["match_id"],
            seed=data["seed"],
            ruleset_id=data["ruleset_id"],
            wall=data["wall"],
            events=data["events"],
            result=data["result"],
        )

    @property
    def winner(self) -> int | None:
        return self.result["winner"]

    @property
    def scores(self) -> list[int]:
        return self.result["scores"]

    @property
    def compensated_scores(self) -> list[float] | None:
        return self.result["compensated_scores"]

    @property
    def fan_total(self) -> int:
        return self.result["fan_total"]


def run_match(
    wall: Wall,
    agents: Sequence[AgentLike],
    ruleset: RuleSet | str,
    *,
    match_id: str | None = None,
    forfeit: ForfeitPolicy = DEFAULT_FORFEIT,
) -> MatchRecord:
    """Play one match to the end and return its full record.

    An agent that raises, times out, or submits an illegal action forfeits
    the match under ``forfeit``; the referee itself never fails on agent
    misbehavior.
    """
    if len(agents) != SEATS:
        raise ValueError("run_match needs exactly four agents")
    if isinstance(ruleset, str):
        ruleset = get_ruleset(ruleset)
    wall_codes = [format_tile(t, with_copy=True) for t in wall.tiles]
    state = new_match(wall, ruleset, match_id=match_id)
    while state.phase is not Phase.FINISHED:
        seat = _seat_to_act(state)
        obs = observation_for(state, seat)
        try:
            action = agents[seat].act(obs)
        except Exception:
            _finish_forfeit(state, seat, forfeit)
            break
        try:
            step(state, seat, action)
        except IllegalActionError:
            _finish_forfeit(state, seat, forfeit)
            break
    assert state.result is not None
    return MatchRecord(
        match_id=state.match_id,
        seed=wall.seed,
        ruleset_id=ruleset.ruleset_id,
        wall=wall_codes,
        events=[e.payload() for e in state.event_log],
        result=state.result.payload(),
    )


def _seat_to_act(state: GameState) -> int:
    if state.phase is Phase.AWAIT_CLAIMS:
        pending = state.pending_claims
        assert pending is not None
        undecided = pending.undecided
        assert undecided, "claim phase with no outstanding claimants"
        return undecided[0]
    return state.current_seat


class ScriptedAgent:
    """Replays one seat's recorded events; the replay-determinism harness."""

    def __init__(self, seat: int, events: Iterable[dict]):
        self.id = f"scripted-{seat}"
        self.seat = seat
        self._queue = deque(e for e in events if e["seat"] == seat)

    def act(self, obs: Observation) -> Action:
        if not self._queue:
            raise AgentFailure(f"script for seat {self.seat} exhausted")
        entry = self._queue.popleft()
        kind = ActionKind(entry["action"])
        tiles = [parse_tile(c) for c in entry["tiles"]]
        if kind is ActionKind.DRAW:
            return DRAW
        if kind in (ActionKind.DISCARD, ActionKind.ADDED_KONG):
            return Action(kind, tile=tiles[0])
        if kind in (
            ActionKind.CHOW,
            ActionKind.PUNG,
            ActionKind.MELDED_KONG,
            ActionKind.CONCEALED_KONG,
        ):
            return Action(kind, using=tuple(tiles))
        return Action(kind)


def replay_match(record: MatchRecord) -> MatchRecord:
    """Re-run a record through the referee with scripted agents."""
    wall = Wall.from_dump(" ".join(record.wall), seed=record.seed)
    agents = [ScriptedAgent(seat, record.events) for seat in range(SEATS)]
    return run_match(wall, agents, record.ruleset_id, match_id=record.match_id)
