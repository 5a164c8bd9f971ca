"""Win circumstances used by fan evaluation and settlement."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ..tiles import Tile


class WinBy(Enum):
    """How the winning tile arrived."""

    DISCARD = "discard"
    SELF_DRAW = "self_draw"
    ROB_KONG = "rob_kong"
    REPLACEMENT = "replacement"

    @property
    def self_drawn(self) -> bool:
        return self in (WinBy.SELF_DRAW, WinBy.REPLACEMENT)


@dataclass(frozen=True)
class WinContext:
    """Everything about a win that is not visible in the tiles themselves.

    ``seat_wind`` and ``prevalent_wind`` are 1..4 for East/South/West/North.
    ``discarder`` is the seat that pays as the source of the winning tile;
    it must be set for DISCARD wins and for ROB_KONG (the kong declarer).
    ``visible_counts`` are per-kind copies visible in melds and discards,
    excluding the winning tile itself; it drives the fourth-copy fan and may
    be omitted when scoring a hand outside a live game.  ``winning_tile``
    lets a context stand alone when scoring a bare decomposition.
    """

    win_by: WinBy
    seat_wind: int = 1
    prevalent_wind: int = 1
    winner: int | None = None
    discarder: int | None = None
    last_wall_tile: bool = False
    concealed_throughout: bool = True
    visible_counts: tuple[int, ...] | None = None
    winning_tile: "Tile | None" = None

    def __post_init__(self) -> None:
        if not 1 <= self.seat_wind <= 4:
            raise ValueError("seat_wind must be 1..4")
        if not 1 <= self.prevalent_wind <= 4:
            raise ValueError("prevalent_wind must be 1..4")
        if self.win_by in (WinBy.DISCARD, WinBy.ROB_KONG) and self.discarder is None:
            raise ValueError(f"{self.win_by.value} win needs a discarder seat")
        if self.win_by.self_drawn and self.discarder is not None:
            raise ValueError("self-drawn win cannot have a discarder")

    @property
    def winner_seat(self) -> int:
        if self.winner is not None:
            return self.winner
        return self.seat_wind - 1
