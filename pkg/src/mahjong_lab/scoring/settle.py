"""Score settlement: fan totals to per-seat point transfers."""

from __future__ import annotations

from .context import WinBy, WinContext
from .detect import FanResult
from .fan_table import WIN_THRESHOLD

SEATS = 4
BASE_STAKE = 8


def settle_total(fan_total: int, win_by: WinBy, winner: int, payer: int | None,
                 *, threshold: int = WIN_THRESHOLD) -> list[int]:
    """Point transfers for a win worth ``fan_total``.

    Self-drawn wins (including replacement-tile wins) collect the fan value
    plus the base stake from every seat.  Discard wins (including robbed
    kongs) collect fan value plus base from the source seat and the bare
    base stake from the other two.
    """
    if fan_total < threshold:
        raise ValueError(f"fan total {fan_total} is below the {threshold}-point threshold")
    if not 0 <= winner < SEATS:
        raise ValueError("winner seat out of range")
    scores = [0] * SEATS
    if win_by.self_drawn:
        if payer is not None:
            raise ValueError("self-drawn win cannot have a payer")
        for seat in range(SEATS):
            scores[seat] = -(fan_total + BASE_STAKE)
        scores[winner] = 3 * (fan_total + BASE_STAKE)
    else:
        if payer is None or not 0 <= payer < SEATS or payer == winner:
            raise ValueError("discard win needs a payer seat distinct from the winner")
        for seat in range(SEATS):
            scores[seat] = -BASE_STAKE
        scores[payer] = -(fan_total + BASE_STAKE)
        scores[winner] = fan_total + 3 * BASE_STAKE
    assert sum(scores) == 0
    return scores


def settle(result: FanResult, context: WinContext) -> list[int]:
    """Point transfers for a scored win under its context."""
    if not result.is_win:
        raise ValueError("cannot settle a non-winning result")
    return settle_total(
        result.total,
        context.win_by,
        context.winner_seat,
        context.discarder,
        threshold=result.threshold,
    )
