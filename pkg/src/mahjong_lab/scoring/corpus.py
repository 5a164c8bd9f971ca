"""Loader for the bundled corpus of hand-checked scoring cases.

Each case pins down one hand (concealed tiles plus declared melds), the
winning tile, the table context, and the expected outcome: total points,
the awarded fan list, and whether the total clears the win threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..tiles import NUM_KINDS, Hand, Meld, MeldKind, Tile, parse_tile
from .context import WinBy, WinContext

__all__ = ["GoldenCase", "load_golden_corpus"]


@dataclass(frozen=True, slots=True)
class GoldenCase:
    name: str
    hand: Hand
    winning_tile: Tile
    context: WinContext
    expected_total: int
    expected_fans: tuple[tuple[int, int, int], ...]
    expected_win: bool


class _CopyDealer:
    """Assigns distinct copy numbers so one case never reuses a physical tile."""

    def __init__(self) -> None:
        self._used: dict[int, int] = {}

    def take(self, code: str) -> Tile:
        base = parse_tile(code)
        copy = self._used.get(base.kind.index, 0)
        self._used[base.kind.index] = copy + 1
        return Tile(base.kind, copy)


def _parse_meld(spec: dict, dealer: _CopyDealer) -> Meld:
    kind = MeldKind(spec["kind"])
    tiles = tuple(dealer.take(code) for code in spec["tiles"].split())
    claimed_from = spec.get("from")
    if kind is MeldKind.KONG_CONCEALED:
        claimed_from = None
    claimed = tiles[0] if claimed_from is not None else None
    return Meld(kind, tiles, claimed_from=claimed_from, claimed_tile=claimed)


def _parse_case(spec: dict) -> GoldenCase:
    dealer = _CopyDealer()
    melds = [_parse_meld(m, dealer) for m in spec["melds"]]
    concealed = [dealer.take(code) for code in spec["concealed"].split()]
    winning = dealer.take(spec["winning_tile"])
    ctx = spec["context"]
    visible = ctx.get("visible")
    visible_counts = None
    if visible:
        counts = [0] * NUM_KINDS
        for code, n in visible.items():
            counts[parse_tile(code).kind.index] = n
        visible_counts = tuple(counts)
    context = WinContext(
        win_by=WinBy(ctx["win_by"]),
        seat_wind=ctx["seat_wind"],
        prevalent_wind=ctx["prevalent_wind"],
        discarder=ctx["discarder"],
        last_wall_tile=ctx["last_wall_tile"],
        concealed_throughout=ctx["concealed_throughout"],
        visible_counts=visible_counts,
        winning_tile=winning,
    )
    expected = spec["expected"]
    return GoldenCase(
        name=spec["name"],
        hand=Hand(concealed=concealed, melds=melds),
        winning_tile=winning,
        context=context,
        expected_total=expected["total"],
        expected_fans=tuple((f[0], f[1], f[2]) for f in expected["fans"]),
        expected_win=expected["is_win"],
    )


def load_golden_corpus(path: str | Path | None = None) -> list[GoldenCase]:
    if path is None:
        source = resources.files("mahjong_lab.scoring.data").joinpath("golden_corpus.json")
        raw = json.loads(source.read_text("utf-8"))
    else:
        raw = json.loads(Path(path).read_text("utf-8"))
    return [_parse_case(spec) for spec in raw["cases"]]
