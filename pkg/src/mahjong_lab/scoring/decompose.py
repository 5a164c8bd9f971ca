"""Exhaustive decomposition of 14-tile-equivalent hands into winning forms.

``decompose`` returns every maximal reading of the hand: all standard
partitions (four sets plus a pair, declared melds fixed), plus the special
forms (seven pairs, thirteen orphans, knitted straight, honors-and-knitted).
An empty result means the hand is not a winning shape.  Fan evaluation later
maximises over these readings, so nothing is pruned here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..tiles import (
    NUM_KINDS,
    Hand,
    Meld,
    MeldKind,
    Tile,
    is_honor,
)
from .shape import _KNIT_SETS


class Form(Enum):
    STANDARD = "standard"
    SEVEN_PAIRS = "seven_pairs"
    THIRTEEN_ORPHANS = "thirteen_orphans"
    KNITTED_STRAIGHT = "knitted_straight"
    HONORS_KNITTED = "honors_knitted"


@dataclass(frozen=True, slots=True)
class Piece:
    """One set of a decomposition. ``base`` is the lowest kind index."""

    shape: str  # 'chow' | 'pung' | 'kong' | 'knit'
    base: int
    melded: bool = False          # built from a claim or a declared kong
    concealed_kong: bool = False

    @property
    def is_kong(self) -> bool:
        return self.shape == "kong"

    @property
    def is_pung_like(self) -> bool:
        return self.shape in ("pung", "kong")


@dataclass(frozen=True, slots=True)
class Decomposition:
    form: Form
    pieces: tuple[Piece, ...]
    pair: int | None
    pair_kinds: tuple[int, ...] = ()   # seven-pairs reading, duplicates listed twice
    knit_kinds: tuple[int, ...] = ()   # the nine knitted kinds used, if any
    loose_kinds: tuple[int, ...] = ()  # held singles of a pieceless special form


@dataclass(frozen=True)
class ScoringConfig:
    """Rule switches that change what counts as a winning shape."""

    seven_pairs_duplicates: bool = True


DEFAULT_CONFIG = ScoringConfig()

_MELD_SHAPE = {
    MeldKind.CHOW: "chow",
    MeldKind.PUNG: "pung",
    MeldKind.KONG_MELDED: "kong",
    MeldKind.KONG_CONCEALED: "kong",
    MeldKind.KONG_ADDED: "kong",
}


def meld_piece(meld: Meld) -> Piece:
    return Piece(
        shape=_MELD_SHAPE[meld.kind],
        base=meld.base_index,
        melded=meld.kind is not MeldKind.KONG_CONCEALED,
        concealed_kong=meld.kind is MeldKind.KONG_CONCEALED,
    )


def _std_partitions(counts: list[int], sets_needed: int) -> list[tuple[tuple[tuple[str, int], ...], int]]:
    """All (sets, pair) partitions of concealed counts; each found once."""
    out: list[tuple[tuple[tuple[str, int], ...], int]] = []
    sets_acc: list[tuple[str, int]] = []
    pair_acc: list[int] = []

    def rec(k: int, sets_left: int) -> None:
        while k < NUM_KINDS and counts[k] == 0:
            k += 1
        if k == NUM_KINDS:
            if sets_left == 0 and pair_acc:
                out.append((tuple(sets_acc), pair_acc[0]))
            return
        c = counts[k]
        suited = k < 27 and k % 9 <= 6
        for take_pair in (0, 1) if (c >= 2 and not pair_acc) else (0,):
            rest_after_pair = c - 2 * take_pair
            for take_pung in (0, 1) if rest_after_pair >= 3 else (0,):
                chows = rest_after_pair - 3 * take_pung
                if chows and not (suited and counts[k + 1] >= chows and counts[k + 2] >= chows):
                    continue
                if take_pung + chows > sets_left:
                    continue
                if take_pair:
                    pair_acc.append(k)
                counts[k] = 0
                if chows:
                    counts[k + 1] -= chows
                    counts[k + 2] -= chows
                if take_pung:
                    sets_acc.append(("pung", k))
                for _ in range(chows):
                    sets_acc.append(("chow", k))
                rec(k + 1, sets_left - take_pung - chows)
                for _ in range(chows):
                    sets_acc.pop()
                if take_pung:
                    sets_acc.pop()
                counts[k] = c
                if chows:
                    counts[k + 1] += chows
                    counts[k + 2] += chows
                if take_pair:
                    pair_acc.pop()

    rec(0, sets_needed)
    return out


def decompose_counts(
    concealed: list[int],
    melds: tuple[Piece, ...],
    config: ScoringConfig = DEFAULT_CONFIG,
) -> list[Decomposition]:
    """Decompositions for concealed counts (winning tile included) plus melds."""
    total = sum(concealed) + 3 * len(melds)
    if total != 14:
        raise ValueError(f"hand is {total}-tile equivalent, expected 14")
    if any(c < 0 or c > 4 for c in concealed):
        raise ValueError("kind count out of range")
    results: list[Decomposition] = []

    for sets, pair in _std_partitions(list(concealed), 4 - len(melds)):
        pieces = melds + tuple(Piece(shape, base) for shape, base in sets)
        results.append(Decomposition(Form.STANDARD, pieces, pair))

    if not melds:
        results.extend(_special_forms(concealed, config))
    elif len(melds) == 1:
        results.extend(_knitted_forms(concealed, melds, config))
    return results


def _special_forms(concealed: list[int], config: ScoringConfig) -> list[Decomposition]:
    out: list[Decomposition] = []

    pairs: list[int] = []
    ok = True
    for k, c in enumerate(concealed):
        if c == 0:
            continue
        if c == 2:
            pairs.append(k)
        elif c == 4 and config.seven_pairs_duplicates:
            pairs.extend((k, k))
        else:
            ok = False
            break
    if ok and len(pairs) == 7:
        out.append(Decomposition(Form.SEVEN_PAIRS, (), None, pair_kinds=tuple(pairs)))

    from ..tiles import ORPHAN_KINDS

    orphan = all(c == 0 or k in _ORPHAN_SET for k, c in enumerate(concealed))
    if orphan:
        present = [concealed[k] for k in ORPHAN_KINDS]
        if all(c >= 1 for c in present) and sorted(present) == [1] * 12 + [2]:
            pair = ORPHAN_KINDS[present.index(2)]
            out.append(Decomposition(Form.THIRTEEN_ORPHANS, (), pair))

    if all(c <= 1 for c in concealed):
        held = {k for k, c in enumerate(concealed) if c}
        suited_held = {k for k in held if k < 27}
        for kinds in _KNIT_SETS:
            if suited_held <= set(kinds):
                out.append(
                    Decomposition(
                        Form.HONORS_KNITTED, (), None,
                        knit_kinds=kinds,
                        loose_kinds=tuple(sorted(held)),
                    )
                )
                break  # one reading suffices; fans depend only on held tiles

    out.extend(_knitted_forms(concealed, (), config))
    return out


def _knitted_forms(
    concealed: list[int], melds: tuple[Piece, ...], config: ScoringConfig
) -> list[Decomposition]:
    out: list[Decomposition] = []
    for kinds in _KNIT_SETS:
        if not all(concealed[k] >= 1 for k in kinds):
            continue
        reduced = list(concealed)
        for k in kinds:
            reduced[k] -= 1
        for sets, pair in _std_partitions(reduced, 1 - len(melds)):
            pieces = (
                tuple(Piece("knit", kinds[i]) for i in (0, 3, 6))
                + melds
                + tuple(Piece(shape, base) for shape, base in sets)
            )
            out.append(
                Decomposition(Form.KNITTED_STRAIGHT, pieces, pair, knit_kinds=kinds)
            )
    return out


_ORPHAN_SET = frozenset({0, 8, 9, 17, 18, 26, 27, 28, 29, 30, 31, 32, 33})


def decompose(
    hand: Hand,
    winning_tile: Tile,
    config: ScoringConfig = DEFAULT_CONFIG,
) -> list[Decomposition]:
    """All maximal decompositions of ``hand`` plus ``winning_tile``."""
    counts = hand.counts()
    counts[winning_tile.kind.index] += 1
    full = list(counts)
    for m in hand.melds:
        for t in m.tiles:
            full[t.kind.index] += 1
    if any(c > 4 for c in full):
        raise ValueError("more than four copies of one kind across hand and melds")
    melds = tuple(meld_piece(m) for m in hand.melds)
    return decompose_counts(counts, melds, config)
