"""Fan detection and hand valuation.

``best_fan`` scores a 13-tile-equivalent hand plus winning tile by trying
every decomposition and every placement of the winning tile, evaluating the
full pattern catalogue for each reading, applying the account-once exclusion
rules, and keeping the highest total.  Zero-value wins fall back to the
dedicated zero-pattern entry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from ..tiles import (
    GREEN_KINDS,
    NUM_KINDS,
    REVERSIBLE_KINDS,
    WIND_BASE,
    Hand,
    Tile,
    is_dragon,
    is_honor,
    is_suited,
    is_terminal,
    is_terminal_or_honor,
    is_wind,
    rank_of,
    suit_of,
)
from .context import WinBy, WinContext
from .decompose import DEFAULT_CONFIG, Decomposition, Form, Piece, ScoringConfig, decompose
from .fan_table import FanTable, default_fan_table
from .shape import wait_kinds

CHICKEN_HAND_ID = 39

# Patterns built from relations between two chows; matched, not detected.
_PAIR_FAN_IDS = (1, 2, 3, 4)
# Patterns built from three or more chows; their member sets restrict which
# two-chow patterns may still be formed inside them.
_COMPOSITE_CHOW_IDS = frozenset({30, 35, 37, 49, 50, 51, 59, 64, 67, 73})


@dataclass(frozen=True)
class FanAward:
    pattern_id: int
    points: int
    multiplicity: int = 1

    @property
    def total(self) -> int:
        return self.points * self.multiplicity


@dataclass(frozen=True)
class FanResult:
    """Outcome of scoring one hand: kept fans and their point total."""

    fans: tuple[FanAward, ...]
    total: int
    threshold: int
    win_kind: int
    decomposition: Decomposition | None

    @property
    def is_win(self) -> bool:
        return self.total >= self.threshold

    def as_dict(self) -> dict:
        return {
            "fan_total": self.total,
            "fan_list": [
                {"pattern_id": a.pattern_id, "points": a.points, "multiplicity": a.multiplicity}
                for a in self.fans
            ],
        }


def piece_kinds(piece: Piece) -> tuple[int, ...]:
    if piece.shape == "chow":
        return (piece.base, piece.base + 1, piece.base + 2)
    if piece.shape == "knit":
        return (piece.base, piece.base + 3, piece.base + 6)
    return (piece.base,)


def _piece_has_outer(piece: Piece) -> bool:
    if piece.shape == "chow":
        return rank_of(piece.base) in (1, 7)
    if piece.shape == "knit":
        return rank_of(piece.base) in (1, 3)
    return is_terminal_or_honor(piece.base)


def _piece_has_five(piece: Piece) -> bool:
    if piece.shape == "chow":
        return rank_of(piece.base) in (3, 4, 5)
    if piece.shape == "knit":
        return rank_of(piece.base) == 2
    return is_suited(piece.base) and rank_of(piece.base) == 5


class _Reading:
    """One decomposition with the winning tile placed in a specific set."""

    __slots__ = (
        "dec", "ctx", "win_kind", "place", "counts_all", "pre_concealed",
        "meld_slots", "unique_wait", "chows", "pung_pieces", "config",
    )

    def __init__(self, dec: Decomposition, ctx: WinContext, win_kind: int,
                 place: tuple[str, int | None], counts_all: tuple[int, ...],
                 pre_concealed: tuple[int, ...], meld_slots: int,
                 unique_wait: bool, config: ScoringConfig):
        self.dec = dec
        self.ctx = ctx
        self.win_kind = win_kind
        self.place = place
        self.counts_all = counts_all
        self.pre_concealed = pre_concealed
        self.meld_slots = meld_slots
        self.unique_wait = unique_wait
        self.config = config
        self.chows = [
            (i, suit_of(p.base), rank_of(p.base))
            for i, p in enumerate(dec.pieces) if p.shape == "chow"
        ]
        self.pung_pieces = [(i, p) for i, p in enumerate(dec.pieces) if p.is_pung_like]

    # tile-population features

    def kinds_present(self) -> list[int]:
        return [k for k, c in enumerate(self.counts_all) if c]

    def suits_present(self) -> set[int]:
        return {suit_of(k) for k in self.kinds_present() if is_suited(k)}

    def has_honors(self) -> bool:
        return any(self.counts_all[k] for k in range(WIND_BASE, NUM_KINDS))

    # piece-population features

    def wind_pungs(self) -> list[int]:
        return [p.base for _, p in self.pung_pieces if is_wind(p.base)]

    def dragon_pungs(self) -> list[int]:
        return [p.base for _, p in self.pung_pieces if is_dragon(p.base)]

    def kong_counts(self) -> tuple[int, int]:
        melded = sum(1 for _, p in self.pung_pieces if p.is_kong and p.melded)
        concealed = sum(1 for _, p in self.pung_pieces if p.is_kong and p.concealed_kong)
        return melded, concealed

    def concealed_pungs(self) -> int:
        n = 0
        for i, p in enumerate(self.dec.pieces):
            if not p.is_pung_like:
                continue
            if p.concealed_kong:
                n += 1
            elif p.melded:
                continue
            elif self.place == ("piece", i) and not self.ctx.win_by.self_drawn:
                continue
            else:
                n += 1
        return n


def _placements(dec: Decomposition, win_kind: int) -> list[tuple[str, int | None]]:
    if dec.form is Form.SEVEN_PAIRS:
        return [("pairs", None)]
    if dec.form in (Form.THIRTEEN_ORPHANS, Form.HONORS_KNITTED):
        return [("loose", None)]
    out: list[tuple[str, int | None]] = []
    for i, p in enumerate(dec.pieces):
        if p.melded or p.concealed_kong:
            continue
        if win_kind in piece_kinds(p):
            out.append(("piece", i))
    if dec.pair == win_kind:
        out.append(("pair", None))
    return out


def _max_disjoint(instances: list[frozenset[int]]) -> tuple[int, list[tuple[frozenset[int], ...]]]:
    """Largest count of pairwise-disjoint instances, and every selection
    achieving it (order-normalized)."""
    best = 0
    selections: set[tuple[frozenset[int], ...]] = set()

    def rec(start: int, used: frozenset[int], chosen: list[frozenset[int]]) -> None:
        nonlocal best
        picked_any = False
        for idx in range(start, len(instances)):
            inst = instances[idx]
            if used & inst:
                continue
            picked_any = True
            chosen.append(inst)
            rec(idx + 1, used | inst, chosen)
            chosen.pop()
        if not picked_any:
            if len(chosen) > best:
                best = len(chosen)
                selections.clear()
            if len(chosen) == best:
                selections.add(tuple(sorted(chosen, key=sorted)))

    rec(0, frozenset(), [])
    if best == 0:
        return 0, [()]
    return best, sorted(selections, key=lambda sel: [sorted(s) for s in sel])


def _composite_chow_instances(r: _Reading) -> dict[int, list[frozenset[int]]]:
    """Candidate member sets for every chow-built pattern of 3+ sets."""
    chows = r.chows
    found: dict[int, list[frozenset[int]]] = {}

    def add(fid: int, members: tuple[int, ...]) -> None:
        found.setdefault(fid, []).append(frozenset(members))

    for trio in itertools.combinations(chows, 3):
        idxs = tuple(t[0] for t in trio)
        suits = [t[1] for t in trio]
        ranks = sorted(t[2] for t in trio)
        if suits[0] == suits[1] == suits[2]:
            if ranks[0] == ranks[1] == ranks[2]:
                add(59, idxs)
            elif ranks == [1, 4, 7]:
                add(49, idxs)
            elif (ranks[1] - ranks[0] == ranks[2] - ranks[1] and ranks[1] - ranks[0] in (1, 2)):
                add(51, idxs)
        elif len(set(suits)) == 3:
            if ranks[0] == ranks[1] == ranks[2]:
                add(37, idxs)
            elif ranks == [1, 4, 7]:
                add(35, idxs)
            elif ranks[1] - ranks[0] == 1 and ranks[2] - ranks[1] == 1:
                add(30, idxs)

    for quad in itertools.combinations(chows, 4):
        idxs = tuple(t[0] for t in quad)
        suits = {t[1] for t in quad}
        ranks = sorted(t[2] for t in quad)
        if len(suits) != 1:
            continue
        if ranks[0] == ranks[3]:
            add(67, idxs)
        elif (ranks[1] - ranks[0] == ranks[2] - ranks[1] == ranks[3] - ranks[2]
              and ranks[1] - ranks[0] in (1, 2)):
            add(64, idxs)

    # whole-hand two-suit and one-suit terminal-chow arrangements
    if len(chows) == 4 and r.dec.form is Form.STANDARD and r.dec.pair is not None:
        pair_kind = r.dec.pair
        if is_suited(pair_kind) and rank_of(pair_kind) == 5:
            per_suit: dict[int, list[int]] = {}
            for _, s, rank in chows:
                per_suit.setdefault(s, []).append(rank)
            idxs = tuple(t[0] for t in chows)
            if set(per_suit) == {suit_of(pair_kind)} and sorted(per_suit[suit_of(pair_kind)]) == [1, 1, 7, 7]:
                add(73, idxs)
            elif (len(per_suit) == 2 and suit_of(pair_kind) not in per_suit
                  and all(sorted(v) == [1, 7] for v in per_suit.values())):
                add(50, idxs)

    return found


def _detect_simple(r: _Reading) -> dict[int, int]:
    """Multiplicities for every pattern that needs no matching machinery."""
    dec, ctx = r.dec, r.ctx
    form = dec.form
    fans: dict[int, int] = {}
    counts = r.counts_all
    kinds = r.kinds_present()
    suits = r.suits_present()
    honors = r.has_honors()
    seat_kind = WIND_BASE + ctx.seat_wind - 1
    prev_kind = WIND_BASE + ctx.prevalent_wind - 1
    wind_pungs = r.wind_pungs()
    dragon_pungs = r.dragon_pungs()
    pair_is_wind = dec.pair is not None and is_wind(dec.pair)
    pair_is_dragon = dec.pair is not None and is_dragon(dec.pair)
    standardish = form in (Form.STANDARD, Form.KNITTED_STRAIGHT)

    def hit(fid: int, mult: int = 1) -> None:
        if mult:
            fans[fid] = mult

    # terminal pungs always qualify; wind pungs only when the wind earns no
    # fan of its own and the hand is not a three-plus-winds arrangement
    big_winds = len(wind_pungs) == 4 or (len(wind_pungs) == 3 and pair_is_wind)
    eligible = 0
    for _, p in r.pung_pieces:
        k = p.base
        if is_suited(k):
            if is_terminal(k):
                eligible += 1
        elif is_wind(k) and k != seat_kind and k != prev_kind and not big_winds:
            eligible += 1
    hit(5, eligible)

    melded_kongs, concealed_kongs = r.kong_counts()
    combo = {
        (1, 0): 6, (0, 1): 21, (2, 0): 25, (1, 1): 27, (0, 2): 34,
    }.get((melded_kongs, concealed_kongs))
    if combo is not None:
        hit(combo)
    elif melded_kongs + concealed_kongs == 3:
        hit(65)
    elif melded_kongs + concealed_kongs == 4:
        hit(78)

    if len(suits) in (1, 2):
        hit(7)
    if not honors:
        hit(8)

    # waits: only when the pre-win hand waited on exactly one kind
    if r.unique_wait and standardish:
        kind, idx = r.place
        if kind == "pair":
            hit(11)
        elif kind == "piece":
            p = dec.pieces[idx]
            if p.shape == "chow":
                lo = rank_of(p.base)
                win_rank = rank_of(r.win_kind)
                if (lo == 1 and win_rank == 3) or (lo == 7 and win_rank == 7):
                    hit(9)
                elif win_rank == lo + 1:
                    hit(10)

    if ctx.win_by.self_drawn:
        hit(12)

    hit(13, len(dragon_pungs))
    if any(k == prev_kind for k in wind_pungs):
        hit(14)
    if any(k == seat_kind for k in wind_pungs):
        hit(15)
    if ctx.concealed_throughout and not ctx.win_by.self_drawn:
        hit(16)
    if ctx.concealed_throughout and ctx.win_by.self_drawn:
        hit(24)

    if standardish and dec.pair is not None and not r.pung_pieces and is_suited(dec.pair):
        hit(17)

    kong_bases = {p.base for _, p in r.pung_pieces if p.is_kong}
    hit(18, sum(1 for k in kinds if counts[k] == 4 and k not in kong_bases))

    suited_pungs = [(rank_of(p.base), suit_of(p.base)) for _, p in r.pung_pieces if is_suited(p.base)]
    by_rank: dict[int, set[int]] = {}
    for rank, suit in suited_pungs:
        by_rank.setdefault(rank, set()).add(suit)
    hit(19, sum(1 for s in by_rank.values() if len(s) == 2))
    hit(53, sum(1 for s in by_rank.values() if len(s) == 3))

    cp = r.concealed_pungs()
    if cp == 2:
        hit(20)
    elif cp == 3:
        hit(54)
    elif cp == 4:
        hit(74)

    if all(is_suited(k) and 2 <= rank_of(k) <= 8 for k in kinds):
        hit(22)

    if standardish:
        if all(_piece_has_outer(p) for p in dec.pieces) and dec.pair is not None \
                and is_terminal_or_honor(dec.pair):
            hit(23)
    elif form is Form.SEVEN_PAIRS:
        if all(is_terminal_or_honor(k) for k in dec.pair_kinds):
            hit(23)

    if ctx.visible_counts is not None and ctx.visible_counts[r.win_kind] == 3:
        hit(26)

    if form is Form.STANDARD and len(r.pung_pieces) == 4:
        hit(28)
    if len(suits) == 1:
        hit(29 if honors else 58)
    if len(suits) == 3 and any(is_wind(k) for k in kinds) and any(is_dragon(k) for k in kinds):
        hit(31)
    if form is Form.STANDARD and len(dec.pieces) == 4 \
            and all(p.melded for p in dec.pieces) and ctx.win_by is WinBy.DISCARD:
        hit(32)
    if len(dragon_pungs) == 2:
        hit(33)

    if all(k in REVERSIBLE_KINDS for k in kinds):
        hit(36)

    # shifted pungs across the three suits
    pung_rank_suits = sorted(set(suited_pungs))
    for trio in itertools.combinations(pung_rank_suits, 3):
        ranks = [t[0] for t in trio]
        if len({t[1] for t in trio}) == 3 and ranks[1] == ranks[0] + 1 and ranks[2] == ranks[1] + 1:
            hit(38)
            break

    if ctx.last_wall_tile and ctx.win_by is WinBy.SELF_DRAW:
        hit(40)
    if ctx.win_by is WinBy.REPLACEMENT:
        hit(41)
    if ctx.win_by is WinBy.ROB_KONG:
        hit(42)
    if ctx.last_wall_tile and ctx.win_by is WinBy.DISCARD:
        hit(43)

    if form is Form.HONORS_KNITTED:
        hit(44)
        if sum(counts[k] for k in range(27)) == 9:
            hit(45)
        if all(counts[k] for k in range(WIND_BASE, NUM_KINDS)):
            hit(63)
    if form is Form.KNITTED_STRAIGHT:
        hit(45)

    if kinds and all(is_suited(k) for k in kinds):
        ranks_used = [rank_of(k) for k in kinds]
        if all(rank >= 6 for rank in ranks_used):
            hit(46)
        if all(rank <= 4 for rank in ranks_used):
            hit(47)
        if all(rank >= 7 for rank in ranks_used):
            hit(61)
        if all(4 <= rank <= 6 for rank in ranks_used):
            hit(62)
        if all(rank <= 3 for rank in ranks_used):
            hit(56)

    if len(wind_pungs) == 3 and not pair_is_wind:
        hit(48)
    if len(wind_pungs) == 3 and pair_is_wind:
        hit(70)
    if len(wind_pungs) == 4:
        hit(75)

    if standardish and dec.pair is not None:
        if all(_piece_has_five(p) for p in dec.pieces) and is_suited(dec.pair) and rank_of(dec.pair) == 5:
            hit(52)

    if form is Form.SEVEN_PAIRS:
        hit(55)
        pk = sorted(set(dec.pair_kinds))
        if (len(pk) == 7 and all(is_suited(k) for k in pk)
                and len({suit_of(k) for k in pk}) == 1
                and all(pk[i + 1] == pk[i] + 1 for i in range(6))):
            hit(79)

    if form is Form.STANDARD and len(r.pung_pieces) == 4 and dec.pair is not None:
        even_pungs = all(is_suited(p.base) and rank_of(p.base) % 2 == 0 for _, p in r.pung_pieces)
        if even_pungs and is_suited(dec.pair) and rank_of(dec.pair) % 2 == 0:
            hit(57)

    # one-suit shifted or repeated pungs
    same_suit_pung_ranks: dict[int, list[int]] = {}
    for rank, suit in suited_pungs:
        same_suit_pung_ranks.setdefault(suit, []).append(rank)
    for ranks_list in same_suit_pung_ranks.values():
        rs = sorted(ranks_list)
        if len(rs) >= 4 and all(rs[i + 1] == rs[i] + 1 for i in range(3)):
            hit(68)
            break
    else:
        for ranks_list in same_suit_pung_ranks.values():
            rs = sorted(ranks_list)
            for i in range(len(rs) - 2):
                if rs[i + 1] == rs[i] + 1 and rs[i + 2] == rs[i] + 2:
                    hit(60)
                    break

    if kinds and all(is_terminal_or_honor(k) for k in kinds) \
            and form in (Form.STANDARD, Form.SEVEN_PAIRS):
        hit(66)
    if kinds and all(is_suited(k) and is_terminal(k) for k in kinds):
        hit(69)
    if kinds and all(is_honor(k) for k in kinds):
        hit(71)
    if len(dragon_pungs) == 2 and pair_is_dragon:
        hit(72)
    if len(dragon_pungs) == 3:
        hit(76)

    if (r.meld_slots == 0 and len(suits) == 1 and not honors
            and form is Form.STANDARD):
        base = min(kinds) - (rank_of(min(kinds)) - 1)
        gates = [0] * NUM_KINDS
        gates[base] = gates[base + 8] = 3
        for off in range(1, 8):
            gates[base + off] = 1
        if list(r.pre_concealed) == gates:
            hit(77)

    if all(k in GREEN_KINDS for k in kinds):
        hit(80)

    if form is Form.THIRTEEN_ORPHANS:
        hit(81)

    return fans


def _pair_fan_candidates(r: _Reading) -> dict[int, list[frozenset[int]]]:
    cands: dict[int, list[frozenset[int]]] = {fid: [] for fid in _PAIR_FAN_IDS}
    for (i, si, ri), (j, sj, rj) in itertools.combinations(r.chows, 2):
        members = frozenset((i, j))
        if si == sj:
            if ri == rj:
                cands[1].append(members)
            elif abs(ri - rj) == 3:
                cands[3].append(members)
            elif {ri, rj} == {1, 7}:
                cands[4].append(members)
        elif ri == rj:
            cands[2].append(members)
    return cands


@lru_cache(maxsize=8)
def _closed_excludes(table: FanTable) -> dict[int, frozenset[int]]:
    closed: dict[int, frozenset[int]] = {}

    def close(fid: int, seen: tuple[int, ...]) -> frozenset[int]:
        if fid in closed:
            return closed[fid]
        if fid in seen:
            raise ValueError("exclusion cycle in fan table")
        acc: set[int] = set()
        for other in table.get(fid).excludes:
            acc.add(other)
            acc |= close(other, seen + (fid,))
        closed[fid] = frozenset(acc)
        return closed[fid]

    for pattern in table:
        close(pattern.pattern_id, ())
    return closed


def _score_reading(r: _Reading, table: FanTable) -> list[FanAward]:
    simple = _detect_simple(r)
    composite = _composite_chow_instances(r)
    comp_best: dict[int, tuple[int, list[tuple[frozenset[int], ...]]]] = {
        fid: _max_disjoint(insts) for fid, insts in composite.items()
    }
    for fid, (mult, _) in comp_best.items():
        if mult:
            simple[fid] = mult

    closed = _closed_excludes(table)
    order = sorted(simple, key=lambda fid: (-table.points(fid), fid))
    suppressed: set[int] = set()
    kept: list[int] = []
    for fid in order:
        if fid in suppressed:
            continue
        kept.append(fid)
        suppressed |= closed[fid]

    awards = [FanAward(fid, table.points(fid), simple[fid]) for fid in kept]

    # two-chow patterns, maximized over the kept composites' member choices
    pair_cands = _pair_fan_candidates(r)
    kept_comp = [fid for fid in kept if fid in _COMPOSITE_CHOW_IDS and fid in comp_best]
    selection_space = [comp_best[fid][1] for fid in kept_comp] or [[()]]
    best_pairs: list[FanAward] | None = None
    best_value = -1
    for combo in itertools.product(*selection_space):
        forbidden: list[frozenset[int]] = [inst for sel in combo for inst in sel]
        combo_awards: list[FanAward] = []
        value = 0
        for fid in _PAIR_FAN_IDS:
            if fid in suppressed:
                continue
            usable = [
                inst for inst in pair_cands[fid]
                if not any(inst <= group for group in forbidden)
            ]
            mult, _ = _max_disjoint(usable)
            if mult:
                combo_awards.append(FanAward(fid, table.points(fid), mult))
                value += table.points(fid) * mult
        if value > best_value:
            best_value = value
            best_pairs = combo_awards
    awards.extend(best_pairs or [])

    awards.sort(key=lambda a: (-a.points, a.pattern_id))
    return awards


def _dec_populations(dec: Decomposition) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """Reconstruct (all tiles, pre-win concealed shares a win copy, meld slots)
    from a decomposition alone."""
    counts = [0] * NUM_KINDS
    concealed = [0] * NUM_KINDS
    meld_slots = 0
    for p in dec.pieces:
        copies = 4 if p.is_kong else 3
        in_meld = p.melded or p.concealed_kong
        if in_meld:
            meld_slots += 1
        for k in piece_kinds(p):
            n = copies if p.is_pung_like else 1
            counts[k] += n
            if not in_meld:
                concealed[k] += n
    if dec.form is Form.SEVEN_PAIRS:
        for k in dec.pair_kinds:
            counts[k] += 2
            concealed[k] += 2
    elif dec.form is Form.THIRTEEN_ORPHANS:
        from ..tiles import ORPHAN_KINDS

        for k in ORPHAN_KINDS:
            counts[k] += 1
            concealed[k] += 1
        counts[dec.pair] += 1
        concealed[dec.pair] += 1
    elif dec.form is Form.HONORS_KNITTED:
        for k in dec.loose_kinds:
            counts[k] += 1
            concealed[k] += 1
    elif dec.pair is not None:
        counts[dec.pair] += 2
        concealed[dec.pair] += 2
    return tuple(counts), tuple(concealed), meld_slots


def _readings(dec: Decomposition, ctx: WinContext, win_kind: int, config: ScoringConfig):
    counts_all, concealed, meld_slots = _dec_populations(dec)
    if counts_all[win_kind] == 0:
        raise ValueError("winning tile absent from decomposition")
    pre = list(concealed)
    pre[win_kind] -= 1
    if pre[win_kind] < 0:
        raise ValueError("winning tile not among concealed tiles")
    waits = wait_kinds(pre, meld_slots, allow_duplicate_pairs=config.seven_pairs_duplicates)
    unique = len(waits) == 1
    pre_t = tuple(pre)
    for place in _placements(dec, win_kind):
        yield _Reading(dec, ctx, win_kind, place, counts_all, pre_t,
                       meld_slots, unique, config)


def _win_kind_of(context: WinContext, winning_tile: Tile | None) -> int:
    t = winning_tile or context.winning_tile
    if t is None:
        raise ValueError("no winning tile given")
    return t.kind.index


def enumerate_fans(
    decomposition: Decomposition,
    context: WinContext,
    *,
    winning_tile: Tile | None = None,
    table: FanTable | None = None,
    config: ScoringConfig = DEFAULT_CONFIG,
) -> FanResult:
    """Score one decomposition (maximized over winning-tile placements)."""
    table = table or default_fan_table()
    win_kind = _win_kind_of(context, winning_tile)
    best: tuple[FanAward, ...] = ()
    best_total = -1
    for r in _readings(decomposition, context, win_kind, config):
        awards = _score_reading(r, table)
        total = sum(a.total for a in awards)
        if total > best_total:
            best, best_total = tuple(awards), total
    if best_total < 0:
        raise ValueError("winning tile cannot be placed in this decomposition")
    return FanResult(best, best_total, table.threshold, win_kind, decomposition)


def best_fan(
    hand: Hand,
    winning_tile: Tile,
    context: WinContext,
    *,
    table: FanTable | None = None,
    config: ScoringConfig = DEFAULT_CONFIG,
) -> FanResult:
    """Score a hand: the reading with the highest total wins."""
    table = table or default_fan_table()
    decs = decompose(hand, winning_tile, config)
    win_kind = winning_tile.kind.index
    if not decs:
        return FanResult((), 0, table.threshold, win_kind, None)

    best_awards: tuple[FanAward, ...] = ()
    best_total = -1
    best_dec: Decomposition | None = None
    for dec in decs:
        for r in _readings(dec, context, win_kind, config):
            awards = _score_reading(r, table)
            total = sum(a.total for a in awards)
            if total > best_total:
                best_awards = tuple(awards)
                best_total = total
                best_dec = r.dec

    if best_total == 0 and best_dec is not None:
        chicken = FanAward(CHICKEN_HAND_ID, table.points(CHICKEN_HAND_ID), 1)
        return FanResult((chicken,), chicken.total, table.threshold, win_kind, best_dec)
    return FanResult(best_awards, best_total, table.threshold, win_kind, best_dec)
