"""Winning-shape tests and structural distance (deficiency) for hands.

The core quantity is *coverage*: for a candidate winning configuration W
(four sets plus a pair, seven pairs, thirteen orphans, a knitted straight, or
honors-and-knitted singles), coverage is the number of hand tiles that already
sit inside W.  The deficiency of a hand is

    (14 - 3 * melds) - max coverage over all W compatible with the melds

which equals the minimum number of tile replacements needed to reach a
winning shape: 0 exactly when the hand is complete, and at least 1 for any
13-tile hand (the missing fourteenth tile counts as one step).

Suit coverage tables are memoised per 9-kind count vector, so the hot paths
(engine win checks, greedy discard search) mostly reduce to cache lookups.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations

from ..tiles import KNITTED_ROWS, ORPHAN_KINDS

SET_SLOTS = 4

_SUIT_SPANS = ((0, 9), (9, 18), (18, 27))
_PERMS3 = tuple(permutations(range(3)))


@lru_cache(maxsize=None)
def suit_table(counts: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    """Max matched tiles in one suit for each (set slots used, pair used).

    A slot may be only partially filled by the hand; partial fills still count
    every matched tile.  Target usage per kind is capped at four copies.

    Forward DP over kinds; a state is (chows entering from i-2, from i-1,
    set slots used, pair used) and carries the best coverage reaching it.
    """
    n = len(counts)
    states: dict[tuple[int, int, int, int], int] = {(0, 0, 0, 0): 0}
    for i in range(n):
        c = counts[i]
        can_start = i + 2 < n and (c or counts[i + 1] or counts[i + 2])
        nxt: dict[tuple[int, int, int, int], int] = {}
        for (prev2, prev1, sets_used, pair_used), cov in states.items():
            start_cap = min(SET_SLOTS - sets_used, 4 - prev2 - prev1) if can_start else 0
            for s_i in range(start_cap + 1):
                through = prev2 + prev1 + s_i
                sets_now = sets_used + s_i
                for pung in (0, 1) if (c and sets_now < SET_SLOTS and through + 3 <= 4) else (0,):
                    for pair in (0, 1) if (c and not pair_used and through + 3 * pung + 2 <= 4) else (0,):
                        key = (prev1, s_i, sets_now + pung, pair_used + pair)
                        val = cov + min(c, through + 3 * pung + 2 * pair)
                        if nxt.get(key, -1) < val:
                            nxt[key] = val
        states = nxt

    res = [[-1, -1] for _ in range(SET_SLOTS + 1)]
    for (_, _, sets_used, pair_used), cov in states.items():
        if cov > res[sets_used][pair_used]:
            res[sets_used][pair_used] = cov
    for s in range(1, SET_SLOTS + 1):
        for p in (0, 1):
            if res[s - 1][p] > res[s][p]:
                res[s][p] = res[s - 1][p]
    for s in range(SET_SLOTS + 1):
        if res[s][0] > res[s][1]:
            res[s][1] = res[s][0]
    return tuple((row[0], row[1]) for row in res)


@lru_cache(maxsize=None)
def honor_table(counts: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    """Same contract as suit_table for the seven honor kinds (no chows)."""
    res = [[-1, -1] for _ in range(SET_SLOTS + 1)]
    res[0][0] = 0
    kinds = range(len(counts))
    occupied = [k for k in kinds if counts[k]]
    for m in range(0, SET_SLOTS + 1):
        for pungs in combinations(occupied, min(m, len(occupied))) if m <= len(occupied) else ():
            base = sum(min(counts[k], 3) for k in pungs)
            if base > res[m][0]:
                res[m][0] = base
            for pk in occupied:
                if pk in pungs:
                    continue
                v = base + min(counts[pk], 2)
                if v > res[m][1]:
                    res[m][1] = v
    for s in range(1, SET_SLOTS + 1):
        for p in (0, 1):
            if res[s - 1][p] > res[s][p]:
                res[s][p] = res[s - 1][p]
    for s in range(SET_SLOTS + 1):
        if res[s][0] > res[s][1]:
            res[s][1] = res[s][0]
    return tuple((row[0], row[1]) for row in res)


def _group_tables(counts: tuple[int, ...]):
    return (
        suit_table(counts[0:9]),
        suit_table(counts[9:18]),
        suit_table(counts[18:27]),
        honor_table(counts[27:34]),
    )


@lru_cache(maxsize=1 << 18)
def max_coverage(counts: tuple[int, ...], sets_needed: int) -> int:
    """Best coverage for a target of ``sets_needed`` sets plus one pair."""
    t0, t1, t2, t3 = _group_tables(counts)
    best = 0
    for a in range(sets_needed + 1):
        r0 = t0[a]
        for b in range(sets_needed - a + 1):
            r1 = t1[b]
            ab = r0[0] + r1[0]
            for c in range(sets_needed - a - b + 1):
                d = sets_needed - a - b - c
                r2, r3 = t2[c], t3[d]
                base = ab + r2[0] + r3[0]
                v = max(
                    r0[1] + r1[0] + r2[0] + r3[0],
                    r0[0] + r1[1] + r2[0] + r3[0],
                    ab + r2[1] + r3[0],
                    ab + r2[0] + r3[1],
                )
                if v > best:
                    best = v
                if base > best:  # pair slot left empty never wins, kept for safety
                    best = base
    return best


def seven_pairs_coverage(counts: tuple[int, ...], *, allow_duplicate_pairs: bool = True) -> int:
    gains: list[int] = []
    for c in counts:
        first = min(c, 2)
        if first:
            gains.append(first)
            if allow_duplicate_pairs and c > 2:
                gains.append(c - 2)
    gains.sort(reverse=True)
    return sum(gains[:7])


def orphans_coverage(counts: tuple[int, ...]) -> int:
    cov = 0
    has_double = 0
    for k in ORPHAN_KINDS:
        c = counts[k]
        if c:
            cov += 1
            if c >= 2:
                has_double = 1
    return cov + has_double


def knitted_kind_sets() -> tuple[tuple[int, ...], ...]:
    """The six possible knitted-straight kind sets (suit permutation applied)."""
    out = []
    for perm in _PERMS3:
        kinds = []
        for row, suit in enumerate(perm):
            kinds.extend(9 * suit + r for r in KNITTED_ROWS[row])
        out.append(tuple(sorted(kinds)))
    return tuple(out)


_KNIT_SETS = knitted_kind_sets()


def knitted_coverage(counts: tuple[int, ...], melds: int, floor: int = -1) -> int:
    """Best coverage for the knitted-straight family (at most one meld).

    ``floor`` is a coverage already achieved elsewhere; knit layouts whose
    upper bound (matched singles plus a full remaining set and pair) cannot
    beat it are skipped without recursing.
    """
    if melds > 1:
        return -1
    rest_cap = 5 if melds == 0 else 2
    best = -1
    for kinds in _KNIT_SETS:
        matched = 0
        for k in kinds:
            if counts[k]:
                matched += 1
        if matched <= 3 or matched + rest_cap <= max(best, floor):
            continue
        reduced = list(counts)
        for k in kinds:
            if reduced[k]:
                reduced[k] -= 1
        cov = matched + max_coverage(tuple(reduced), 1 - melds)
        if cov > best:
            best = cov
    return best


def honors_knitted_coverage(counts: tuple[int, ...]) -> int:
    best = 0
    honors_present = sum(1 for k in range(27, 34) if counts[k])
    for kinds in _KNIT_SETS:
        present = sum(1 for k in kinds if counts[k]) + honors_present
        if present > best:
            best = present
    return min(best, 14)


@lru_cache(maxsize=1 << 18)
def _deficiency_cached(counts: tuple[int, ...], melds: int, allow_dup: bool) -> int:
    target = 14 - 3 * melds
    cov = max_coverage(counts, SET_SLOTS - melds)
    if melds == 0:
        for other in (
            seven_pairs_coverage(counts, allow_duplicate_pairs=allow_dup),
            orphans_coverage(counts),
            honors_knitted_coverage(counts),
        ):
            if other > cov:
                cov = other
    if melds <= 1 and cov < target:
        kc = knitted_coverage(counts, melds, floor=cov)
        if kc > cov:
            cov = kc
    return target - cov


def deficiency(counts, melds: int = 0, *, allow_duplicate_pairs: bool = True) -> int:
    """Minimum tile replacements from this hand to a winning shape.

    ``counts`` holds concealed tiles only (34 kinds); ``melds`` is the number
    of declared sets.  13-tile-equivalent hands always return at least 1.
    """
    total = sum(counts) + 3 * melds
    if total not in (13, 14):
        raise ValueError(f"hand is {total}-tile equivalent, expected 13 or 14")
    return _deficiency_cached(tuple(counts), melds, allow_duplicate_pairs)


def is_winning_shape(counts, melds: int = 0, *, allow_duplicate_pairs: bool = True) -> bool:
    total = sum(counts) + 3 * melds
    if total != 14:
        return False
    return _deficiency_cached(tuple(counts), melds, allow_duplicate_pairs) == 0


def wait_kinds(counts, melds: int = 0, *, allow_duplicate_pairs: bool = True) -> tuple[int, ...]:
    """All kinds that complete a 13-tile-equivalent hand into a winning shape."""
    total = sum(counts) + 3 * melds
    if total != 13:
        raise ValueError(f"hand is {total}-tile equivalent, expected 13")
    base = list(counts)
    waits = []
    for k in range(34):
        if base[k] >= 4:
            continue
        base[k] += 1
        if _deficiency_cached(tuple(base), melds, allow_duplicate_pairs) == 0:
            waits.append(k)
        base[k] -= 1
    return tuple(waits)
