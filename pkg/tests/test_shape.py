import random

import pytest

from mahjong_lab.scoring import deficiency, is_winning_shape, wait_kinds
from mahjong_lab.tiles import parse_hand_codes

from oracles import bfs_deficiency, exchange_deficiency, win_exact


def counts_of(text):
    counts = [0] * 34
    for t in parse_hand_codes(text):
        counts[t.kind.index] += 1
    return counts


def test_winning_shape_is_zero():
    w = counts_of("W1 W1 W1 W2 W3 W4 W5 W6 W7 W9 W9 W9 W8 W8")
    assert deficiency(w) == 0
    assert is_winning_shape(w)


def test_six_pairs_plus_singleton_is_one():
    hand = counts_of("W1 W1 W4 W4 B2 B2 B8 B8 T3 T3 T6 T6 F1")
    assert bfs_deficiency(hand, cap=2) == 1
    assert exchange_deficiency(hand) == 1
    assert deficiency(hand) == 1


def test_isolated_honorless_hand_matches_oracle():
    hand = counts_of("W1 W4 W7 B2 B5 B8 T3 T6 T9 W9 B1 T1 T4")
    assert deficiency(hand) == exchange_deficiency(hand)


def test_thirteen_tile_hands_are_at_least_one():
    hand = counts_of("W1 W1 W1 W2 W3 W4 W5 W6 W7 W9 W9 W9 W8")
    assert deficiency(hand) == 1
    assert wait_kinds(hand) == tuple(range(9))  # the classic nine-sided wait

    pair_wait = counts_of("W1 W2 W3 B4 B5 B6 T7 T8 T9 W7 W8 W9 J2")
    assert deficiency(pair_wait) == 1
    assert wait_kinds(pair_wait) == (32,)  # J2 completes the pair


def test_melded_hand_deficiency():
    # two declared sets leave an 8-tile concealed part (13-tile equivalent + draw)
    concealed = counts_of("W2 W3 W4 B5 B5 T1 T2")
    assert deficiency(concealed, melds=2) == 1
    concealed[18] += 1  # T1 pairs up; still needs the chow finished
    assert deficiency(concealed, melds=2) == 1


def test_deficiency_rejects_bad_sizes():
    with pytest.raises(ValueError):
        deficiency(counts_of("W1 W2"))


def test_strict_pairs_flag():
    dup = counts_of("W5 W5 W5 W5 B2 B2 B7 B7 T4 T4 T9 T9 J1 J1")
    assert is_winning_shape(dup)
    assert not is_winning_shape(dup, allow_duplicate_pairs=False)
    assert win_exact(dup)
    assert not win_exact(dup, allow_duplicate_pairs=False)


def test_random_mutations_match_exchange_oracle():
    rng = random.Random(4177)
    base = counts_of("W1 W1 W1 W2 W3 W4 W5 W6 W7 W9 W9 W9 W8 W8")
    for trial in range(20):
        hand = list(base)
        for _ in range(rng.randint(1, 2)):
            stocked = [k for k in range(34) if hand[k] > 0]
            spare = [k for k in range(34) if hand[k] < 4]
            hand[rng.choice(stocked)] -= 1
            hand[rng.choice(spare)] += 1
        want = exchange_deficiency(hand)
        assert deficiency(hand) == want
        assert want <= 2
        if want <= 1:
            assert bfs_deficiency(hand, cap=1) == want


def test_two_swap_hand_hits_bfs_depth_two():
    hand = counts_of("W1 W1 W1 W2 W3 W4 W5 W6 W7 W9 W8 W8 B1 T5")
    assert bfs_deficiency(hand, cap=2) == 2
    assert exchange_deficiency(hand) == 2
    assert deficiency(hand) == 2


def test_random_hands_match_exchange_oracle():
    rng = random.Random(90125)
    pool = [k for k in range(34) for _ in range(4)]
    for trial in range(12):
        rng.shuffle(pool)
        hand = [0] * 34
        for k in pool[:14]:
            hand[k] += 1
        assert deficiency(hand) == exchange_deficiency(hand)


def test_waits_match_win_oracle():
    rng = random.Random(515)
    pool = [k for k in range(34) for _ in range(4)]
    for trial in range(200):
        rng.shuffle(pool)
        hand = [0] * 34
        for k in pool[:13]:
            hand[k] += 1
        waits = set(wait_kinds(hand))
        for k in range(34):
            if hand[k] >= 4:
                continue
            hand[k] += 1
            assert (k in waits) == win_exact(hand)
            hand[k] -= 1
