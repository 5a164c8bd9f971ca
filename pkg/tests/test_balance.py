"""Balance analysis: frequencies, point adaptation, compensation, hand counts."""

import math
from types import SimpleNamespace

import pytest

from mahjong_lab.agents import GreedyDeficiencyAgent
from mahjong_lab.balance import (
    CompensationVector,
    EnumerationFlags,
    FrequencyTable,
    PatternCount,
    UnsupportedPatternError,
    _full_flush_suit_count,
    _pure_triple_chow_suit_vectors,
    adapt_points,
    adaptation_report,
    count_frequencies,
    default_exempt_ids,
    derive_compensation,
    enumerate_pattern_counts,
    enumeration_report,
    frequency_csv,
    top_k,
)
from mahjong_lab.rules import get_ruleset
from mahjong_lab.scoring import default_fan_table, load_revised_points
from mahjong_lab.simulator import SeatStats, run_selfplay

TABLE = default_fan_table()

# Ranking fixture: the 43 patterns the revised point values treat as common,
# plus Melded Kong directly below the cut so the cut content is unambiguous.
COMMON_43 = [
    "Pure Double Chow", "Mixed Double Chow", "Short Straight", "Two Terminal Chows",
    "Pung of Terminals or Honours", "One Voided Suit", "No Honours", "Edge Wait",
    "Closed Wait", "Single Wait", "Self-Drawn",
    "Dragon Pung", "Prevalent Wind", "Seat Wind", "Concealed Hand", "All Chows",
    "Tile Hog", "Mixed Double Pung", "Two Concealed Pungs", "Concealed Kong",
    "All Simples",
    "Outside Hand", "Fully Concealed Hand", "Last Tile",
    "All Pungs", "Half Flush", "Mixed Shifted Chows", "All Types", "Melded Hand",
    "Two Dragon Pungs",
    "Mixed Straight", "Mixed Triple Chow", "Chicken Hand", "Rob Kong",
    "Lesser Honours and Knitted Tiles", "Knitted Straight", "Upper Four", "Lower Four",
    "Pure Straight", "Pure Shifted Chows",
    "Seven Pairs", "Greater Honours and Knitted Tiles", "Full Flush",
]
JUST_BELOW_CUT = "Melded Kong"


def membership_fixture() -> FrequencyTable:
    counts = {pid: 0 for pid in range(1, 82)}
    for i, name in enumerate(COMMON_43):
        counts[TABLE.id_of(name)] = 100_000 - 1_000 * i
    counts[TABLE.id_of(JUST_BELOW_CUT)] = 50_000
    rest = sorted(pid for pid, n in counts.items() if n == 0)
    for j, pid in enumerate(rest):
        counts[pid] = 40 - j
    return FrequencyTable(counts, matches=100_000)


def record_payload(match_id, fan_ids, winner=0):
    return {
        "match_id": match_id,
        "result": {
            "winner": winner,
            "fan_list": [{"pattern_id": pid, "points": TABLE.points(pid)} for pid in fan_ids],
        },
    }


def test_frequency_table_validates():
    with pytest.raises(ValueError, match="unknown pattern id"):
        FrequencyTable({0: 1})
    with pytest.raises(ValueError, match="unknown pattern id"):
        FrequencyTable({82: 1})
    with pytest.raises(ValueError, match="negative count"):
        FrequencyTable({1: -1})
    with pytest.raises(ValueError, match="non-negative"):
        FrequencyTable({}, matches=-1)


def test_count_frequencies_empty_stream():
    freq = count_frequencies([])
    assert freq.matches == 0
    assert all(freq.count(pid) == 0 for pid in range(1, 82))


def test_count_frequencies_single_record():
    fans = [TABLE.id_of("Seven Pairs"), TABLE.id_of("Concealed Hand")]
    freq = count_frequencies([record_payload("m-1", fans)])
    assert freq.matches == 1
    assert freq.count(TABLE.id_of("Seven Pairs")) == 1
    assert freq.count(TABLE.id_of("Concealed Hand")) == 1
    assert sum(freq.counts.values()) == 2


def test_count_frequencies_multiplicity_flag():
    pdc = TABLE.id_of("Pure Double Chow")
    records = [record_payload("m-1", [pdc, pdc, TABLE.id_of("All Chows")])]
    assert count_frequencies(records).count(pdc) == 1
    assert count_frequencies(records, count_multiplicity=True).count(pdc) == 2


def test_count_frequencies_skips_non_winning():
    draw = {"match_id": "d-1", "result": {"winner": None, "fan_list": []}}
    freq = count_frequencies([draw, record_payload("m-2", [1])])
    assert freq.matches == 2
    assert sum(freq.counts.values()) == 1


def test_count_frequencies_unknown_id_names_record():
    bad = {"match_id": "bad-7", "result": {"winner": 2, "fan_list": [{"pattern_id": 99}]}}
    with pytest.raises(ValueError, match="bad-7"):
        count_frequencies([bad])


def test_count_frequencies_folds_over_real_records():
    result = run_selfplay(GreedyDeficiencyAgent(seed=5), 24, seed=2024, keep_records=True)
    records = list(result.records)
    whole = count_frequencies(records)
    halves = count_frequencies(records[:12]).merge(count_frequencies(records[12:]))
    assert whole.counts == halves.counts
    assert whole.matches == halves.matches == 24
    wins = sum(1 for r in records if r.winner is not None)
    assert wins > 0
    assert max(whole.counts.values()) <= wins


def test_top_k_full_permutation():
    freq = membership_fixture()
    assert sorted(top_k(freq, 81)) == list(range(1, 82))
    assert top_k(freq, 0) == ()


def test_top_k_tie_breaks_by_lower_id():
    freq = FrequencyTable({10: 5, 3: 5, 7: 9})
    assert top_k(freq, 3) == (7, 3, 10)


def test_top_k_bounds():
    freq = FrequencyTable({})
    with pytest.raises(ValueError):
        top_k(freq, -1)
    with pytest.raises(ValueError):
        top_k(freq, 82)


def test_top_k_membership_fixture():
    freq = membership_fixture()
    expected = {TABLE.id_of(name) for name in COMMON_43}
    assert set(top_k(freq, 43)) == expected
    assert TABLE.id_of(JUST_BELOW_CUT) not in top_k(freq, 43)
    assert top_k(freq, 44)[-1] == TABLE.id_of(JUST_BELOW_CUT)


def test_adapt_points_reproduces_revised_table():
    result = adapt_points(membership_fixture())
    expected = load_revised_points()
    assert {pid: new for pid, _, new in result.changed} == expected
    assert len(result.changed) == 11
    for pid, old, new in result.changed:
        assert old == TABLE.points(pid)
        # every move is exactly one rung on the ladder
        assert abs(TABLE.levels.index(new) - TABLE.levels.index(old)) == 1
    assert result.new_points == get_ruleset("revised").fan_table.point_vector()
    adapted = result.apply(TABLE)
    assert adapted.point_vector() == get_ruleset("revised").fan_table.point_vector()


def test_adapt_points_examples():
    result = adapt_points(membership_fixture())
    assert result.new_points[TABLE.id_of("Seven Pairs")] == 16
    assert result.new_points[TABLE.id_of("Reversible Tiles")] == 12
    assert result.new_points[TABLE.id_of("Last Tile Draw")] == 8
    assert result.new_points[TABLE.id_of("Pure Double Chow")] == 1


def test_adapt_points_luck_exemption_is_configurable():
    freq = membership_fixture()
    assert default_exempt_ids(TABLE) == frozenset(
        TABLE.id_of(n) for n in
        ("Last Tile Draw", "Out with Replacement Tile", "Rob Kong", "Last Tile Claim"))
    none_exempt = adapt_points(freq, exempt_ids=frozenset())
    # the three non-member luck bonuses at the threshold now rise as well
    assert len(none_exempt.changed) == 14
    for name in ("Last Tile Draw", "Out with Replacement Tile", "Last Tile Claim"):
        assert none_exempt.new_points[TABLE.id_of(name)] == 12
    assert none_exempt.new_points[TABLE.id_of("Rob Kong")] == 8  # member: never rises
    wider = adapt_points(freq, exempt_ids=default_exempt_ids(TABLE) | {TABLE.id_of("Reversible Tiles")})
    assert len(wider.changed) == 10
    assert wider.new_points[TABLE.id_of("Reversible Tiles")] == 8


def test_adapt_points_missing_structural_errors():
    with pytest.raises(ValueError, match="missing structural"):
        adapt_points(FrequencyTable({1: 5}, matches=5))


def test_derive_compensation_reference_averages():
    vec = derive_compensation([1.0, 0.4, -0.3, -1.1])
    assert vec.per_seat == (-1.0, -0.4, 0.3, 1.1)
    assert vec.units == (-10, -4, 3, 11)
    assert vec.resolution == 0.1


def test_derive_compensation_zero_averages():
    assert derive_compensation([0.0, 0.0, 0.0, 0.0]).per_seat == (0.0, 0.0, 0.0, 0.0)


def test_derive_compensation_rounding_repair():
    # negated tenths are (-2.6, 2.6, 0, 0); floors (-3, 2, 0, 0) leave a
    # deficit of one unit, handed to the largest residue (0.6 at seat 1)
    vec = derive_compensation([0.26, -0.26, 0.0, 0.0])
    assert vec.per_seat == (-0.3, 0.3, 0.0, 0.0)


def test_derive_compensation_accepts_seat_stats():
    stats = SeatStats.from_counts((5, 5, 5, 5), (2, 1, 1, 1), (5.0, 2.0, -1.5, -5.5))
    vec = derive_compensation(stats)
    assert vec.per_seat == (-1.0, -0.4, 0.3, 1.1)
    empty = SimpleNamespace(avg_score=(0.0,) * 4, matches=(0, 0, 0, 0))
    with pytest.raises(ValueError, match="at least one"):
        derive_compensation(empty)


def test_derive_compensation_zero_sum_property():
    import random
    rng = random.Random(4100)
    for trial in range(500):
        if trial % 2:
            avgs = [rng.uniform(-30, 30) for _ in range(4)]  # need not sum to zero
        else:
            three = [rng.uniform(-30, 30) for _ in range(3)]
            avgs = three + [-sum(three)]
        vec = derive_compensation(avgs)
        assert sum(vec.units) == 0
        assert vec.per_seat == tuple(u / 10 for u in vec.units)
        if trial % 2 == 0:
            for unit, avg in zip(vec.units, avgs):
                assert abs(unit - (-avg * 10)) < 1.0 + 1e-9


def test_derive_compensation_resolutions():
    vec = derive_compensation([0.3, -0.3, 0.0, 0.0], resolution=0.25)
    assert vec.per_seat == (-0.25, 0.25, 0.0, 0.0)
    for bad in (0.0, -0.1, 0.3):
        with pytest.raises(ValueError):
            derive_compensation([0.0] * 4, resolution=bad)


def test_compensation_vector_validates():
    with pytest.raises(ValueError, match="sum to zero"):
        CompensationVector((1, 0, 0, 0))
    with pytest.raises(ValueError, match="four seats"):
        CompensationVector((1, -1, 0))
    payload = CompensationVector((-10, -4, 3, 11)).to_payload()
    assert payload == {"per_seat": [-1.0, -0.4, 0.3, 1.1], "resolution": 0.1}


def test_enumerate_seven_pairs_closed_form():
    [pc] = enumerate_pattern_counts([TABLE.id_of("Seven Pairs")])
    assert pc.exact_count == math.comb(34, 7) * math.comb(4, 2) ** 7 == 1_505_948_184_576
    assert pc.magnitude == 12


def test_enumerate_thirteen_orphans_closed_form():
    [pc] = enumerate_pattern_counts([TABLE.id_of("Thirteen Orphans")])
    assert pc.exact_count == 13 * 6 * 4 ** 12 == 1_308_622_848
    assert pc.magnitude == 9


def test_enumerate_count_ordering():
    ids = [TABLE.id_of(n) for n in ("Seven Pairs", "Full Flush", "Pure Triple Chow")]
    sp, ff, ptc = enumerate_pattern_counts(ids)
    assert sp.exact_count > ff.exact_count > ptc.exact_count
    # regression values; the acceptance suite re-derives the full flush count
    # from the engine's winning-shape test over every one-suit vector
    assert ff.exact_count == 1_336_897_596
    assert ptc.exact_count == 278_575_458
    assert (sp.magnitude, ff.magnitude, ptc.magnitude) == (12, 9, 8)


def test_enumerate_luck_patterns_unsupported():
    for name in ("Rob Kong", "Self-Drawn", "Last Tile Claim"):
        with pytest.raises(UnsupportedPatternError, match="arrived"):
            enumerate_pattern_counts([TABLE.id_of(name)])


def test_enumerate_unregistered_pattern_unsupported():
    with pytest.raises(UnsupportedPatternError, match="no hand enumerator"):
        enumerate_pattern_counts([TABLE.id_of("All Chows")])
    with pytest.raises(UnsupportedPatternError, match="unknown pattern"):
        enumerate_pattern_counts([99])


def test_enumerate_kong_flag_rejected():
    with pytest.raises(ValueError, match="14 tiles"):
        enumerate_pattern_counts([TABLE.id_of("Seven Pairs")],
                                 EnumerationFlags(include_kongs=True))


def test_enumerate_orphans_without_honors_is_empty():
    flags = EnumerationFlags(include_honors=False)
    [pc] = enumerate_pattern_counts([TABLE.id_of("Thirteen Orphans")], flags)
    assert pc.exact_count == 0
    assert pc.magnitude is None


def test_enumerate_seven_pairs_flag_variants():
    flags = EnumerationFlags(include_honors=False)
    [banned] = enumerate_pattern_counts([TABLE.id_of("Seven Pairs")], flags)
    assert banned.exact_count == math.comb(27, 7) * 6 ** 7
    [lenient] = enumerate_pattern_counts(
        [TABLE.id_of("Seven Pairs")], EnumerationFlags(allow_duplicate_pairs=True))
    # stacked pairs: a kinds hold four copies, the rest distinct pairs
    oracle = sum(
        math.comb(34, a) * math.comb(34 - a, 7 - 2 * a) * 6 ** (7 - 2 * a)
        for a in range(4))
    assert lenient.exact_count == oracle
    assert lenient.exact_count > 1_505_948_184_576


def test_enumerate_preserves_input_order():
    ids = [TABLE.id_of("Thirteen Orphans"), TABLE.id_of("Seven Pairs")]
    counts = enumerate_pattern_counts(ids)
    assert [pc.pattern_id for pc in counts] == ids


def test_enumeration_suit_symmetry():
    flags = EnumerationFlags()
    ff = [_full_flush_suit_count(s, flags) for s in range(3)]
    assert ff[0] == ff[1] == ff[2]
    suit_vectors = [_pure_triple_chow_suit_vectors(s, flags) for s in range(3)]
    totals = [sum(v.values()) for v in suit_vectors]
    assert totals[0] == totals[1] == totals[2]
    # a 14-tile hand fits three identical chows in at most one suit
    assert not (set(suit_vectors[0]) & set(suit_vectors[1]))
    assert not (set(suit_vectors[1]) & set(suit_vectors[2]))


def test_enumeration_honor_ban_monotonicity():
    default = enumerate_pattern_counts(
        [TABLE.id_of("Full Flush"), TABLE.id_of("Pure Triple Chow")])
    banned = enumerate_pattern_counts(
        [TABLE.id_of("Full Flush"), TABLE.id_of("Pure Triple Chow")],
        EnumerationFlags(include_honors=False))
    assert banned[0].exact_count == default[0].exact_count  # one-suit hands never use honors
    assert banned[1].exact_count < default[1].exact_count  # completions lose honor pungs/pairs


def test_pattern_count_magnitudes():
    assert PatternCount.from_count(1, 999).magnitude == 2
    assert PatternCount.from_count(1, 1000).magnitude == 3
    assert PatternCount.from_count(1, 1).magnitude == 0
    assert PatternCount.from_count(1, 0).magnitude is None
    with pytest.raises(ValueError):
        PatternCount.from_count(1, -3)


def test_frequency_csv_report():
    freq = membership_fixture()
    text = frequency_csv(freq)
    lines = text.strip().split("\n")
    assert lines[0] == "pattern_id,name,count,rank"
    assert len(lines) == 82
    first = lines[1].split(",")
    assert first[0] == str(TABLE.id_of("Pure Double Chow"))
    assert first[3] == "1"
    assert f"{TABLE.id_of('Melded Kong')},Melded Kong,50000,44" in text


def test_adaptation_report_shape():
    result = adapt_points(membership_fixture())
    text = adaptation_report(result)
    lines = text.strip().split("\n")
    assert lines[0].split() == ["pattern", "previous", "new"]
    assert len(lines) == 12
    assert any("Seven Pairs" in line and "24" in line and "16" in line for line in lines)


def test_enumeration_report_shape():
    counts = enumerate_pattern_counts([TABLE.id_of("Seven Pairs"), TABLE.id_of("Thirteen Orphans")])
    text = enumeration_report(counts)
    assert "Seven Pairs" in text
    assert "1,505,948,184,576" in text
    assert "10^12" in text
    assert "10^9" in text


def test_frequency_payload_round_trip():
    freq = membership_fixture()
    again = FrequencyTable.from_payload(freq.to_payload())
    assert again.counts == freq.counts
    assert again.matches == freq.matches
