"""Game-balance analysis over recorded matches.

Four tools built on the scoring catalogue:

* pattern frequency counting over match records, with a deterministic merge
  so large runs can be folded from disjoint shards;
* a frequency-driven point adaptation pass that walks common high-point
  patterns one rung down the point ladder and rare threshold-point patterns
  one rung up, leaving the luck bonuses pinned at the threshold;
* per-seat compensation derived from observed average scores (negate, round
  to a fixed resolution, repair the rounding to an exact zero sum);
* exact weighted counts of complete 14-tile hands for selected patterns,
  used to check point values against how rare a pattern really is.

Hand counting convention: the four copies of each kind are distinguishable,
so a hand using ``c`` copies of a kind contributes a factor of C(4, c); a
hand is exactly 14 tiles (kong hands are out of scope); a hand matches a
pattern when it is a winning shape that structurally contains the pattern.
Seven Pairs demands seven distinct kinds unless the duplicate-pairs flag is
set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Callable, Iterable, Mapping, Sequence

from .rules import SEATS
from .scoring import FanTable, default_fan_table
from .scoring.fan_table import PATTERN_COUNT
from .tiles import COPIES_PER_KIND, NUM_KINDS, ORPHAN_KINDS

SUITED_KINDS = 27
RANKS_PER_SUIT = 9
HAND_TILES = 14
PAIR_SLOTS = 7


# ---------------------------------------------------------------------------
# Pattern frequencies


@dataclass(frozen=True)
class FrequencyTable:
    """Occurrence counts per scoring pattern over a batch of matches."""

    counts: Mapping[int, int]
    matches: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", dict(self.counts))
        for pid, n in self.counts.items():
            if not 1 <= pid <= PATTERN_COUNT:
                raise ValueError(f"unknown pattern id {pid} in frequency table")
            if n < 0:
                raise ValueError(f"negative count for pattern {pid}")
        if self.matches < 0:
            raise ValueError("match count must be non-negative")

    def count(self, pattern_id: int) -> int:
        return self.counts.get(pattern_id, 0)

    def merge(self, other: "FrequencyTable") -> "FrequencyTable":
        """Combine two disjoint batches; merging is order-independent."""
        merged = dict(self.counts)
        for pid, n in other.counts.items():
            merged[pid] = merged.get(pid, 0) + n
        return FrequencyTable(merged, self.matches + other.matches)

    def to_payload(self) -> dict:
        return {
            "counts": {str(pid): n for pid, n in sorted(self.counts.items())},
            "matches": self.matches,
        }

    @classmethod
    def from_payload(cls, data: Mapping) -> "FrequencyTable":
        return cls({int(pid): int(n) for pid, n in data["counts"].items()},
                   int(data["matches"]))


def _record_fields(record) -> tuple[str, int | None, list]:
    if isinstance(record, Mapping):
        result = record.get("result") or {}
        return str(record.get("match_id", "?")), result.get("winner"), result.get("fan_list") or []
    result = record.result
    return record.match_id, result.get("winner"), result.get("fan_list") or []


def _fan_pattern_ids(fan_list: Iterable, match_id: str) -> list[int]:
    ids = []
    for entry in fan_list:
        pid = entry.get("pattern_id") if isinstance(entry, Mapping) else entry
        if not isinstance(pid, int) or not 1 <= pid <= PATTERN_COUNT:
            raise ValueError(f"record {match_id!r} lists unknown pattern id {pid!r}")
        ids.append(pid)
    return ids


def count_frequencies(records: Iterable, *, count_multiplicity: bool = False) -> FrequencyTable:
    """Fold match records into per-pattern occurrence counts.

    Each winning match contributes one count per pattern in its fan list;
    with ``count_multiplicity`` a pattern awarded several times in one match
    contributes once per award instead.  Drawn and forfeited matches add to
    the match total only.  Records may be ``MatchRecord`` objects or their
    JSON payloads.
    """
    counts = {pid: 0 for pid in range(1, PATTERN_COUNT + 1)}
    matches = 0
    for record in records:
        match_id, winner, fan_list = _record_fields(record)
        matches += 1
        if winner is None:
            continue
        ids = _fan_pattern_ids(fan_list, match_id)
        for pid in ids if count_multiplicity else sorted(set(ids)):
            counts[pid] += 1
    return FrequencyTable(counts, matches)


def top_k(freq: FrequencyTable, k: int) -> tuple[int, ...]:
    """The ``k`` most frequent pattern ids, most common first.

    Patterns absent from the table count as zero.  Equal counts order by
    ascending pattern id, so the ranking is deterministic.
    """
    if not 0 <= k <= PATTERN_COUNT:
        raise ValueError(f"k must be between 0 and {PATTERN_COUNT}")
    ranked = sorted(range(1, PATTERN_COUNT + 1), key=lambda pid: (-freq.count(pid), pid))
    return tuple(ranked[:k])


# ---------------------------------------------------------------------------
# Point adaptation


@dataclass(frozen=True)
class AdaptationResult:
    """Outcome of one point-adaptation pass."""

    new_points: dict[int, int]
    changed: tuple[tuple[int, int, int], ...]  # (pattern_id, old, new)

    def apply(self, table: FanTable) -> FanTable:
        """The same catalogue with the adapted point values."""
        overrides = {pid: new for pid, _, new in self.changed}
        return table.with_points(overrides, version=f"{table.version}+adapted")

    def to_payload(self) -> dict:
        return {
            "new_points": {str(pid): pts for pid, pts in sorted(self.new_points.items())},
            "changed": [list(row) for row in self.changed],
        }


def default_exempt_ids(table: FanTable) -> frozenset[int]:
    """Luck bonuses worth exactly the threshold; adaptation never moves them."""
    return frozenset(pid for pid in table.luck_ids if table.points(pid) == table.threshold)


def adapt_points(freq: FrequencyTable, table: FanTable | None = None, *,
                 exempt_ids: frozenset[int] | None = None) -> AdaptationResult:
    """Walk common high-point patterns down and rare threshold patterns up.

    The cut is the size of the table's at-or-below-threshold group (43
    patterns on the default catalogue); the most frequent patterns up to
    that cut form the "common" side.  Common patterns worth more than the
    threshold drop one rung on the point ladder; uncommon patterns worth
    exactly the threshold climb one rung.  The exempt set (by default the
    luck bonuses at the threshold, which reward timing rather than hand
    structure) never moves.  No pattern ever moves more than one rung.
    """
    if table is None:
        table = default_fan_table()
    missing = [p.pattern_id for p in table if not p.is_luck and p.pattern_id not in freq.counts]
    if missing:
        raise ValueError(f"frequency table missing structural patterns {missing}; ranking undefined")
    if exempt_ids is None:
        exempt_ids = default_exempt_ids(table)
    ladder = table.levels
    cut = sum(1 for p in table if p.points <= table.threshold)
    common = frozenset(top_k(freq, cut))
    new_points: dict[int, int] = {}
    changed: list[tuple[int, int, int]] = []
    for pat in table:
        old = pat.points
        new = old
        if pat.pattern_id in common:
            if old > table.threshold:
                new = ladder[ladder.index(old) - 1]
        elif old == table.threshold and pat.pattern_id not in exempt_ids:
            new = ladder[ladder.index(old) + 1]
        new_points[pat.pattern_id] = new
        if new != old:
            changed.append((pat.pattern_id, old, new))
    return AdaptationResult(new_points, tuple(changed))


# ---------------------------------------------------------------------------
# Seat compensation


def _resolution_denominator(resolution: float) -> int:
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    den = round(1.0 / resolution)
    if den < 1 or not math.isclose(den * resolution, 1.0, rel_tol=1e-9):
        raise ValueError("resolution must evenly divide one point")
    return den


@dataclass(frozen=True)
class CompensationVector:
    """Fixed per-seat score transfer that cancels the seating advantage."""

    units: tuple[int, ...]  # per seat, in multiples of the resolution
    resolution: float = 0.1

    def __post_init__(self) -> None:
        if len(self.units) != SEATS:
            raise ValueError("compensation must cover all four seats")
        if sum(self.units) != 0:
            raise ValueError("compensation must sum to zero")
        _resolution_denominator(self.resolution)

    @property
    def per_seat(self) -> tuple[float, ...]:
        den = _resolution_denominator(self.resolution)
        return tuple(u / den for u in self.units)

    def to_payload(self) -> dict:
        return {"per_seat": list(self.per_seat), "resolution": self.resolution}


def derive_compensation(stats, resolution: float = 0.1) -> CompensationVector:
    """Per-seat compensation from observed per-seat average scores.

    Negates the averages (seats that gain on average pay), rounds each entry
    to the resolution, then repairs the rounding so the four entries sum to
    exactly zero by nudging the entries with the largest rounding residue.
    Accepts ``SeatStats`` or any four-item sequence of averages.
    """
    averages = getattr(stats, "avg_score", stats)
    matches = getattr(stats, "matches", None)
    if matches is not None and sum(matches) < 1:
        raise ValueError("compensation needs at least one recorded match")
    values = [float(v) for v in averages]
    if len(values) != SEATS:
        raise ValueError("expected one average score per seat")
    den = _resolution_denominator(resolution)
    # round before floor so float dust cannot flip a unit boundary
    raw = [round(-v * den, 9) for v in values]
    units = [math.floor(r) for r in raw]
    residues = [r - u for r, u in zip(raw, units)]
    base, extra = divmod(-sum(units), SEATS)
    units = [u + base for u in units]
    for seat in sorted(range(SEATS), key=lambda s: (-residues[s], s))[:extra]:
        units[seat] += 1
    return CompensationVector(tuple(units), resolution)


# ---------------------------------------------------------------------------
# Exact hand counting


class UnsupportedPatternError(ValueError):
    """Requested a hand count for a pattern with no structural enumerator."""


@dataclass(frozen=True)
class EnumerationFlags:
    """Options for the hand counters.

    ``include_honors`` keeps honor kinds in the tile set; dropping them
    empties honor-dependent patterns.  ``allow_duplicate_pairs`` lets Seven
    Pairs shapes spend four copies of a kind as two pairs; by default the
    seven pairs must be seven distinct kinds.  ``include_kongs`` is reserved:
    counting is defined over exactly 14 tiles, so enabling it is an error.
    """

    include_honors: bool = True
    allow_duplicate_pairs: bool = False
    include_kongs: bool = False


@dataclass(frozen=True)
class PatternCount:
    """Exact hand count for one pattern, with its decimal magnitude."""

    pattern_id: int
    exact_count: int
    magnitude: int | None

    @classmethod
    def from_count(cls, pattern_id: int, exact_count: int) -> "PatternCount":
        if exact_count < 0:
            raise ValueError("hand counts cannot be negative")
        # len(str()) keeps floor(log10) exact for arbitrarily large counts
        magnitude = len(str(exact_count)) - 1 if exact_count > 0 else None
        return cls(pattern_id, exact_count, magnitude)

    def to_payload(self) -> dict:
        return {
            "pattern_id": self.pattern_id,
            "exact_count": self.exact_count,
            "magnitude": self.magnitude,
        }


def _kind_universe(flags: EnumerationFlags) -> range:
    return range(NUM_KINDS if flags.include_honors else SUITED_KINDS)


def _vector_weight(counts: Sequence[int]) -> int:
    weight = 1
    for c in counts:
        if c:
            weight *= math.comb(COPIES_PER_KIND, c)
    return weight


def _count_seven_pairs(flags: EnumerationFlags) -> int:
    # knapsack over kinds: ways[j] = weighted hands holding j pairs so far
    pair_w = math.comb(COPIES_PER_KIND, 2)
    double_w = math.comb(COPIES_PER_KIND, 4)
    ways = [1] + [0] * PAIR_SLOTS
    for _ in _kind_universe(flags):
        for j in range(PAIR_SLOTS, 0, -1):
            ways[j] += ways[j - 1] * pair_w
            if flags.allow_duplicate_pairs and j >= 2:
                ways[j] += ways[j - 2] * double_w
    return ways[PAIR_SLOTS]


def _count_thirteen_orphans(flags: EnumerationFlags) -> int:
    # one of each terminal and honor kind, any one of them doubled
    if not flags.include_honors:
        return 0
    single_w = math.comb(COPIES_PER_KIND, 1)
    pair_w = math.comb(COPIES_PER_KIND, 2)
    total = 0
    for _ in ORPHAN_KINDS:
        total += pair_w * single_w ** (len(ORPHAN_KINDS) - 1)
    return total


def _suit_seven_pair_vectors(flags: EnumerationFlags) -> list[tuple[int, ...]]:
    """Seven-pairs count vectors over one suit's nine ranks."""
    out: list[tuple[int, ...]] = []
    quad_limit = PAIR_SLOTS // 2 if flags.allow_duplicate_pairs else 0
    for quads in range(quad_limit + 1):
        for quad_ranks in combinations(range(RANKS_PER_SUIT), quads):
            rest = [r for r in range(RANKS_PER_SUIT) if r not in quad_ranks]
            for pair_ranks in combinations(rest, PAIR_SLOTS - 2 * quads):
                vec = [0] * RANKS_PER_SUIT
                for r in quad_ranks:
                    vec[r] = 4
                for r in pair_ranks:
                    vec[r] = 2
                out.append(tuple(vec))
    return out


def _full_flush_suit_count(suit: int, flags: EnumerationFlags) -> int:
    """Weighted count of winning 14-tile hands confined to one suit.

    A one-suit winner is either four sets plus a pair or seven pairs (the
    other winning families all need honors or several suits), so both
    families are enumerated directly and deduplicated on the final vector.
    """
    base = RANKS_PER_SUIT * suit
    deltas: list[tuple[int, ...]] = []
    for start in range(RANKS_PER_SUIT - 2):
        deltas.append(tuple(1 if start <= r <= start + 2 else 0 for r in range(RANKS_PER_SUIT)))
    for rank in range(RANKS_PER_SUIT):
        deltas.append(tuple(3 if r == rank else 0 for r in range(RANKS_PER_SUIT)))
    vectors: dict[tuple[int, ...], int] = {}

    def record(suit_vec: Sequence[int]) -> None:
        key = [0] * NUM_KINDS
        key[base:base + RANKS_PER_SUIT] = suit_vec
        key = tuple(key)
        if key not in vectors:
            vectors[key] = _vector_weight(key)

    for combo in combinations_with_replacement(deltas, 4):
        agg = [a + b + c + d for a, b, c, d in zip(*combo)]
        if max(agg) > COPIES_PER_KIND:
            continue
        for pair_rank in range(RANKS_PER_SUIT):
            if agg[pair_rank] + 2 > COPIES_PER_KIND:
                continue
            agg[pair_rank] += 2
            record(agg)
            agg[pair_rank] -= 2
    for suit_vec in _suit_seven_pair_vectors(flags):
        record(suit_vec)
    return sum(vectors.values())


def _count_full_flush(flags: EnumerationFlags) -> int:
    return sum(_full_flush_suit_count(suit, flags) for suit in range(3))


def _all_set_deltas(flags: EnumerationFlags) -> list[tuple[tuple[int, int], ...]]:
    """Every meldable set as (kind, added count) deltas."""
    deltas: list[tuple[tuple[int, int], ...]] = []
    for suit in range(3):
        for start in range(RANKS_PER_SUIT - 2):
            k = RANKS_PER_SUIT * suit + start
            deltas.append(((k, 1), (k + 1, 1), (k + 2, 1)))
    for kind in _kind_universe(flags):
        deltas.append(((kind, 3),))
    return deltas


def _pure_triple_chow_suit_vectors(suit: int, flags: EnumerationFlags) -> dict[tuple[int, ...], int]:
    """Unique winning vectors holding three identical chows in ``suit``.

    Distinct completions of the same final hand collapse onto one vector, so
    every hand is weighted exactly once.
    """
    vectors: dict[tuple[int, ...], int] = {}
    set_deltas = _all_set_deltas(flags)
    for start in range(RANKS_PER_SUIT - 2):
        chow = RANKS_PER_SUIT * suit + start
        base = [0] * NUM_KINDS
        for d in range(3):
            base[chow + d] = 3
        for deltas in set_deltas:
            with_set = list(base)
            for kind, add in deltas:
                with_set[kind] += add
            if any(c > COPIES_PER_KIND for c in with_set):
                continue
            for pair_kind in _kind_universe(flags):
                if with_set[pair_kind] + 2 > COPIES_PER_KIND:
                    continue
                with_set[pair_kind] += 2
                key = tuple(with_set)
                with_set[pair_kind] -= 2
                if key not in vectors:
                    vectors[key] = _vector_weight(key)
    return vectors


def _count_pure_triple_chow(flags: EnumerationFlags) -> int:
    # a hand fits three identical chows in at most one suit, so suit sums
    # never double-count
    return sum(
        sum(_pure_triple_chow_suit_vectors(suit, flags).values()) for suit in range(3))


def _enumerators(table: FanTable) -> dict[int, Callable[[EnumerationFlags], int]]:
    return {
        table.id_of("Seven Pairs"): _count_seven_pairs,
        table.id_of("Full Flush"): _count_full_flush,
        table.id_of("Pure Triple Chow"): _count_pure_triple_chow,
        table.id_of("Thirteen Orphans"): _count_thirteen_orphans,
    }


def enumerate_pattern_counts(patterns: Sequence[int], flags: EnumerationFlags | None = None,
                             *, table: FanTable | None = None) -> list[PatternCount]:
    """Exact weighted hand counts for the requested pattern ids, in order.

    Counts follow the module convention: distinguishable copies, 14-tile
    winning hands, structural pattern containment.  Luck patterns depend on
    how the winning tile arrived rather than on hand structure, so they have
    no count.
    """
    if flags is None:
        flags = EnumerationFlags()
    if flags.include_kongs:
        raise ValueError("hand counting is defined over exactly 14 tiles; kong hands are unsupported")
    if table is None:
        table = default_fan_table()
    registry = _enumerators(table)
    out: list[PatternCount] = []
    for pid in patterns:
        if pid not in table:
            raise UnsupportedPatternError(f"unknown pattern id {pid}")
        if table.get(pid).is_luck:
            raise UnsupportedPatternError(
                f"{table.name(pid)} depends on how the winning tile arrived, not on hand structure")
        counter = registry.get(pid)
        if counter is None:
            raise UnsupportedPatternError(f"no hand enumerator registered for {table.name(pid)}")
        out.append(PatternCount.from_count(pid, counter(flags)))
    return out


# ---------------------------------------------------------------------------
# Reports


def frequency_csv(freq: FrequencyTable, table: FanTable | None = None) -> str:
    """CSV ranking every pattern by observed count, header included."""
    if table is None:
        table = default_fan_table()
    lines = ["pattern_id,name,count,rank"]
    for rank, pid in enumerate(top_k(freq, PATTERN_COUNT), start=1):
        lines.append(f"{pid},{table.name(pid)},{freq.count(pid)},{rank}")
    return "\n".join(lines) + "\n"


def adaptation_report(result: AdaptationResult, table: FanTable | None = None) -> str:
    """Aligned diff of the changed point values: pattern, previous, new."""
    if table is None:
        table = default_fan_table()
    rows = [(table.name(pid), str(old), str(new)) for pid, old, new in result.changed]
    width = max((len(name) for name, _, _ in rows), default=7)
    lines = [f"{'pattern':<{width}}  {'previous':>8}  {'new':>4}"]
    for name, old, new in rows:
        lines.append(f"{name:<{width}}  {old:>8}  {new:>4}")
    return "\n".join(lines) + "\n"


def enumeration_report(counts: Sequence[PatternCount], table: FanTable | None = None) -> str:
    """Exact count and magnitude per pattern, one aligned row each."""
    if table is None:
        table = default_fan_table()
    rows = [(table.name(pc.pattern_id), f"{pc.exact_count:,}",
             "-" if pc.magnitude is None else f"10^{pc.magnitude}") for pc in counts]
    width = max((len(name) for name, _, _ in rows), default=7)
    count_w = max((len(c) for _, c, _ in rows), default=11)
    lines = [f"{'pattern':<{width}}  {'exact_count':>{count_w}}  {'magnitude':>9}"]
    for name, count, mag in rows:
        lines.append(f"{name:<{width}}  {count:>{count_w}}  {mag:>9}")
    return "\n".join(lines) + "\n"
