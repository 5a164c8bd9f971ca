"""Tile identity, walls, and the text codes used across records and protocols.

A tile code is a category letter followed by a rank digit: ``W`` characters,
``B`` dots, ``T`` bamboo, ``F`` winds (1=East .. 4=North), ``J`` dragons
(1=Red, 2=Green, 3=White), ``H`` flowers.  Copies of the same kind are
distinguished with a ``.copy`` suffix (``W5.2``) when provenance matters,
e.g. in wall dumps and match records.

Internally most modules work on kind indices 0..33:

    0..8 W1..W9, 9..17 B1..B9, 18..26 T1..T9, 27..30 F1..F4, 31..33 J1..J3

Flowers get indices 34..41 and never appear in hands; they are exposed and
replaced when drawn (when a ruleset enables them at all).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from . import rng as _rng

NUM_KINDS = 34
NUM_FLOWER_KINDS = 8
COPIES_PER_KIND = 4
WALL_SIZE_PLAIN = NUM_KINDS * COPIES_PER_KIND          # 136
WALL_SIZE_FLOWERS = WALL_SIZE_PLAIN + NUM_FLOWER_KINDS  # 144
HAND_SIZE = 13
DEAL_COUNT = 4 * HAND_SIZE


class Category(Enum):
    CHARACTERS = "W"
    DOTS = "B"
    BAMBOO = "T"
    WINDS = "F"
    DRAGONS = "J"
    FLOWERS = "H"

    @property
    def letter(self) -> str:
        return self.value


_CATEGORY_BY_LETTER = {c.value: c for c in Category}
_RANK_LIMIT = {
    Category.CHARACTERS: 9,
    Category.DOTS: 9,
    Category.BAMBOO: 9,
    Category.WINDS: 4,
    Category.DRAGONS: 3,
    Category.FLOWERS: 8,
}
_CATEGORY_BASE = {
    Category.CHARACTERS: 0,
    Category.DOTS: 9,
    Category.BAMBOO: 18,
    Category.WINDS: 27,
    Category.DRAGONS: 31,
    Category.FLOWERS: 34,
}


@dataclass(frozen=True, slots=True, order=True)
class TileKind:
    category: Category
    rank: int
    index: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        limit = _RANK_LIMIT[self.category]
        if not 1 <= self.rank <= limit:
            raise ValueError(f"rank {self.rank} out of range for {self.category.name}")
        object.__setattr__(self, "index", _CATEGORY_BASE[self.category] + self.rank - 1)

    @property
    def code(self) -> str:
        return f"{self.category.letter}{self.rank}"

    def __str__(self) -> str:
        return self.code


@dataclass(frozen=True, slots=True, order=True)
class Tile:
    kind: TileKind
    copy: int = 0

    def __post_init__(self) -> None:
        limit = 1 if self.kind.category is Category.FLOWERS else COPIES_PER_KIND
        if not 0 <= self.copy < limit:
            raise ValueError(f"copy {self.copy} out of range for {self.kind.code}")

    @property
    def code(self) -> str:
        return self.kind.code

    @property
    def full_code(self) -> str:
        return f"{self.kind.code}.{self.copy}"

    def __str__(self) -> str:
        return self.full_code


def kind_from_index(index: int) -> TileKind:
    return _KINDS[index]


def _build_kinds() -> tuple[TileKind, ...]:
    kinds: list[TileKind] = []
    for cat in (Category.CHARACTERS, Category.DOTS, Category.BAMBOO, Category.WINDS, Category.DRAGONS):
        for rank in range(1, _RANK_LIMIT[cat] + 1):
            kinds.append(TileKind(cat, rank))
    for rank in range(1, NUM_FLOWER_KINDS + 1):
        kinds.append(TileKind(Category.FLOWERS, rank))
    return tuple(kinds)


_KINDS = _build_kinds()
_TILES = tuple(
    tuple(Tile(kind, c) for c in range(1 if kind.category is Category.FLOWERS else COPIES_PER_KIND))
    for kind in _KINDS
)


def tile(index: int, copy: int = 0) -> Tile:
    """Interned tile lookup by kind index; cheap and allocation-free."""
    if copy < len(_TILES[index]):
        return _TILES[index][copy]
    return Tile(kind_from_index(index), copy)


def parse_tile(text: str) -> Tile:
    """Parse ``W5`` or ``W5.2`` into a Tile (copy defaults to 0)."""
    text = text.strip()
    body, dot, copy_part = text.partition(".")
    if len(body) != 2 or body[0] not in _CATEGORY_BY_LETTER or not body[1].isdigit():
        raise ValueError(f"bad tile code {text!r}")
    kind = TileKind(_CATEGORY_BY_LETTER[body[0]], int(body[1]))
    copy = 0
    if dot:
        if not copy_part.isdigit():
            raise ValueError(f"bad copy suffix in {text!r}")
        copy = int(copy_part)
    return _TILES[kind.index][copy] if copy < len(_TILES[kind.index]) else Tile(kind, copy)


def format_tile(t: Tile | TileKind, *, with_copy: bool = False) -> str:
    if isinstance(t, TileKind):
        return t.code
    return t.full_code if with_copy else t.code


_DENSE_CODE = re.compile(r"[WBTFJH]\d(?:\.\d+)?")


def _tokenize_codes(text: str) -> list[str]:
    tokens: list[str] = []
    for chunk in text.split():
        if len(chunk) == 2 or "." in chunk and _DENSE_CODE.fullmatch(chunk):
            tokens.append(chunk)
            continue
        pos = 0
        while pos < len(chunk):
            m = _DENSE_CODE.match(chunk, pos)
            if not m:
                raise ValueError(f"bad tile code at {chunk[pos:]!r}")
            tokens.append(m.group())
            pos = m.end()
    return tokens


def parse_hand_codes(text: str) -> list[Tile]:
    """Parse tile codes, spaced or run together; bare kinds get distinct copies."""
    seen: dict[int, int] = {}
    out: list[Tile] = []
    for token in _tokenize_codes(text):
        t = parse_tile(token)
        if "." not in token:
            idx = t.kind.index
            copy = seen.get(idx, 0)
            seen[idx] = copy + 1
            t = tile(idx, copy)
        out.append(t)
    return out


class MeldKind(Enum):
    CHOW = "chow"
    PUNG = "pung"
    KONG_MELDED = "melded_kong"
    KONG_CONCEALED = "concealed_kong"
    KONG_ADDED = "added_kong"

    @property
    def is_kong(self) -> bool:
        return self in (MeldKind.KONG_MELDED, MeldKind.KONG_CONCEALED, MeldKind.KONG_ADDED)


@dataclass(frozen=True, slots=True)
class Meld:
    kind: MeldKind
    tiles: tuple[Tile, ...]
    claimed_from: int | None = None
    claimed_tile: Tile | None = None

    def __post_init__(self) -> None:
        expect = 4 if self.kind.is_kong else 3
        if len(self.tiles) != expect:
            raise ValueError(f"{self.kind.value} needs {expect} tiles, got {len(self.tiles)}")
        indices = sorted(t.kind.index for t in self.tiles)
        if self.kind is MeldKind.CHOW:
            a, b, c = indices
            if not (b == a + 1 and c == a + 2 and a // 9 == c // 9 and a < 27):
                raise ValueError("chow tiles must be three consecutive ranks of one suit")
        else:
            if len(set(indices)) != 1:
                raise ValueError(f"{self.kind.value} tiles must share one kind")

    @property
    def base_index(self) -> int:
        """Lowest member kind for chows, the kind itself otherwise."""
        return min(t.kind.index for t in self.tiles)

    @property
    def concealed(self) -> bool:
        return self.kind is MeldKind.KONG_CONCEALED


@dataclass(slots=True)
class Hand:
    """One seat's holding: declared melds plus concealed tiles.

    Size invariant: 3 * len(melds) + len(concealed) is 13 between turns and 14
    while deciding a discard (kongs contribute 3 because the fourth tile is
    offset by the replacement draw).
    """

    concealed: list[Tile]
    melds: list[Meld]

    def equivalent_size(self) -> int:
        return 3 * len(self.melds) + len(self.concealed)

    def counts(self) -> list[int]:
        counts = [0] * NUM_KINDS
        for t in self.concealed:
            counts[t.kind.index] += 1
        return counts

    def validate(self) -> None:
        size = self.equivalent_size()
        if size not in (13, 14):
            raise ValueError(f"hand size {size} is not 13 or 14")
        for c in self.counts():
            if c > COPIES_PER_KIND:
                raise ValueError("more than four copies of one kind")


class Wall:
    """Ordered tile sequence with a front draw cursor and a tail cursor.

    Normal draws advance the front; kong replacement draws consume from the
    tail.  There is no dead wall: the game ends when the two cursors meet.
    """

    __slots__ = ("tiles", "front", "back", "seed", "flowers")

    def __init__(self, tiles: list[Tile], *, seed: int | None = None, flowers: bool = False):
        self.tiles: list[Tile] = list(tiles)
        self.front = 0
        self.back = len(self.tiles) - 1
        self.seed = seed
        self.flowers = flowers

    @property
    def remaining(self) -> int:
        return self.back - self.front + 1

    def draw_front(self) -> Tile:
        if self.remaining <= 0:
            raise IndexError("wall is exhausted")
        t = self.tiles[self.front]
        self.front += 1
        return t

    def draw_back(self) -> Tile:
        if self.remaining <= 0:
            raise IndexError("wall is exhausted")
        t = self.tiles[self.back]
        self.back -= 1
        return t

    def dump(self, *, with_copies: bool = True) -> str:
        return " ".join(format_tile(t, with_copy=with_copies) for t in self.tiles)

    @classmethod
    def from_dump(cls, text: str, *, seed: int | None = None, flowers: bool = False) -> "Wall":
        tiles = parse_hand_codes(text)
        wall = cls(tiles, seed=seed, flowers=flowers)
        _check_complete(tiles, flowers=flowers)
        return wall


def _check_complete(tiles: list[Tile], *, flowers: bool) -> None:
    expected = WALL_SIZE_FLOWERS if flowers else WALL_SIZE_PLAIN
    if len(tiles) != expected:
        raise ValueError(f"wall has {len(tiles)} tiles, expected {expected}")
    if len(set(tiles)) != expected:
        raise ValueError("wall contains duplicate physical tiles")


def base_tiles(*, flowers: bool = False) -> list[Tile]:
    """The unshuffled full tile set, kinds ascending, copies ascending."""
    out: list[Tile] = []
    for idx in range(NUM_KINDS):
        out.extend(_TILES[idx])
    if flowers:
        for idx in range(NUM_KINDS, NUM_KINDS + NUM_FLOWER_KINDS):
            out.extend(_TILES[idx])
    return out


def build_wall(seed: int, *, flowers: bool = False) -> Wall:
    """Deterministic wall: Fisher-Yates over the named seeded generator."""
    tiles = base_tiles(flowers=flowers)
    _rng.fisher_yates(tiles, _rng.generator(seed, 0))
    return Wall(tiles, seed=seed, flowers=flowers)


def deal(wall: Wall) -> list[list[Tile]]:
    """Deal four hands of 13 from the wall front, dealer (seat 0) first.

    Tiles go around one at a time starting with the dealer; the cursor ends at
    52 so the dealer's first turn begins with a normal draw.
    """
    if len(wall.tiles) - wall.front < DEAL_COUNT + 1:
        raise ValueError("wall too short to deal four hands and leave a draw")
    hands: list[list[Tile]] = [[], [], [], []]
    for i in range(DEAL_COUNT):
        hands[i % 4].append(wall.draw_front())
    return hands


# --- kind-index helpers used by the counting modules -----------------------

WIND_BASE = 27
DRAGON_BASE = 31


def suit_of(index: int) -> int:
    """0/1/2 for the numbered suits, 3 for winds, 4 for dragons."""
    if index < 27:
        return index // 9
    return 3 if index < 31 else 4


def rank_of(index: int) -> int:
    """1..9 rank for suited kinds; wind/dragon ordinal otherwise."""
    if index < 27:
        return index % 9 + 1
    return index - WIND_BASE + 1 if index < DRAGON_BASE else index - DRAGON_BASE + 1


def is_suited(index: int) -> bool:
    return index < 27


def is_honor(index: int) -> bool:
    return index >= 27


def is_wind(index: int) -> bool:
    return WIND_BASE <= index < DRAGON_BASE


def is_dragon(index: int) -> bool:
    return index >= DRAGON_BASE


def is_terminal(index: int) -> bool:
    return index < 27 and index % 9 in (0, 8)


def is_terminal_or_honor(index: int) -> bool:
    return is_terminal(index) or index >= 27


GREEN_KINDS = frozenset({19, 20, 21, 23, 25, 32})           # T2 T3 T4 T6 T8 + green dragon
REVERSIBLE_KINDS = frozenset({9, 10, 11, 12, 13, 16, 17, 33})  # B1-B5 B8 B9 + white dragon
ORPHAN_KINDS = tuple(sorted({0, 8, 9, 17, 18, 26, 27, 28, 29, 30, 31, 32, 33}))
KNITTED_ROWS = ((0, 3, 6), (1, 4, 7), (2, 5, 8))  # 147 / 258 / 369 rank templates
