"""Scoring pattern catalogue.

The default catalogue ships as a data file (``data/fan_table.json``) holding
all 81 patterns, their base point values on the 13-step point ladder, their
kind (structural vs luck-dependent), and the per-pattern exclusion lists used
to implement the account-once combination rules.  A second data file
(``data/revised_points.json``) holds the alternative point assignment used by
the revised ruleset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

PATTERN_COUNT = 81
POINT_LEVELS = (1, 2, 4, 5, 6, 8, 12, 16, 24, 32, 48, 64, 88)
WIN_THRESHOLD = 8

KIND_STRUCTURAL = "structural"
KIND_LUCK = "luck"


@dataclass(frozen=True)
class FanPattern:
    """One scoring pattern: identity, value, and exclusion behaviour."""

    pattern_id: int
    name: str
    points: int
    kind: str
    excludes: tuple[int, ...]

    @property
    def is_luck(self) -> bool:
        return self.kind == KIND_LUCK


class FanTable:
    """Immutable catalogue of scoring patterns keyed by pattern id."""

    def __init__(self, patterns: Iterable[FanPattern], *, threshold: int = WIN_THRESHOLD,
                 levels: tuple[int, ...] = POINT_LEVELS, version: str = "custom"):
        self._patterns = {p.pattern_id: p for p in patterns}
        self.threshold = threshold
        self.levels = tuple(levels)
        self.version = version
        self._by_name = {p.name: p for p in self._patterns.values()}
        self._validate()

    def _validate(self) -> None:
        ids = sorted(self._patterns)
        if len(ids) != PATTERN_COUNT or ids != list(range(1, PATTERN_COUNT + 1)):
            raise ValueError(f"fan table must define pattern ids 1..{PATTERN_COUNT}")
        if len(self._by_name) != PATTERN_COUNT:
            raise ValueError("fan table pattern names must be unique")
        if len(self.levels) != len(POINT_LEVELS):
            raise ValueError(f"fan table must use a {len(POINT_LEVELS)}-level point ladder")
        for pat in self._patterns.values():
            if pat.points not in self.levels:
                raise ValueError(f"pattern {pat.pattern_id} has off-ladder points {pat.points}")
            if pat.kind not in (KIND_STRUCTURAL, KIND_LUCK):
                raise ValueError(f"pattern {pat.pattern_id} has unknown kind {pat.kind!r}")
            for other in pat.excludes:
                if other not in self._patterns or other == pat.pattern_id:
                    raise ValueError(f"pattern {pat.pattern_id} excludes unknown id {other}")

    def __len__(self) -> int:
        return len(self._patterns)

    def __iter__(self):
        return iter(sorted(self._patterns.values(), key=lambda p: p.pattern_id))

    def __contains__(self, pattern_id: int) -> bool:
        return pattern_id in self._patterns

    def get(self, pattern_id: int) -> FanPattern:
        return self._patterns[pattern_id]

    def points(self, pattern_id: int) -> int:
        return self._patterns[pattern_id].points

    def name(self, pattern_id: int) -> str:
        return self._patterns[pattern_id].name

    def id_of(self, name: str) -> int:
        return self._by_name[name].pattern_id

    @property
    def luck_ids(self) -> frozenset[int]:
        return frozenset(p.pattern_id for p in self._patterns.values() if p.is_luck)

    def point_vector(self) -> dict[int, int]:
        return {p.pattern_id: p.points for p in self}

    def with_points(self, overrides: Mapping[int, int], *, version: str | None = None) -> "FanTable":
        """Derive a table with some point values replaced (same patterns)."""
        for pid, pts in overrides.items():
            if pid not in self._patterns:
                raise ValueError(f"override for unknown pattern id {pid}")
            if pts not in self.levels:
                raise ValueError(f"override for pattern {pid} is off the point ladder: {pts}")
        patterns = [
            FanPattern(p.pattern_id, p.name, overrides.get(p.pattern_id, p.points), p.kind, p.excludes)
            for p in self
        ]
        return FanTable(patterns, threshold=self.threshold, levels=self.levels,
                        version=version or f"{self.version}+override")


def _data_text(filename: str) -> str:
    return resources.files("mahjong_lab.scoring").joinpath("data", filename).read_text("utf-8")


def load_fan_table(path: str | Path | None = None) -> FanTable:
    """Load a fan table from ``path``, or the bundled default table."""
    if path is None:
        raw = json.loads(_data_text("fan_table.json"))
    else:
        raw = json.loads(Path(path).read_text("utf-8"))
    try:
        patterns = [
            FanPattern(int(p["id"]), str(p["name"]), int(p["points"]), str(p["kind"]),
                       tuple(int(e) for e in p["excludes"]))
            for p in raw["patterns"]
        ]
        table = FanTable(patterns, threshold=int(raw.get("threshold", WIN_THRESHOLD)),
                         levels=tuple(int(v) for v in raw["levels"]),
                         version=str(raw.get("version", "custom")))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed fan table data: {exc}") from exc
    return table


def load_revised_points() -> dict[int, int]:
    """Bundled point overrides for the revised ruleset."""
    raw = json.loads(_data_text("revised_points.json"))
    return {int(k): int(v) for k, v in raw["points"].items()}


_DEFAULT: FanTable | None = None


def default_fan_table() -> FanTable:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_fan_table()
    return _DEFAULT
