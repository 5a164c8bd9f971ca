"""Rule set registry: a fan point table plus optional per-seat compensation.

Two rule sets ship built in.  ``classic`` scores with the standard pattern
values and settles raw points only.  ``revised`` applies the rebalanced
point values bundled with the scoring package and adds a fixed per-seat
compensation vector at settlement, which removes the positional advantage
of the fixed dealer without rotating seats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scoring import WIN_THRESHOLD, FanTable, default_fan_table, load_revised_points

SEATS = 4

# Added to raw scores seat by seat: early positions pay, late positions
# receive, and the four entries cancel out.
REVISED_COMPENSATION = (-1.0, -0.4, 0.3, 1.1)


@dataclass(frozen=True)
class RuleSet:
    """Named scoring configuration used by the referee and the service."""

    ruleset_id: str
    fan_table: FanTable
    win_threshold: int = WIN_THRESHOLD
    compensation: tuple[float, float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.win_threshold != self.fan_table.threshold:
            raise ValueError("rule set threshold must match its fan table")
        if self.compensation is not None:
            if len(self.compensation) != SEATS:
                raise ValueError("compensation must cover all four seats")
            if not math.isclose(sum(self.compensation), 0.0, abs_tol=1e-9):
                raise ValueError("compensation must sum to zero")

    @property
    def fan_points(self) -> dict[int, int]:
        return self.fan_table.point_vector()

    def compensated(self, scores: list[int] | tuple[int, ...]) -> list[float] | None:
        """Raw scores plus the compensation vector, kept at one decimal."""
        if self.compensation is None:
            return None
        if len(scores) != SEATS:
            raise ValueError("scores must cover all four seats")
        return [round(s + c, 1) for s, c in zip(scores, self.compensation)]


def classic_ruleset() -> RuleSet:
    return _builtin("classic")


def revised_ruleset() -> RuleSet:
    return _builtin("revised")


def get_ruleset(ruleset_id: str) -> RuleSet:
    """Look up a built-in or registered rule set; unknown ids are an error."""
    try:
        return _builtin(ruleset_id)
    except KeyError:
        raise ValueError(f"unknown ruleset {ruleset_id!r}") from None


def register_ruleset(ruleset: RuleSet) -> None:
    """Make a custom rule set resolvable by id (e.g. after re-pointing)."""
    _REGISTRY[ruleset.ruleset_id] = ruleset


def ruleset_ids() -> tuple[str, ...]:
    _ensure_builtins()
    return tuple(sorted(_REGISTRY))


_REGISTRY: dict[str, RuleSet] = {}


def _ensure_builtins() -> None:
    if "classic" not in _REGISTRY:
        base = default_fan_table()
        _REGISTRY["classic"] = RuleSet("classic", base)
        revised_table = base.with_points(load_revised_points(), version="revised")
        _REGISTRY["revised"] = RuleSet(
            "revised", revised_table, compensation=REVISED_COMPENSATION)


def _builtin(ruleset_id: str) -> RuleSet:
    _ensure_builtins()
    return _REGISTRY[ruleset_id]
