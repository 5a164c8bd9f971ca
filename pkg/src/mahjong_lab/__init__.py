"""Rules engine, self-play simulator, and balance laboratory for mahjong.

The public surface groups into five layers:

* :mod:`mahjong_lab.tiles` / :mod:`mahjong_lab.rules`: the tile set, walls,
  point ladder, and ruleset registry;
* :mod:`mahjong_lab.scoring`: winning-shape tests, fan detection, and score
  settlement;
* :mod:`mahjong_lab.engine`: the four-seat referee state machine with full
  match records and byte-stable replays;
* :mod:`mahjong_lab.agents` / :mod:`mahjong_lab.simulator`: built-in and
  external policies plus batch self-play and tournament formats;
* :mod:`mahjong_lab.balance` / :mod:`mahjong_lab.service`: pattern
  frequencies, point adaptation, seat compensation, hand enumeration, and
  the live-table network service.

The most commonly used names are re-exported here.
"""

from .agents import AgentFailure, make_agent, parse_response
from .balance import (
    adapt_points,
    count_frequencies,
    derive_compensation,
    enumerate_pattern_counts,
)
from .engine import (
    GameState,
    IllegalActionError,
    MatchRecord,
    Phase,
    legal_actions,
    new_match,
    observation_for,
    replay_match,
    run_match,
    step,
)
from .rules import RuleSet, get_ruleset
from .scoring import WinBy, WinContext, best_fan, default_fan_table, settle
from .simulator import run_duplicate, run_fixed_seat, run_selfplay
from .tiles import Hand, Tile, Wall, build_wall, format_tile, parse_hand_codes

__version__ = "0.1.0"

__all__ = [
    "AgentFailure",
    "GameState",
    "Hand",
    "IllegalActionError",
    "MatchRecord",
    "Phase",
    "RuleSet",
    "Tile",
    "Wall",
    "WinBy",
    "WinContext",
    "__version__",
    "adapt_points",
    "best_fan",
    "build_wall",
    "count_frequencies",
    "default_fan_table",
    "derive_compensation",
    "enumerate_pattern_counts",
    "format_tile",
    "get_ruleset",
    "legal_actions",
    "make_agent",
    "new_match",
    "observation_for",
    "parse_hand_codes",
    "parse_response",
    "replay_match",
    "run_duplicate",
    "run_fixed_seat",
    "run_match",
    "run_selfplay",
    "settle",
    "step",
]
