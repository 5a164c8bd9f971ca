"""Hand valuation: shape analysis, decomposition, fan detection, settlement."""

from .context import WinBy, WinContext
from .corpus import GoldenCase, load_golden_corpus
from .decompose import (
    DEFAULT_CONFIG,
    Decomposition,
    Form,
    Piece,
    ScoringConfig,
    decompose,
    meld_piece,
)
from .detect import (
    CHICKEN_HAND_ID,
    FanAward,
    FanResult,
    best_fan,
    enumerate_fans,
)
from .fan_table import (
    PATTERN_COUNT,
    POINT_LEVELS,
    WIN_THRESHOLD,
    FanPattern,
    FanTable,
    default_fan_table,
    load_fan_table,
    load_revised_points,
)
from .settle import BASE_STAKE, settle, settle_total
from .shape import deficiency, is_winning_shape, wait_kinds

__all__ = [
    "BASE_STAKE",
    "CHICKEN_HAND_ID",
    "DEFAULT_CONFIG",
    "Decomposition",
    "FanAward",
    "FanPattern",
    "FanResult",
    "FanTable",
    "Form",
    "GoldenCase",
    "PATTERN_COUNT",
    "POINT_LEVELS",
    "Piece",
    "ScoringConfig",
    "WIN_THRESHOLD",
    "WinBy",
    "WinContext",
    "best_fan",
    "decompose",
    "default_fan_table",
    "deficiency",
    "enumerate_fans",
    "is_winning_shape",
    "load_fan_table",
    "load_golden_corpus",
    "load_revised_points",
    "meld_piece",
    "settle",
    "settle_total",
    "wait_kinds",
]
