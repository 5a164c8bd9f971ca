import json

import pytest

from mahjong_lab.scoring import (
    PATTERN_COUNT,
    POINT_LEVELS,
    WIN_THRESHOLD,
    default_fan_table,
    load_fan_table,
    load_revised_points,
)

REVISED_DIFFS = {
    36: 12, 38: 12, 44: 8, 45: 8, 46: 8, 47: 8, 49: 12, 51: 12, 55: 16, 58: 16, 63: 16,
}


def test_catalogue_shape():
    table = default_fan_table()
    assert len(table) == PATTERN_COUNT == 81
    assert [p.pattern_id for p in table] == list(range(1, 82))
    assert len({p.name for p in table}) == 81
    assert table.threshold == WIN_THRESHOLD == 8
    assert table.levels == POINT_LEVELS == (1, 2, 4, 5, 6, 8, 12, 16, 24, 32, 48, 64, 88)
    for p in table:
        assert p.points in POINT_LEVELS
        assert p.kind in ("structural", "luck")


def test_luck_patterns_flagged():
    assert default_fan_table().luck_ids == frozenset({12, 26, 40, 41, 42, 43})


def test_value_anchors():
    table = default_fan_table()
    assert table.points(1) == 1
    assert table.points(39) == 8
    assert table.points(55) == 24
    assert table.points(74) == 64
    assert table.points(81) == 88


def test_lookup_roundtrip():
    table = default_fan_table()
    for p in table:
        assert table.get(p.pattern_id) is p
        assert table.id_of(p.name) == p.pattern_id
        assert table.name(p.pattern_id) == p.name
    assert 81 in table
    assert 82 not in table


def test_missing_pattern_rejected(tmp_path):
    table = default_fan_table()
    raw = {
        "version": "short",
        "threshold": 8,
        "levels": list(POINT_LEVELS),
        "patterns": [
            {"id": p.pattern_id, "name": p.name, "points": p.points,
             "kind": p.kind, "excludes": list(p.excludes)}
            for p in table
            if p.pattern_id != 50
        ],
    }
    path = tmp_path / "short.json"
    path.write_text(json.dumps(raw))
    with pytest.raises(ValueError):
        load_fan_table(path)


def test_malformed_data_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"version": "bad"}))
    with pytest.raises(ValueError):
        load_fan_table(path)


def test_off_ladder_override_rejected():
    table = default_fan_table()
    with pytest.raises(ValueError):
        table.with_points({1: 3})
    with pytest.raises(ValueError):
        table.with_points({99: 8})


def test_revised_points_change_exactly_eleven_values():
    base = default_fan_table()
    revised = base.with_points(load_revised_points(), version="revised")
    diffs = {
        pid: revised.points(pid)
        for pid in range(1, 82)
        if revised.points(pid) != base.points(pid)
    }
    assert len(diffs) == 11
    assert diffs == REVISED_DIFFS
    assert revised.version == "revised"
    # untouched entries keep their identity
    assert revised.points(81) == base.points(81) == 88
    assert revised.name(55) == base.name(55)
