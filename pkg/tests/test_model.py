"""Record validation, series-state keys, and name normalization."""

from __future__ import annotations

import pytest

from conftest import make_event, make_game
from rimkit.model import (
    SeriesStateKey,
    all_series_keys,
    canonical_series_key,
    canonicalize_name,
    is_no_crew_only,
    validate_game,
)


def test_well_formed_game_has_no_violations():
    game = make_game([make_event(0.5, 0.55, clock=700.0)])
    assert validate_game(game) == []


def test_out_of_range_wp_is_reported_not_raised():
    game = make_game([make_event(1.2, 0.5)])
    problems = validate_game(game)
    assert len(problems) == 1
    assert "pre_wp" in problems[0]
    assert "outside [0, 1]" in problems[0]


def test_postseason_series_state_out_of_bounds():
    game = make_game(
        season_type="postseason",
        series_state=(4, 0),
    )
    problems = validate_game(game)
    assert any("series_state.home_wins" in p for p in problems)


def test_series_state_on_regular_season_game_is_flagged():
    game = make_game(series_state=(1, 0))
    problems = validate_game(game)
    assert any("non-postseason" in p for p in problems)


def test_identical_home_away_teams_flagged():
    game = make_game(home="HOU", away="HOU")
    assert any(p.startswith("teams:") for p in validate_game(game))


def test_event_ordering_violation():
    events = [
        make_event(0.5, 0.5, event_id=1, period=2, clock=100.0),
        make_event(0.5, 0.5, event_id=2, period=1, clock=500.0),
    ]
    problems = validate_game(make_game(events))
    assert any("out of order" in p for p in problems)


def test_same_clock_tie_is_legal():
    events = [
        make_event(0.5, 0.5, event_id=1, period=1, clock=300.0),
        make_event(0.5, 0.5, event_id=2, period=1, clock=300.0),
    ]
    assert validate_game(make_game(events)) == []


def test_overtime_clock_bound_differs_from_regulation():
    ok = make_game([make_event(0.5, 0.5, period=5, clock=299.0)])
    assert validate_game(ok) == []
    bad = make_game([make_event(0.5, 0.5, period=5, clock=500.0)])
    assert any("clock_seconds_remaining" in p for p in validate_game(bad))


def test_unknown_charged_team_flagged_but_none_allowed():
    bad = make_game([make_event(0.5, 0.5, charged="LAL")])
    assert any("charged_team" in p for p in validate_game(bad))
    unattributed = make_game([make_event(0.5, 0.5, charged=None)])
    assert validate_game(unattributed) == []


def test_empty_crew_is_isolated_soft_flag():
    game = make_game(crew=())
    problems = validate_game(game)
    assert len(problems) == 1
    assert is_no_crew_only(problems)
    # Any second problem makes the set hard-quarantine material.
    game2 = make_game(crew=(), season_type="preseason")
    assert not is_no_crew_only(validate_game(game2))


def test_series_key_collapses_mirrored_states():
    assert canonical_series_key(1, 0) == SeriesStateKey(0, 1)
    assert canonical_series_key(0, 1) == SeriesStateKey(0, 1)
    assert canonical_series_key(2, 2) == SeriesStateKey(2, 2)
    assert canonical_series_key(3, 1).label == "1--3"


def test_series_key_rejects_out_of_range():
    with pytest.raises(ValueError):
        canonical_series_key(4, 0)
    with pytest.raises(ValueError):
        canonical_series_key(0, -1)


def test_all_series_keys_count_and_order():
    keys = all_series_keys()
    # lo <= hi pairs drawn from 0..3: 4 + 3 + 2 + 1.
    assert len(keys) == 10
    assert keys[0].label == "0--0"
    assert keys == sorted(keys)
    assert all(k.lo <= k.hi for k in keys)


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("  tony   brothers ", "Tony Brothers"),
        ("TONY BROTHERS", "Tony Brothers"),
        ("Sean Wright JR", "Sean Wright Jr."),
        ("james capers jr.", "James Capers Jr."),
        ("John Smith iii", "John Smith III"),
    ],
)
def test_canonicalize_name_casing_and_suffixes(raw, expected):
    assert canonicalize_name(raw) == expected


def test_canonicalize_name_preserves_mixed_case():
    assert canonicalize_name("JB DeRosa") == "JB DeRosa"


def test_canonicalize_name_applies_aliases_last():
    aliases = {"Tony Brothers": "Anthony Brothers"}
    assert canonicalize_name("TONY BROTHERS", aliases) == "Anthony Brothers"
