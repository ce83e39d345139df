"""Per-game metric kernels against hand-computed values and identities."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import make_event, make_game, random_games
from rimkit.metrics import (
    compute_game_metrics,
    event_leverage,
    expand_rows,
    game_rim,
    period_breakdown,
    period_bucket,
    signed_disparity,
    signed_team_rim,
    swing_per_call,
)


def test_event_leverage_hand_values():
    assert event_leverage(0.5, 0.5) == 0.0
    assert event_leverage(0.62, 0.55) == pytest.approx(0.07, abs=1e-12)
    assert event_leverage(0.55, 0.62) == pytest.approx(0.07, abs=1e-12)


def test_event_leverage_perspective_symmetry(rng):
    a = rng.random(500)
    b = rng.random(500)
    for x, y in zip(a, b):
        assert event_leverage(1.0 - x, 1.0 - y) == pytest.approx(
            event_leverage(x, y), abs=1e-15
        )


def test_game_rim_empty_and_sum():
    assert game_rim([]) == 0.0
    events = [
        make_event(0.50, 0.52, event_id=1),
        make_event(0.52, 0.57, event_id=2),
        make_event(0.57, 0.47, event_id=3),
    ]
    assert game_rim(events) == pytest.approx(0.17, abs=1e-12)


def test_swing_per_call_hand_values():
    assert swing_per_call(0.17, 3) == pytest.approx(0.17 / 3, abs=1e-15)
    assert swing_per_call(0.0, 5) == 0.0
    assert swing_per_call(0.4, 0) is None
    with pytest.raises(ValueError):
        swing_per_call(0.1, -1)


def test_signed_disparity_hand_values():
    assert signed_disparity(10, 12) == 2
    assert signed_disparity(12, 10) == -2
    assert signed_disparity(0, 0) == 0


def test_signed_team_rim_single_event():
    events = [make_event(0.50, 0.57)]
    assert signed_team_rim(events, "home") == pytest.approx(0.07, abs=1e-15)
    assert signed_team_rim(events, "away") == pytest.approx(-0.07, abs=1e-15)
    with pytest.raises(ValueError):
        signed_team_rim(events, "neutral")


def test_micro_game_frozen_values():
    # Three calls: +0.07 toward home (charged away), -0.04 (charged home),
    # a zero-move call (charged home). Totals worked out by hand.
    events = [
        make_event(0.50, 0.57, charged="BOS", event_id=1, clock=700.0),
        make_event(0.57, 0.53, charged="HOU", event_id=2, clock=400.0),
        make_event(0.53, 0.53, charged="HOU", event_id=3, clock=100.0),
    ]
    m = compute_game_metrics(make_game(events))
    assert m.n_calls == 3
    assert m.rim == pytest.approx(0.11, abs=1e-12)
    assert m.swing == pytest.approx(0.11 / 3, abs=1e-12)
    assert m.home_row.own_fouls == 2
    assert m.home_row.opp_fouls == 1
    assert m.home_row.disparity == -1
    assert m.away_row.disparity == 1
    assert m.home_row.team_rim == pytest.approx(0.03, abs=1e-12)
    assert m.away_row.team_rim == -m.home_row.team_rim


def test_unattributed_fouls_count_toward_rim_not_disparity():
    events = [
        make_event(0.50, 0.60, charged=None, event_id=1),
        make_event(0.60, 0.55, charged="HOU", event_id=2),
    ]
    m = compute_game_metrics(make_game(events))
    assert m.n_calls == 2
    assert m.rim == pytest.approx(0.15, abs=1e-12)
    assert m.home_row.own_fouls == 1
    assert m.home_row.opp_fouls == 0
    assert m.home_row.disparity == -1


def test_period_bucket_rule():
    assert [period_bucket(p) for p in (1, 2, 3, 4, 5, 9)] == [
        "Q1",
        "Q2",
        "Q3",
        "Q4",
        "OT",
        "OT",
    ]


def test_period_breakdown_single_quarter():
    events = [
        make_event(0.5, 0.6, period=2, event_id=1),
        make_event(0.6, 0.55, period=2, event_id=2, charged="BOS"),
    ]
    per = period_breakdown(events, "HOU", "BOS")
    assert set(per) == {"Q1", "Q2", "Q3", "Q4", "OT"}
    assert per["Q2"].calls == 2
    assert per["Q2"].rim == pytest.approx(0.15, abs=1e-12)
    assert per["Q2"].home_disparity == 0  # one each way
    for bucket in ("Q1", "Q3", "Q4", "OT"):
        assert per[bucket].calls == 0
        assert per[bucket].rim == 0.0


def test_ot_bucket_pools_all_extra_periods():
    events = [
        make_event(0.5, 0.6, period=5, event_id=1, clock=200.0),
        make_event(0.6, 0.7, period=7, event_id=2, clock=100.0),
    ]
    per = period_breakdown(events, "HOU", "BOS")
    assert per["OT"].calls == 2
    assert per["OT"].rim == pytest.approx(0.2, abs=1e-12)


def test_period_breakdown_reconciles_with_game_totals(rng):
    for game in random_games(rng, 200):
        m = compute_game_metrics(game)
        per = m.per_period
        assert sum(p.calls for p in per.values()) == m.n_calls
        assert sum(p.rim for p in per.values()) == pytest.approx(m.rim, abs=1e-12)
        assert (
            sum(p.home_disparity for p in per.values()) == m.home_row.disparity
        )


def test_mirror_identities_random_games(rng):
    games = random_games(rng, 400)
    for game in games:
        m = compute_game_metrics(game)
        q_home = m.home_row.team_rim
        q_away = m.away_row.team_rim
        assert q_home + q_away == 0.0  # exact negation, not approximate
        assert abs(q_home) <= m.rim + 1e-12
        assert m.rim >= 0.0
        assert m.home_row.disparity == -m.away_row.disparity
        assert m.home_row.game_rim == m.away_row.game_rim


def test_rim_zero_iff_all_events_flat():
    flat = [make_event(0.4, 0.4, event_id=i) for i in range(1, 4)]
    assert game_rim(flat) == 0.0
    moved = flat + [make_event(0.4, 0.41, event_id=9)]
    assert game_rim(moved) > 0.0


def test_permutation_invariance(rng):
    games = random_games(rng, 100)
    for game in games:
        if len(game.events) < 2:
            continue
        order = rng.permutation(len(game.events))
        shuffled = make_game(
            [game.events[i] for i in order],
            home=game.home_team,
            away=game.away_team,
        )
        a = compute_game_metrics(game)
        b = compute_game_metrics(shuffled)
        assert a.n_calls == b.n_calls
        assert a.rim == pytest.approx(b.rim, abs=1e-12)
        assert a.home_row.team_rim == pytest.approx(b.home_row.team_rim, abs=1e-12)
        assert a.home_row.disparity == b.home_row.disparity


def test_expand_rows_home_first():
    game = make_game([make_event(0.5, 0.6)])
    rows = expand_rows([game])
    assert len(rows) == 2
    assert rows[0].is_home and not rows[1].is_home
    assert rows[0].team == "HOU" and rows[1].team == "BOS"
    assert rows[0].opponent == "BOS" and rows[1].opponent == "HOU"
