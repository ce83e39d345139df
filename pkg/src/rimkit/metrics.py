"""Per-game leverage metrics.

Everything here is a pure function of one game's foul events. Event
leverage is the absolute win-probability move bracketing a call; the game
total sums leverage over calls; the signed team variant sums raw moves
from one side's perspective, so the home and away values are exact
negations of each other.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .model import FoulEvent, GameRecord, TeamGameRow, canonical_series_key

HOME = "home"
AWAY = "away"

OT_BUCKET = "OT"
PERIOD_BUCKETS = ("Q1", "Q2", "Q3", "Q4", OT_BUCKET)


def period_bucket(period: int) -> str:
    """Quarters stay separate; every overtime period pools into "OT"."""
    return f"Q{period}" if 1 <= period <= 4 else OT_BUCKET


def event_leverage(pre_wp: float, post_wp: float) -> float:
    """Absolute win-probability movement attached to one call."""
    return abs(post_wp - pre_wp)


def game_rim(events: Iterable[FoulEvent]) -> float:
    """Total foul-attached win-probability movement: sum of event leverage."""
    return sum(event_leverage(e.pre_wp, e.post_wp) for e in events)


def swing_per_call(rim: float, n_calls: int) -> float | None:
    """Average leverage per call; ``None`` marks a game with no calls.

    The marker keeps zero-call games out of per-call averages instead of
    dragging them toward zero; aggregations skip ``None``.
    """
    if n_calls < 0:
        raise ValueError(f"n_calls must be >= 0, got {n_calls}")
    if n_calls == 0:
        return None
    return rim / n_calls


def signed_disparity(own_fouls: int, opp_fouls: int) -> int:
    """Foul imbalance from one team's perspective; positive favors it."""
    return opp_fouls - own_fouls


def signed_team_rim(events: Iterable[FoulEvent], perspective: str) -> float:
    """Net win-probability movement toward one side over all calls.

    Samples are stored home-side, so the away value is the exact negation
    of the home value (IEEE negation is sign-symmetric, making the mirror
    identity hold to the bit).
    """
    if perspective not in (HOME, AWAY):
        raise ValueError(f"perspective must be {HOME!r} or {AWAY!r}")
    total = 0.0
    for e in events:
        total += e.post_wp - e.pre_wp
    return total if perspective == HOME else -total


@dataclass(frozen=True, slots=True)
class PeriodMetrics:
    """One period bucket's slice: leverage total, calls, home-side imbalance."""

    rim: float
    calls: int
    home_disparity: int


def period_breakdown(
    events: Sequence[FoulEvent], home_team: str, away_team: str
) -> dict[str, PeriodMetrics]:
    """Split a game's totals by period bucket (Q1..Q4, OT).

    Every event lands in exactly one bucket, so bucket sums reconcile with
    the whole-game totals. Unattributed calls count toward rim and calls
    but not disparity.
    """
    rim = {b: 0.0 for b in PERIOD_BUCKETS}
    calls = {b: 0 for b in PERIOD_BUCKETS}
    disp = {b: 0 for b in PERIOD_BUCKETS}
    for e in events:
        b = period_bucket(e.period)
        rim[b] += event_leverage(e.pre_wp, e.post_wp)
        calls[b] += 1
        if e.charged_team == home_team:
            disp[b] -= 1
        elif e.charged_team == away_team:
            disp[b] += 1
    return {
        b: PeriodMetrics(rim=rim[b], calls=calls[b], home_disparity=disp[b])
        for b in PERIOD_BUCKETS
    }


@dataclass(frozen=True, slots=True, eq=False)
class GameMetrics:
    """Everything the aggregation layers need from one game."""

    game_id: str
    rim: float
    n_calls: int
    swing: float | None
    per_period: dict[str, PeriodMetrics]
    home_row: TeamGameRow
    away_row: TeamGameRow

    @property
    def rows(self) -> tuple[TeamGameRow, TeamGameRow]:
        return (self.home_row, self.away_row)


def compute_game_metrics(game: GameRecord) -> GameMetrics:
    """Compute all per-game quantities and both team rows in one pass."""
    rim = game_rim(game.events)
    n = len(game.events)
    home_fouls = 0
    away_fouls = 0
    for e in game.events:
        if e.charged_team == game.home_team:
            home_fouls += 1
        elif e.charged_team == game.away_team:
            away_fouls += 1
    q_home = signed_team_rim(game.events, HOME)
    q_away = signed_team_rim(game.events, AWAY)
    series_key = (
        canonical_series_key(*game.series_state)
        if game.series_state is not None
        else None
    )
    shared = dict(
        game_id=game.game_id,
        season=game.season,
        season_type=game.season_type,
        game_rim=rim,
        n_calls=n,
        series_key=series_key,
    )
    home_row = TeamGameRow(
        team=game.home_team,
        opponent=game.away_team,
        is_home=True,
        own_fouls=home_fouls,
        opp_fouls=away_fouls,
        disparity=signed_disparity(home_fouls, away_fouls),
        team_rim=q_home,
        **shared,
    )
    away_row = TeamGameRow(
        team=game.away_team,
        opponent=game.home_team,
        is_home=False,
        own_fouls=away_fouls,
        opp_fouls=home_fouls,
        disparity=signed_disparity(away_fouls, home_fouls),
        team_rim=q_away,
        **shared,
    )
    return GameMetrics(
        game_id=game.game_id,
        rim=rim,
        n_calls=n,
        swing=swing_per_call(rim, n),
        per_period=period_breakdown(game.events, game.home_team, game.away_team),
        home_row=home_row,
        away_row=away_row,
    )


def expand_rows(games: Iterable[GameRecord]) -> list[TeamGameRow]:
    """Both team rows for every game, in game order (home row first)."""
    rows: list[TeamGameRow] = []
    for g in games:
        m = compute_game_metrics(g)
        rows.append(m.home_row)
        rows.append(m.away_row)
    return rows
