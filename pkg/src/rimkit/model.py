"""Domain model for leverage-weighted officiating statistics.

Win probabilities are plain floats in [0, 1], always stored from the home
team's perspective; away-side values are derived as ``1 - w``. Validation
is data, not control flow: records must be constructible from whatever a
feed contains, and :func:`validate_game` reports rule violations for the
ingest layer to quarantine or flag.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

REGULAR = "regular"
POSTSEASON = "postseason"
SEASON_TYPES = (REGULAR, POSTSEASON)

REGULATION_PERIODS = 4
PERIOD_SECONDS = 12 * 60.0
OVERTIME_SECONDS = 5 * 60.0

MAX_SERIES_WINS = 3

# Generational suffixes keep conventional casing under name normalization.
_SUFFIXES = {"jr": "Jr.", "sr": "Sr.", "ii": "II", "iii": "III", "iv": "IV", "v": "V"}


@dataclass(frozen=True, slots=True)
class FoulEvent:
    """One whistle bracketed by win-probability samples.

    ``pre_wp`` is the last sample strictly before the call, ``post_wp`` the
    sample attached to the call itself (or the nearest one after it); both
    are home-side probabilities. ``charged_team`` is None when the feed
    cannot attribute the call to either team.
    """

    event_id: int
    period: int
    clock_seconds_remaining: float
    charged_team: str | None
    pre_wp: float
    post_wp: float
    description: str = ""


@dataclass(frozen=True, slots=True, order=True)
class SeriesStateKey:
    """Pregame playoff series score with mirrored orderings collapsed.

    ``(2, 1)`` and ``(1, 2)`` both canonicalize to ``lo=1, hi=2``; ordering
    is plain tuple order on ``(lo, hi)``, which puts 0--0 first.
    """

    lo: int
    hi: int

    @property
    def label(self) -> str:
        return f"{self.lo}--{self.hi}"


def canonical_series_key(home_wins: int, away_wins: int) -> SeriesStateKey:
    """Collapse a pregame series score over home/away orientation."""
    for name, wins in (("home_wins", home_wins), ("away_wins", away_wins)):
        if not 0 <= wins <= MAX_SERIES_WINS:
            raise ValueError(f"{name} must be in 0..{MAX_SERIES_WINS}, got {wins}")
    return SeriesStateKey(min(home_wins, away_wins), max(home_wins, away_wins))


def all_series_keys() -> list[SeriesStateKey]:
    """Every reachable canonical pregame state, ascending."""
    return [
        SeriesStateKey(lo, hi)
        for lo in range(MAX_SERIES_WINS + 1)
        for hi in range(lo, MAX_SERIES_WINS + 1)
    ]


@dataclass(frozen=True, slots=True)
class GameRecord:
    """One game: identity, crew, aligned foul events, optional series state.

    ``events`` hold only fouls that survived alignment, in feed order;
    ``series_state`` is the raw pregame ``(home_wins, away_wins)`` pair and
    is only meaningful for postseason games.
    """

    game_id: str
    season: str
    season_type: str
    home_team: str
    away_team: str
    crew: tuple[str, ...]
    events: tuple[FoulEvent, ...]
    series_state: tuple[int, int] | None = None


@dataclass(frozen=True, slots=True)
class TeamGameRow:
    """One team's side of one game, the unit of every panel downstream.

    ``disparity`` is opponent fouls minus own fouls (positive favors
    ``team``); ``team_rim`` is the net win-probability movement toward
    ``team`` over all calls. The two rows of a game are exact mirrors:
    disparity and team_rim negate, shared game-level fields match.
    """

    game_id: str
    team: str
    opponent: str
    is_home: bool
    season: str
    season_type: str
    own_fouls: int
    opp_fouls: int
    disparity: int
    team_rim: float
    game_rim: float
    n_calls: int
    series_key: SeriesStateKey | None = None


def _period_length(period: int) -> float:
    return PERIOD_SECONDS if period <= REGULATION_PERIODS else OVERTIME_SECONDS


def validate_game(record: GameRecord) -> list[str]:
    """Check every record rule, returning one message per violation.

    Violations are data for the caller to act on, never exceptions: a
    record holding out-of-range feed values must still be constructible so
    the problem can be reported and the game quarantined. The empty-crew
    rule is special-cased upstream (such games stay usable for team-level
    analysis); every message is prefixed with the offending field.
    """
    problems: list[str] = []
    if record.season_type not in SEASON_TYPES:
        problems.append(
            f"season_type: {record.season_type!r} not one of {SEASON_TYPES}"
        )
    if not record.game_id:
        problems.append("game_id: empty")
    if not record.home_team or not record.away_team:
        problems.append("teams: home and away ids must be non-empty")
    elif record.home_team == record.away_team:
        problems.append(f"teams: home and away are both {record.home_team!r}")
    if not record.crew:
        problems.append("crew: empty; game cannot join referee analyses")

    prev: FoulEvent | None = None
    for i, ev in enumerate(record.events):
        tag = f"events[{i}]"
        if ev.period < 1:
            problems.append(f"{tag}.period: {ev.period} below 1")
        else:
            limit = _period_length(ev.period)
            if not 0.0 <= ev.clock_seconds_remaining <= limit:
                problems.append(
                    f"{tag}.clock_seconds_remaining: "
                    f"{ev.clock_seconds_remaining} outside [0, {limit}]"
                )
        for field_name, wp in (("pre_wp", ev.pre_wp), ("post_wp", ev.post_wp)):
            if not 0.0 <= wp <= 1.0:
                problems.append(
                    f"{tag}.{field_name}: win probability {wp} outside [0, 1]"
                )
        if ev.charged_team is not None and ev.charged_team not in (
            record.home_team,
            record.away_team,
        ):
            problems.append(
                f"{tag}.charged_team: {ev.charged_team!r} is neither side"
            )
        if prev is not None:
            out_of_order = ev.period < prev.period or (
                ev.period == prev.period
                and ev.clock_seconds_remaining > prev.clock_seconds_remaining
            )
            # Ties (same period, same clock) keep feed order and are legal.
            if out_of_order:
                problems.append(
                    f"{tag}: out of order (period asc, clock desc violated)"
                )
        prev = ev

    state = record.series_state
    if state is not None:
        if record.season_type != POSTSEASON:
            problems.append("series_state: present on a non-postseason game")
        hw, aw = state
        for side, wins in (("home_wins", hw), ("away_wins", aw)):
            if not 0 <= wins <= MAX_SERIES_WINS:
                problems.append(
                    f"series_state.{side}: {wins} outside 0..{MAX_SERIES_WINS}"
                )
    return problems


def is_no_crew_only(violations: list[str]) -> bool:
    """True when the only problem is an empty crew (soft flag, not fatal)."""
    return len(violations) == 1 and violations[0].startswith("crew:")


def canonicalize_name(raw: str, aliases: Mapping[str, str] | None = None) -> str:
    """Normalize a referee name: trim, collapse whitespace, fix casing.

    All-upper or all-lower tokens are recased to leading capital; tokens the
    feed already mixes ("DeRosa") pass through; generational suffixes get
    their conventional form. ``aliases`` maps normalized output to a
    preferred replacement for known feed variants.
    """
    tokens = raw.split()
    out: list[str] = []
    for tok in tokens:
        bare = tok.rstrip(".").lower()
        if bare in _SUFFIXES:
            out.append(_SUFFIXES[bare])
        elif tok.isupper() and len(tok) <= 2:
            out.append(tok)  # initials ("JB", "CJ") keep their caps
        elif tok.isupper() or tok.islower():
            out.append(tok[:1].upper() + tok[1:].lower())
        else:
            out.append(tok)
    name = " ".join(out)
    if aliases:
        name = aliases.get(name, name)
    return name
