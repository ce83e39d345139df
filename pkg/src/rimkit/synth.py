"""Synthetic corpora with known ground truth.

The generator is an estimator test rig, not a basketball model: it draws
foul counts and bounded win-probability moves so that configured effects
enter the observable outcomes at known sizes. Corpora are written in the
same canonical dataset format ingest produces, alongside a ledger of every
injected parameter. Determinism is strict: the same config yields a
byte-identical corpus, via counter-based per-game seeds.

``oracle_recompute`` and ``oracle_excess`` re-derive the headline
quantities with deliberately plain, self-contained arithmetic — no kernels
shared with the metrics or outliers modules — so equivalence tests compare
two independent code paths.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import (
    POSTSEASON,
    REGULAR,
    FoulEvent,
    GameRecord,
    TeamGameRow,
)
from .outliers import PanelRow


class SimConfigError(ValueError):
    """Raised for infeasible simulation configs."""


@dataclass(frozen=True)
class SimConfig:
    """Knobs for one synthetic corpus; every field has a reproducible default.

    Injected effects:

    * ``team_home_shift``: extra expected foul disparity (in fouls) a team
      receives in its home games.
    * ``pair_shift``: extra expected signed team RIM (win-probability
      units per game) a team receives when a given referee works its game,
      keyed ``(referee, team)``.
    * ``series_shift``: extra expected game RIM for postseason games at a
      canonical pregame series state, keyed ``(lo, hi)``.
    """

    seed: int = 0
    n_teams: int = 30
    n_referees: int = 70
    crew_size: int = 3
    games_per_season: int = 1230
    postseason_games_per_season: int = 0
    seasons: tuple[str, ...] = ("2021-22",)
    fouls_mean: float = 40.0
    fouls_dispersion: float = 0.0
    move_scale: float = 0.04
    move_alpha: float = 1.3
    move_beta: float = 5.0
    benefit_prob: float = 0.65
    start_wp_jitter: float = 0.06
    overtime_rate: float = 0.04
    unattributed_rate: float = 0.0
    missing_series_rate: float = 0.0
    team_home_shift: Mapping[str, float] = field(default_factory=dict)
    pair_shift: Mapping[tuple[str, str], float] = field(default_factory=dict)
    series_shift: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def validate(self) -> None:
        if self.seed < 0:
            raise SimConfigError("seed must be non-negative")
        if self.n_teams < 2:
            raise SimConfigError("need at least two teams")
        if self.crew_size < 1 or self.crew_size > self.n_referees:
            raise SimConfigError(
                f"crew_size {self.crew_size} infeasible with "
                f"{self.n_referees} referees"
            )
        if not self.seasons:
            raise SimConfigError("need at least one season label")
        if self.fouls_mean < 0 or self.fouls_dispersion < 0:
            raise SimConfigError("foul distribution parameters must be >= 0")
        if not 0.0 <= self.benefit_prob <= 1.0:
            raise SimConfigError("benefit_prob must be a probability")
        if self.move_scale < 0 or self.move_alpha <= 0 or self.move_beta <= 0:
            raise SimConfigError("move distribution parameters out of range")


def team_name(i: int) -> str:
    return f"T{i + 1:02d}"


def referee_name(i: int) -> str:
    return f"Ref{i + 1:02d}"


def _draw_fouls(rng: np.random.Generator, cfg: SimConfig) -> int:
    if cfg.fouls_mean == 0:
        return 0
    if cfg.fouls_dispersion > 0:
        # Gamma-Poisson mixture: overdispersed counts with the given mean.
        shape = 1.0 / cfg.fouls_dispersion
        lam = rng.gamma(shape, cfg.fouls_mean / shape)
        return int(rng.poisson(lam))
    return int(rng.poisson(cfg.fouls_mean))


def _generate_game(
    cfg: SimConfig,
    game_id: str,
    season: str,
    season_type: str,
    index: int,
) -> GameRecord:
    rng = np.random.default_rng([cfg.seed, index])

    home_i, away_i = rng.choice(cfg.n_teams, size=2, replace=False)
    home, away = team_name(int(home_i)), team_name(int(away_i))
    crew_idx = np.sort(rng.choice(cfg.n_referees, size=cfg.crew_size, replace=False))
    crew = tuple(referee_name(int(i)) for i in crew_idx)

    series_state: tuple[int, int] | None = None
    if season_type == POSTSEASON:
        hw, aw = rng.integers(0, 4, size=2)
        series_state = (int(hw), int(aw))
        if cfg.missing_series_rate > 0 and rng.random() < cfg.missing_series_rate:
            series_state = None

    n = _draw_fouls(rng, cfg)
    if n == 0:
        return GameRecord(
            game_id=game_id,
            season=season,
            season_type=season_type,
            home_team=home,
            away_team=away,
            crew=crew,
            events=(),
            series_state=series_state,
        )

    unattributed = (
        rng.random(n) < cfg.unattributed_rate
        if cfg.unattributed_rate > 0
        else np.zeros(n, dtype=bool)
    )
    n_attr = int(n - unattributed.sum())
    home_delta = float(cfg.team_home_shift.get(home, 0.0))
    p_home_charge = 0.5
    if n_attr > 0:
        # E[opponent fouls - own fouls] for the home side equals home_delta.
        p_home_charge = min(max(0.5 - home_delta / (2.0 * n_attr), 0.01), 0.99)
    charge_home = rng.random(n) < p_home_charge

    ot = min(max(cfg.overtime_rate, 0.0), 1.0)
    period_probs = [(1.0 - ot) / 4.0] * 4 + [ot]
    period_draw = rng.choice(5, size=n, p=period_probs)
    periods = np.where(period_draw < 4, period_draw + 1, 5)
    clocks = np.where(
        periods <= 4, rng.uniform(0.0, 720.0, size=n), rng.uniform(0.0, 300.0, size=n)
    )
    order = np.lexsort((-clocks, periods))

    magnitudes = rng.beta(cfg.move_alpha, cfg.move_beta, size=n) * cfg.move_scale
    toward_benefit = rng.random(n) < cfg.benefit_prob
    coin = rng.random(n) < 0.5

    drift_home = 0.0
    if cfg.pair_shift:
        for ref in crew:
            drift_home += float(cfg.pair_shift.get((ref, home), 0.0))
            drift_home -= float(cfg.pair_shift.get((ref, away), 0.0))
    rim_shift = 0.0
    if cfg.series_shift and series_state is not None:
        lo, hi = sorted(series_state)
        rim_shift = float(cfg.series_shift.get((lo, hi), 0.0))

    w = 0.5 + float(rng.uniform(-cfg.start_wp_jitter, cfg.start_wp_jitter))
    w = min(max(w, 0.0), 1.0)
    events: list[FoulEvent] = []
    for k, j in enumerate(order):
        if unattributed[j]:
            charged: str | None = None
            benefit_sign = 1.0 if coin[j] else -1.0
        elif charge_home[j]:
            charged = home
            benefit_sign = -1.0  # a call on the home side favors the away side
        else:
            charged = away
            benefit_sign = 1.0
        sign = benefit_sign if toward_benefit[j] else -benefit_sign
        mag = max(magnitudes[j] + rim_shift / n, 0.0)
        pre = w
        post = min(max(pre + sign * mag + drift_home / n, 0.0), 1.0)
        desc = f"Foul on {charged}" if charged else "Foul (unattributed)"
        events.append(
            FoulEvent(
                event_id=k + 1,
                period=int(periods[j]),
                clock_seconds_remaining=float(clocks[j]),
                charged_team=charged,
                pre_wp=pre,
                post_wp=post,
                description=desc,
            )
        )
        w = post

    return GameRecord(
        game_id=game_id,
        season=season,
        season_type=season_type,
        home_team=home,
        away_team=away,
        crew=crew,
        events=tuple(events),
        series_state=series_state,
    )


def ground_truth_ledger(cfg: SimConfig) -> dict:
    """Every injected parameter, in a stable serializable shape."""
    return {
        "seed": cfg.seed,
        "team_home_shift": {t: v for t, v in sorted(cfg.team_home_shift.items())},
        "pair_shift": [
            {"referee": r, "team": t, "shift": v}
            for (r, t), v in sorted(cfg.pair_shift.items())
        ],
        "series_shift": [
            {"state": f"{lo}--{hi}", "shift": v}
            for (lo, hi), v in sorted(cfg.series_shift.items())
        ],
    }


def generate(cfg: SimConfig) -> tuple[list[GameRecord], dict]:
    """Build the full corpus for ``cfg``; returns (games, ground-truth ledger).

    Game seeds are derived from (config seed, global game counter), so any
    prefix of the corpus is stable under config changes that only extend it.
    """
    cfg.validate()
    games: list[GameRecord] = []
    index = 0
    for season in cfg.seasons:
        for local in range(cfg.games_per_season):
            gid = f"{season}-reg-{local:05d}"
            games.append(_generate_game(cfg, gid, season, REGULAR, index))
            index += 1
        for local in range(cfg.postseason_games_per_season):
            gid = f"{season}-post-{local:05d}"
            games.append(_generate_game(cfg, gid, season, POSTSEASON, index))
            index += 1
    return games, ground_truth_ledger(cfg)


def write_corpus(cfg: SimConfig, root: Path):
    """Generate and persist a corpus: canonical dataset plus ledger.json."""
    from .ingest import write_dataset  # local import keeps module load light

    games, ledger = generate(cfg)
    manifest = write_dataset(games, root)
    ledger_path = Path(root) / "ledger.json"
    ledger_path.write_text(
        json.dumps(ledger, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return games, ledger, manifest


# ---------------------------------------------------------------------------
# Independent oracles (no shared kernels with metrics/outliers)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class OracleGame:
    game_id: str
    rim: float
    n_calls: int
    swing: float | None
    home_disparity: int
    home_team_rim: float
    period_rim: dict[str, float]


def oracle_recompute(games: Sequence[GameRecord]) -> dict[str, OracleGame]:
    """Re-derive per-game quantities with plain single-pass arithmetic."""
    out: dict[str, OracleGame] = {}
    for g in games:
        rim = 0.0
        q_home = 0.0
        home_fouls = 0
        away_fouls = 0
        period_rim = {"Q1": 0.0, "Q2": 0.0, "Q3": 0.0, "Q4": 0.0, "OT": 0.0}
        for e in g.events:
            d = e.post_wp - e.pre_wp
            rim += d if d >= 0 else -d
            q_home += d
            if e.charged_team == g.home_team:
                home_fouls += 1
            elif e.charged_team == g.away_team:
                away_fouls += 1
            label = "Q%d" % e.period if 1 <= e.period <= 4 else "OT"
            period_rim[label] += d if d >= 0 else -d
        n = len(g.events)
        out[g.game_id] = OracleGame(
            game_id=g.game_id,
            rim=rim,
            n_calls=n,
            swing=(rim / n) if n else None,
            home_disparity=away_fouls - home_fouls,
            home_team_rim=q_home,
            period_rim=period_rim,
        )
    return out


def oracle_excess(
    games: Sequence[GameRecord], metric: str = "team_rim"
) -> dict[tuple[str, str], float]:
    """Re-derive referee-team excess values from scratch.

    Independent grouping and averaging: referee / team / global means are
    taken over (referee, team-side, game) rows, and the excess is
    observed − (referee mean + team mean − global mean).
    """
    if metric not in ("team_rim", "disparity"):
        raise ValueError(f"unknown metric {metric!r}")
    rows: list[tuple[str, str, float]] = []
    for g in games:
        if not g.crew:
            continue
        q_home = 0.0
        hf = 0
        af = 0
        for e in g.events:
            q_home += e.post_wp - e.pre_wp
            if e.charged_team == g.home_team:
                hf += 1
            elif e.charged_team == g.away_team:
                af += 1
        if metric == "team_rim":
            home_val, away_val = q_home, -q_home
        else:
            home_val, away_val = float(af - hf), float(hf - af)
        for ref in g.crew:
            rows.append((ref, g.home_team, home_val))
            rows.append((ref, g.away_team, away_val))

    ref_sum: dict[str, list[float]] = {}
    team_sum: dict[str, list[float]] = {}
    pair_sum: dict[tuple[str, str], list[float]] = {}
    total = 0.0
    for ref, team, val in rows:
        ref_sum.setdefault(ref, [0.0, 0])
        team_sum.setdefault(team, [0.0, 0])
        pair_sum.setdefault((ref, team), [0.0, 0])
        ref_sum[ref][0] += val
        ref_sum[ref][1] += 1
        team_sum[team][0] += val
        team_sum[team][1] += 1
        pair_sum[(ref, team)][0] += val
        pair_sum[(ref, team)][1] += 1
        total += val
    if not rows:
        return {}
    m = total / len(rows)
    out: dict[tuple[str, str], float] = {}
    for (ref, team), (s, c) in pair_sum.items():
        a = ref_sum[ref][0] / ref_sum[ref][1]
        b = team_sum[team][0] / team_sum[team][1]
        out[(ref, team)] = s / c - (a + b - m)
    return out


# ---------------------------------------------------------------------------
# Row-level rigs for estimator Monte Carlo studies
# ---------------------------------------------------------------------------


def simulate_team_side_rows(
    rng: np.random.Generator,
    *,
    n_games: int,
    n_teams: int = 30,
    season: str = "S1",
    season_type: str = REGULAR,
    home_disparity_shift: Mapping[str, float] | None = None,
    fouls_mean: float = 40.0,
    rim_sd: float = 0.08,
) -> list[TeamGameRow]:
    """Team-game rows from a known disparity model, mirrors included.

    Foul counts are Poisson on each side with the home side's rate tilted
    so the expected home disparity equals the configured shift exactly.
    """
    shifts = home_disparity_shift or {}
    rows: list[TeamGameRow] = []
    half = fouls_mean / 2.0
    for i in range(n_games):
        hi, ai = rng.choice(n_teams, size=2, replace=False)
        home, away = team_name(int(hi)), team_name(int(ai))
        delta = float(shifts.get(home, 0.0))
        f_home = int(rng.poisson(max(half - delta / 2.0, 0.1)))
        f_away = int(rng.poisson(max(half + delta / 2.0, 0.1)))
        q_home = float(rng.normal(0.0, rim_sd))
        rim = abs(q_home) + float(rng.gamma(2.0, 0.05))
        gid = f"{season}-mc-{i:05d}"
        shared = dict(
            game_id=gid,
            season=season,
            season_type=season_type,
            game_rim=rim,
            n_calls=f_home + f_away,
            series_key=None,
        )
        rows.append(
            TeamGameRow(
                team=home,
                opponent=away,
                is_home=True,
                own_fouls=f_home,
                opp_fouls=f_away,
                disparity=f_away - f_home,
                team_rim=q_home,
                **shared,
            )
        )
        rows.append(
            TeamGameRow(
                team=away,
                opponent=home,
                is_home=False,
                own_fouls=f_away,
                opp_fouls=f_home,
                disparity=f_home - f_away,
                team_rim=-q_home,
                **shared,
            )
        )
    return rows


def simulate_ref_team_panel(
    rng: np.random.Generator,
    *,
    n_games: int,
    n_teams: int = 20,
    n_referees: int = 20,
    crew_size: int = 3,
    season: str = "S1",
    pair_shift: Mapping[tuple[str, str], float] | None = None,
    referee_effects: Mapping[str, float] | None = None,
    team_effects: Mapping[str, float] | None = None,
    game_sd: float = 0.05,
    row_sd: float = 0.02,
) -> list[PanelRow]:
    """Referee-team-game rows from a known additive model plus pair effects.

    A shared per-game shock (sign-flipped across sides) gives clusters real
    within-game correlation; row noise sits on top.
    """
    pairs = pair_shift or {}
    ref_eff = referee_effects or {}
    team_eff = team_effects or {}
    rows: list[PanelRow] = []
    for i in range(n_games):
        hi, ai = rng.choice(n_teams, size=2, replace=False)
        home, away = team_name(int(hi)), team_name(int(ai))
        crew = [referee_name(int(r)) for r in rng.choice(n_referees, size=crew_size, replace=False)]
        g_shock = float(rng.normal(0.0, game_sd))
        gid = f"{season}-pnl-{i:05d}"
        disparity = float(rng.normal(0.0, 4.0))
        for ref in crew:
            for team, opp, is_home, side_sign, disp in (
                (home, away, True, 1.0, disparity),
                (away, home, False, -1.0, -disparity),
            ):
                y = (
                    float(ref_eff.get(ref, 0.0))
                    + float(team_eff.get(team, 0.0))
                    + float(pairs.get((ref, team), 0.0))
                    + side_sign * g_shock
                    + float(rng.normal(0.0, row_sd))
                )
                rows.append(
                    PanelRow(
                        game_id=gid,
                        season=season,
                        season_type=REGULAR,
                        referee=ref,
                        team=team,
                        opponent=opp,
                        is_home=is_home,
                        team_rim=y,
                        disparity=disp,
                    )
                )
    return rows
