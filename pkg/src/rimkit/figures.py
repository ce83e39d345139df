"""Figure-data emission: one delimited text file per published figure.

Every file opens with '#'-prefixed comment lines (column descriptions plus
the screening disclaimer), followed by a single CSV header row and data
rows. Output is deterministic: fixed orderings, fixed 6-decimal numeric
formatting, UTF-8 with LF endings, no timestamps.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

from .aggregate import (
    component_check_tables,
    home_away_summary,
    referee_distribution,
    series_state_summary,
    top_bottom_table,
)
from .inference import (
    DesignError,
    FitError,
    FitResult,
    TeamSideTarget,
    ref_team_residual_effects,
    series_state_effects,
    team_side_effects,
)
from .metrics import expand_rows
from .model import POSTSEASON, REGULAR, GameRecord
from .outliers import build_cells, outlier_tables, panel_rows

DISCLAIMER = (
    "Screening statistics: leverage-weighted impact and association measures; "
    "not evidence of referee bias or intent."
)

FIGURE_FILES = (
    "fig1_rim_distribution",
    "fig2_component_calls_swing",
    "fig3_top_bottom",
    "fig4_volume_swing",
    "fig5_quarter_rim",
    "fig6_series_summary",
    "fig7_postseason_distribution",
    "fig8_home_away",
    "fig9_team_home_away",
    "fig10_ref_team_rim_outliers",
    "fig11_ref_team_disp_outliers",
    "fig12_series_effects",
    "fig13_team_side_effects",
    "fig14_ref_team_effects",
    "figA1_component_no_min",
    "figA2_quarter_disparity",
    "figA3_ref_team_z_map",
    "figA4_excess_scatter",
)


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # "str" | "int" | "num"
    description: str


def format_value(value, kind: str) -> str:
    if value is None:
        return ""
    if kind == "int":
        return str(int(value))
    if kind == "num":
        return f"{float(value):.6f}"
    return str(value)


def write_table(
    path: Path,
    columns: Sequence[Column],
    rows: Iterable[Sequence],
    *,
    notes: Sequence[str] = (),
) -> None:
    buf = io.StringIO()
    for c in columns:
        buf.write(f"# {c.name}: {c.description}\n")
    for note in notes:
        buf.write(f"# note: {note}\n")
    buf.write(f"# {DISCLAIMER}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([c.name for c in columns])
    for row in rows:
        writer.writerow([format_value(v, c.kind) for v, c in zip(row, columns)])
    Path(path).write_bytes(buf.getvalue().encode("utf-8"))


def read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    """Parse one emitted file back: (header, data rows), comments skipped."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln and not ln.startswith("#")]
    parsed = list(csv.reader(lines))
    if not parsed:
        raise ValueError(f"{path}: no header row")
    return parsed[0], parsed[1:]


@dataclass
class ValidationReport:
    files: dict[str, int]
    issues: list[str]

    @property
    def ok(self) -> bool:
        return not self.issues


def validate_output_dir(out_dir: Path) -> ValidationReport:
    """Re-parse every CSV in a directory, checking shape consistency."""
    out_dir = Path(out_dir)
    files: dict[str, int] = {}
    issues: list[str] = []
    paths = sorted(out_dir.glob("*.csv"))
    if not paths:
        issues.append(f"{out_dir}: no .csv outputs found")
    for path in paths:
        try:
            header, rows = read_table(path)
        except (ValueError, csv.Error) as e:
            issues.append(f"{path.name}: {e}")
            continue
        if len(set(header)) != len(header):
            issues.append(f"{path.name}: duplicate column names")
        width = len(header)
        for i, row in enumerate(rows):
            if len(row) != width:
                issues.append(
                    f"{path.name}: row {i + 1} has {len(row)} fields, "
                    f"header has {width}"
                )
                break
        files[path.name] = len(rows)
    return ValidationReport(files=files, issues=issues)


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FigureOptions:
    min_games_regular: int = 50
    min_games_postseason: int = 15
    min_pair_games: int = 5
    table_k: int = 10
    pair_k: int = 5
    team_side_k: int = 3
    target_form: str = "indicator"
    small_sample: str = "cr1"
    dof_mode: str = "residual"


@dataclass
class FigureRunReport:
    written: list[str]
    skipped: dict[str, str]


def _band_columns() -> list[Column]:
    return [
        Column("referee", "str", "crew member, canonical name"),
        Column("games", "int", "games worked in the slice"),
        Column("mean_rim", "num", "mean per-game total call leverage"),
        Column("mean_calls_per_game", "num", "mean calls per game"),
        Column(
            "mean_swing_per_call_pct",
            "num",
            "mean per-call leverage, percentage points (zero-call games skipped)",
        ),
        Column("mean_abs_disparity", "num", "mean absolute foul disparity"),
        Column("band_mean", "num", "mean of qualified referees' mean RIM"),
        Column("band_sd", "num", "sample sd of qualified referees' mean RIM"),
        Column("band_lower", "num", "band mean minus one sd"),
        Column("band_upper", "num", "band mean plus one sd"),
    ]


def _distribution_rows(summaries, band):
    out = []
    for s in summaries:
        swing_pct = (
            s.mean_swing_per_call * 100.0 if s.mean_swing_per_call is not None else None
        )
        out.append(
            (
                s.referee,
                s.games,
                s.mean_rim,
                s.mean_calls_per_game,
                swing_pct,
                s.mean_abs_disparity,
                band.mean,
                band.sd,
                band.lower,
                band.upper,
            )
        )
    return out


def _scatter_table(path, series, *, notes=()):
    cols = [
        Column("referee", "str", "crew member, canonical name"),
        Column(series.x_name, "num", "x value"),
        Column(
            series.y_name + ("_pct" if series.y_name == "mean_swing_per_call" else ""),
            "num",
            "y value (per-call leverage shown in percentage points)",
        ),
        Column("pearson_r", "num", "Pearson correlation over all rows (blank if undefined)"),
    ]
    scale = 100.0 if series.y_name == "mean_swing_per_call" else 1.0
    rows = [
        (name, x, y * scale, series.correlation) for name, x, y in series.points
    ]
    write_table(path, cols, rows, notes=notes)


def _fit_term_rows(fits: dict[str, FitResult], keep) -> list[tuple]:
    rows = []
    for outcome in sorted(fits):
        fit = fits[outcome]
        for c in fit.coef_rows():
            if keep(c.term):
                rows.append(
                    (
                        outcome,
                        c.term,
                        c.estimate,
                        c.se,
                        c.t_stat,
                        c.ci_lower,
                        c.ci_upper,
                        c.rho,
                        fit.n_rows,
                        fit.n_clusters,
                        fit.dof,
                    )
                )
    return rows


_FIT_COLUMNS = [
    Column("outcome", "str", "fitted outcome"),
    Column("term", "str", "coefficient"),
    Column("estimate", "num", "point estimate"),
    Column("se", "num", "cluster-robust standard error"),
    Column("t_stat", "num", "estimate / se"),
    Column("ci_lower", "num", "95% interval lower bound"),
    Column("ci_upper", "num", "95% interval upper bound"),
    Column("rho", "num", "equal-strength confounder association that zeros t"),
    Column("n_rows", "int", "observations in the fit"),
    Column("n_clusters", "int", "games (clusters)"),
    Column("dof", "int", "degrees of freedom for intervals"),
]


def select_team_side_targets(teams, k: int) -> list[TeamSideTarget]:
    """Deterministic default targets: largest |home| and |away| mean disparity."""
    home_ranked = sorted(
        (t for t in teams if t.home_mean_disparity is not None),
        key=lambda t: (-abs(t.home_mean_disparity), t.team),
    )
    away_ranked = sorted(
        (t for t in teams if t.away_mean_disparity is not None),
        key=lambda t: (-abs(t.away_mean_disparity), t.team),
    )
    targets = [TeamSideTarget(t.team, "home") for t in home_ranked[:k]]
    targets += [TeamSideTarget(t.team, "away") for t in away_ranked[:k]]
    return targets


def select_outlier_pairs(tables, k: int):
    """Top-|excess| pairs per metric, deduplicated, order-stable."""
    seen = set()
    pairs = []
    for cell in list(tables.top_rim[:k]) + list(tables.top_disparity[:k]):
        key = (cell.referee, cell.team)
        if key not in seen:
            seen.add(key)
            pairs.append(key)
    return pairs


def emit_figures(
    games: Sequence[GameRecord], out_dir: Path, opts: FigureOptions
) -> FigureRunReport:
    """Write every figure file the corpus supports into ``out_dir``.

    Postseason figures are skipped (with a reason) when the corpus has no
    postseason games; everything else always emits, even with zero data
    rows, so downstream tooling sees a stable file set.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = FigureRunReport(written=[], skipped={})

    regular = [g for g in games if g.season_type == REGULAR]
    post = [g for g in games if g.season_type == POSTSEASON]
    all_rows = expand_rows(games)
    reg_rows = [r for r in all_rows if r.season_type == REGULAR]
    post_rows = [r for r in all_rows if r.season_type == POSTSEASON]

    def done(name: str):
        report.written.append(name)

    def path(name: str) -> Path:
        return out_dir / f"{name}.csv"

    # --- referee distributions -------------------------------------------
    summaries, band = referee_distribution(regular, REGULAR, opts.min_games_regular)
    if band is None:
        report.skipped["fig1_rim_distribution"] = "no qualified regular-season referees"
    else:
        write_table(
            path("fig1_rim_distribution"),
            _band_columns(),
            _distribution_rows(summaries, band),
            notes=[f"minimum games: {opts.min_games_regular}"],
        )
        done("fig1_rim_distribution")

    checks = component_check_tables(summaries)
    _scatter_table(
        path("fig2_component_calls_swing"),
        checks.calls_vs_swing,
        notes=[f"minimum games: {opts.min_games_regular}"],
    )
    done("fig2_component_calls_swing")

    table = top_bottom_table(summaries, opts.table_k)
    write_table(
        path("fig3_top_bottom"),
        [
            Column("section", "str", "bottom / mean / top"),
            Column("rank", "int", "1 = most extreme within section"),
            Column("referee", "str", "crew member (or pooled label)"),
            Column("games", "int", "games worked (blank on the mean row)"),
            Column("mean_rim", "num", "mean per-game total call leverage"),
        ],
        [(e.section, e.rank, e.label, e.games, e.value) for e in table.entries],
        notes=(["fewer than 2k qualified referees; sections overlap"] if table.truncated else []),
    )
    done("fig3_top_bottom")

    calls_rank = {
        s.referee: i + 1
        for i, s in enumerate(
            sorted(summaries, key=lambda s: (-s.mean_calls_per_game, s.referee))
        )
    }
    swing_sorted = sorted(
        (s for s in summaries if s.mean_swing_per_call is not None),
        key=lambda s: (-(s.mean_swing_per_call or 0.0), s.referee),
    )
    swing_rank = {s.referee: i + 1 for i, s in enumerate(swing_sorted)}
    write_table(
        path("fig4_volume_swing"),
        [
            Column("referee", "str", "crew member, canonical name"),
            Column("games", "int", "games worked"),
            Column("mean_calls_per_game", "num", "volume component"),
            Column("calls_rank", "int", "rank by volume, 1 highest"),
            Column("mean_swing_per_call_pct", "num", "per-call leverage, percentage points"),
            Column("swing_rank", "int", "rank by per-call leverage, 1 highest"),
        ],
        [
            (
                s.referee,
                s.games,
                s.mean_calls_per_game,
                calls_rank[s.referee],
                (s.mean_swing_per_call or 0.0) * 100.0
                if s.mean_swing_per_call is not None
                else None,
                swing_rank.get(s.referee),
            )
            for s in sorted(summaries, key=lambda s: calls_rank[s.referee])
        ],
    )
    done("fig4_volume_swing")

    quarter_cols = [
        Column("referee", "str", "crew member, canonical name"),
        Column("games", "int", "games worked"),
    ] + [
        Column(f"rim_{b.lower()}", "num", f"mean {b} call leverage per game")
        for b in ("Q1", "Q2", "Q3", "Q4", "OT")
    ]
    write_table(
        path("fig5_quarter_rim"),
        quarter_cols,
        [
            (
                s.referee,
                s.games,
                s.per_quarter_rim["Q1"],
                s.per_quarter_rim["Q2"],
                s.per_quarter_rim["Q3"],
                s.per_quarter_rim["Q4"],
                s.per_quarter_rim["OT"],
            )
            for s in summaries
        ],
    )
    done("fig5_quarter_rim")

    # --- postseason ---------------------------------------------------------
    if not post:
        for name in ("fig6_series_summary", "fig7_postseason_distribution", "fig12_series_effects"):
            report.skipped[name] = "no postseason games in the corpus"
    else:
        series = series_state_summary(post_rows)
        write_table(
            path("fig6_series_summary"),
            [
                Column("series_state", "str", "canonical pregame series score (lo--hi)"),
                Column("games", "int", "games at the state"),
                Column("team_rows", "int", "team-game observations at the state"),
                Column("mean_abs_disparity", "num", "mean absolute foul disparity"),
                Column("mean_game_rim", "num", "mean total call leverage"),
                Column("games_missing_state", "int", "postseason games lacking a state"),
            ],
            [
                (
                    b.key.label,
                    b.games,
                    b.team_rows,
                    b.mean_abs_disparity,
                    b.mean_game_rim,
                    series.games_missing_state,
                )
                for b in series.buckets
            ],
        )
        done("fig6_series_summary")

        post_summaries, post_band = referee_distribution(
            post, POSTSEASON, opts.min_games_postseason
        )
        if post_band is None:
            report.skipped["fig7_postseason_distribution"] = (
                "no referee meets the postseason minimum"
            )
        else:
            write_table(
                path("fig7_postseason_distribution"),
                _band_columns(),
                _distribution_rows(post_summaries, post_band),
                notes=[f"minimum games: {opts.min_games_postseason}"],
            )
            done("fig7_postseason_distribution")

        try:
            series_fits = series_state_effects(
                post_rows,
                small_sample=opts.small_sample,
                dof_mode=opts.dof_mode,
            )
        except (DesignError, FitError) as e:
            report.skipped["fig12_series_effects"] = str(e)
        else:
            write_table(
                path("fig12_series_effects"),
                _FIT_COLUMNS,
                _fit_term_rows(series_fits, lambda t: t.startswith("series_")),
                notes=["reference level 0--0; controls: home team, away team, season"],
            )
            done("fig12_series_effects")

    # --- home/away ----------------------------------------------------------
    ha = home_away_summary(all_rows)
    write_table(
        path("fig8_home_away"),
        [
            Column("season_type", "str", "regular or postseason"),
            Column("side", "str", "home or away"),
            Column("n_rows", "int", "team-game observations"),
            Column("mean_disparity", "num", "mean signed foul disparity"),
            Column("mean_team_rim", "num", "mean signed team call leverage"),
        ],
        [
            (s.season_type, s.side, s.n_rows, s.mean_disparity, s.mean_team_rim)
            for s in ha.league
        ],
    )
    done("fig8_home_away")

    ha_reg = home_away_summary(reg_rows, REGULAR)
    write_table(
        path("fig9_team_home_away"),
        [
            Column("team", "str", "team id"),
            Column("home_games", "int", "home games"),
            Column("away_games", "int", "away games"),
            Column("home_mean_disparity", "num", "mean signed disparity at home"),
            Column("away_mean_disparity", "num", "mean signed disparity away"),
            Column("home_mean_team_rim", "num", "mean signed team leverage at home"),
            Column("away_mean_team_rim", "num", "mean signed team leverage away"),
        ],
        [
            (
                t.team,
                t.home_games,
                t.away_games,
                t.home_mean_disparity,
                t.away_mean_disparity,
                t.home_mean_team_rim,
                t.away_mean_team_rim,
            )
            for t in ha_reg.teams
        ],
    )
    done("fig9_team_home_away")

    # --- referee-team screening ----------------------------------------------
    rows_panel, skipped_no_crew = panel_rows(regular)
    cells = build_cells(rows_panel)
    tables = outlier_tables(cells, opts.min_pair_games, opts.table_k)
    cell_notes = [f"pair minimum: {opts.min_pair_games} games"]
    if skipped_no_crew:
        cell_notes.append(f"games skipped for missing crew: {skipped_no_crew}")

    def excess_rows(top_cells, metric_of):
        out = []
        for c in top_cells:
            m = metric_of(c)
            out.append(
                (
                    c.referee,
                    c.team,
                    c.games,
                    m.observed,
                    m.referee_mean,
                    m.team_mean,
                    m.global_mean,
                    m.excess,
                )
            )
        return out

    excess_cols = lambda what: [
        Column("referee", "str", "crew member, canonical name"),
        Column("team", "str", "team id"),
        Column("games", "int", "shared games"),
        Column("observed", "num", f"pair mean {what}"),
        Column("referee_mean", "num", "referee mean over all rows"),
        Column("team_mean", "num", "team mean over all rows"),
        Column("global_mean", "num", "grand mean over all rows"),
        Column("excess", "num", "observed minus additive baseline"),
    ]
    write_table(
        path("fig10_ref_team_rim_outliers"),
        excess_cols("signed team leverage"),
        excess_rows(tables.top_rim, lambda c: c.rim),
        notes=cell_notes,
    )
    done("fig10_ref_team_rim_outliers")
    write_table(
        path("fig11_ref_team_disp_outliers"),
        excess_cols("signed foul disparity"),
        excess_rows(tables.top_disparity, lambda c: c.disparity),
        notes=cell_notes,
    )
    done("fig11_ref_team_disp_outliers")

    write_table(
        path("figA3_ref_team_z_map"),
        [
            Column("referee", "str", "crew member, canonical name"),
            Column("team", "str", "team id"),
            Column("games", "int", "shared games"),
            Column("excess_rim", "num", "leverage excess vs additive baseline"),
            Column("excess_disparity", "num", "disparity excess vs additive baseline"),
            Column("z_rim", "num", "z-score of leverage excess over qualified cells"),
            Column("z_disparity", "num", "z-score of disparity excess"),
            Column("z_combined", "num", "z_rim + z_disparity"),
        ],
        [
            (
                c.referee,
                c.team,
                c.games,
                c.rim.excess,
                c.disparity.excess,
                c.rim.z,
                c.disparity.z,
                c.z_combined,
            )
            for c in tables.qualified
        ],
        notes=cell_notes + list(tables.flags),
    )
    done("figA3_ref_team_z_map")

    write_table(
        path("figA4_excess_scatter"),
        [
            Column("referee", "str", "crew member, canonical name"),
            Column("team", "str", "team id"),
            Column("excess_rim", "num", "leverage excess"),
            Column("excess_disparity", "num", "disparity excess"),
            Column("pearson_r", "num", "correlation across qualified cells (blank if undefined)"),
        ],
        [
            (c.referee, c.team, c.rim.excess, c.disparity.excess, tables.excess_correlation)
            for c in tables.qualified
        ],
        notes=cell_notes,
    )
    done("figA4_excess_scatter")

    # --- regressions ----------------------------------------------------------
    targets = select_team_side_targets(ha_reg.teams, opts.team_side_k)
    if not targets:
        report.skipped["fig13_team_side_effects"] = "no team-side targets available"
    else:
        try:
            ts_fits = team_side_effects(
                reg_rows,
                targets,
                target_form=opts.target_form,
                small_sample=opts.small_sample,
                dof_mode=opts.dof_mode,
            )
        except (DesignError, FitError) as e:
            report.skipped["fig13_team_side_effects"] = str(e)
        else:
            write_table(
                path("fig13_team_side_effects"),
                _FIT_COLUMNS,
                _fit_term_rows(ts_fits, lambda t: "[" in t),
                notes=[f"target form: {opts.target_form}"],
            )
            done("fig13_team_side_effects")

    pairs = select_outlier_pairs(tables, opts.pair_k)
    if not pairs:
        report.skipped["fig14_ref_team_effects"] = "no qualified referee-team pairs"
    else:
        try:
            rt_fits = ref_team_residual_effects(
                rows_panel,
                pairs,
                min_pair_games=opts.min_pair_games,
                small_sample=opts.small_sample,
                dof_mode=opts.dof_mode,
            )
        except (DesignError, FitError) as e:
            report.skipped["fig14_ref_team_effects"] = str(e)
        else:
            write_table(
                path("fig14_ref_team_effects"),
                _FIT_COLUMNS,
                _fit_term_rows(rt_fits, lambda t: t.startswith("pair_")),
                notes=[f"pair minimum: {opts.min_pair_games} games"],
            )
            done("fig14_ref_team_effects")

    # --- appendix -------------------------------------------------------------
    all_summaries, _ = referee_distribution(regular, REGULAR, 1)
    checks_all = component_check_tables(all_summaries)
    _scatter_table(
        path("figA1_component_no_min"),
        checks_all.calls_vs_swing,
        notes=["no minimum-games threshold"],
    )
    done("figA1_component_no_min")

    write_table(
        path("figA2_quarter_disparity"),
        [
            Column("referee", "str", "crew member, canonical name"),
            Column("games", "int", "games worked"),
        ]
        + [
            Column(f"abs_disparity_{b.lower()}", "num", f"mean absolute {b} foul disparity")
            for b in ("Q1", "Q2", "Q3", "Q4", "OT")
        ],
        [
            (
                s.referee,
                s.games,
                s.per_quarter_abs_disparity["Q1"],
                s.per_quarter_abs_disparity["Q2"],
                s.per_quarter_abs_disparity["Q3"],
                s.per_quarter_abs_disparity["Q4"],
                s.per_quarter_abs_disparity["OT"],
            )
            for s in summaries
        ],
    )
    done("figA2_quarter_disparity")

    report.written.sort()
    return report
