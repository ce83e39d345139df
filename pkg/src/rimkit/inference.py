"""Fixed-effects regressions with game-clustered errors.

The design builder emits deterministic column order (intercept, home
indicator, team effects, opponent effects, season effects, series-state
effects, targets) with one reference level dropped per categorical family,
then removes linearly dependent columns — earliest column wins — and
reports what it dropped. Coefficient covariance is the cluster sandwich
with a CR1 small-sample factor by default, confidence intervals use
Student-t critical values, and each coefficient carries an
omitted-variable robustness value: the equal-strength confounder
association that would zero out its t-statistic.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .model import SeriesStateKey, TeamGameRow
from .outliers import PanelRow
from .special import student_t_quantile

OUTCOME_DISPARITY = "disparity"
OUTCOME_TEAM_RIM = "team_rim"
TEAM_OUTCOMES = (OUTCOME_DISPARITY, OUTCOME_TEAM_RIM)

HOME = "home"
AWAY = "away"

_EPS = float(np.finfo(np.float64).eps)


class DesignError(ValueError):
    """A regression design cannot be built as requested."""


class FitError(RuntimeError):
    """A least-squares fit or covariance computation failed."""


# ---------------------------------------------------------------------------
# Numeric core
# ---------------------------------------------------------------------------


def _rank_filter(
    X: np.ndarray, names: list[str]
) -> tuple[np.ndarray, list[str], list[str]]:
    """Drop linearly dependent columns, keeping the earliest of any group.

    Sequential Gram-Schmidt with one re-orthogonalization pass: a column
    whose residual against the kept span is negligible relative to its own
    norm is dependent and goes. Fixed-effect designs make dependencies
    exact, so the tolerance can sit near machine precision.
    """
    n = X.shape[0]
    tol = max(n, X.shape[1]) * _EPS
    Q = np.empty((n, 0))
    kept: list[int] = []
    dropped: list[str] = []
    for j in range(X.shape[1]):
        col = X[:, j].astype(float)
        scale = np.linalg.norm(col)
        if scale == 0.0:
            dropped.append(names[j])
            continue
        resid = col - Q @ (Q.T @ col)
        resid -= Q @ (Q.T @ resid)
        if np.linalg.norm(resid) <= tol * scale:
            dropped.append(names[j])
            continue
        Q = np.hstack([Q, (resid / np.linalg.norm(resid))[:, None]])
        kept.append(j)
    return X[:, kept], [names[j] for j in kept], dropped


def fit_ols(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Least squares by Householder QR: (beta, residuals, rank, dof).

    Expects a full-column-rank design — run the rank filter first — and
    refuses rank deficiency rather than silently picking a solution.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise FitError("X must be (n, k) and y length n")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise FitError("design or outcome contains non-finite values")
    n, k = X.shape
    if k == 0:
        raise FitError("empty design")
    if n < k:
        raise FitError(f"{n} rows cannot identify {k} columns")
    Q, R = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.min() <= max(n, k) * _EPS * diag.max():
        raise FitError("design is rank deficient; apply the rank filter first")
    beta = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ beta
    return beta, resid, k, n - k


def cluster_covariance(
    X: np.ndarray,
    residuals: np.ndarray,
    clusters: Sequence,
    *,
    small_sample: str = "cr1",
) -> np.ndarray:
    """Cluster-robust sandwich covariance of OLS coefficients.

    bread = (X'X)^-1, meat = sum over clusters g of (X_g'e_g)(X_g'e_g)'.
    ``small_sample="cr1"`` applies [G/(G-1)]*[(n-1)/(n-k)]; ``"cr0"`` leaves
    the plain sandwich. With every row its own cluster the CR1 result is
    exactly the HC0 estimator times the CR1 factor.
    """
    if small_sample not in ("cr0", "cr1"):
        raise ValueError(f"unknown small_sample {small_sample!r}")
    X = np.asarray(X, dtype=float)
    e = np.asarray(residuals, dtype=float)
    n, k = X.shape
    if e.shape[0] != n:
        raise FitError("residual length does not match design rows")
    if n <= k:
        raise FitError("no residual degrees of freedom for the covariance")
    uniq, inv = np.unique(np.asarray(clusters), return_inverse=True)
    G = uniq.size
    if G < 2:
        raise FitError("clustered covariance needs at least two clusters")
    scores = X * e[:, None]
    S = np.zeros((G, k))
    np.add.at(S, inv, scores)
    meat = S.T @ S
    XtX = X.T @ X
    try:
        bread = np.linalg.inv(XtX)
    except np.linalg.LinAlgError as exc:
        raise FitError("X'X is singular; apply the rank filter first") from exc
    V = bread @ meat @ bread
    if small_sample == "cr1":
        V = V * (G / (G - 1.0)) * ((n - 1.0) / (n - k))
    return (V + V.T) / 2.0


def robustness_rho(t_stat: float, dof: float) -> float:
    """Equal-strength confounder association that would zero the t-statistic.

    The non-negative root of ``dof*rho^2 + t^2*rho - t^2 = 0`` in the
    cancellation-free form ``2 t^2 / (sqrt(t^4 + 4 dof t^2) + t^2)``.
    Always in [0, 1): zero exactly when t is, approaching one as |t| grows.
    """
    if dof < 1:
        raise ValueError("dof must be >= 1")
    if not math.isfinite(t_stat):
        raise ValueError("t statistic must be finite")
    t2 = t_stat * t_stat
    if t2 == 0.0:
        return 0.0
    return 2.0 * t2 / (math.sqrt(t2 * t2 + 4.0 * dof * t2) + t2)


# ---------------------------------------------------------------------------
# Design construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TeamSideTarget:
    """A (team, side) combination whose effect is estimated directly."""

    team: str
    side: str  # "home" | "away"

    def __post_init__(self):
        if self.side not in (HOME, AWAY):
            raise DesignError(f"side must be {HOME!r} or {AWAY!r}, got {self.side!r}")

    @property
    def name(self) -> str:
        return f"{self.team}:{self.side}"


@dataclass(frozen=True)
class DesignSpec:
    """Declarative description of one team-row regression design."""

    outcome: str = OUTCOME_DISPARITY
    intercept: bool = True
    home_indicator: bool = True
    team_effects: bool = True
    opponent_effects: bool = True
    season_effects: bool = True
    series_effects: bool = False
    targets: tuple[TeamSideTarget, ...] = ()
    target_form: str = "indicator"  # "indicator" | "paired"
    references: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Design:
    matrix: np.ndarray
    outcome: np.ndarray
    clusters: np.ndarray
    columns: tuple[str, ...]
    dropped: tuple[str, ...]
    notes: tuple[str, ...]
    outcome_name: str


def _dummy_block(
    values: Sequence[str], prefix: str, reference: str | None
) -> tuple[np.ndarray, list[str], str]:
    levels = sorted(set(values))
    ref = reference if reference in levels else levels[0]
    keep = [lv for lv in levels if lv != ref]
    col_of = {lv: i for i, lv in enumerate(keep)}
    X = np.zeros((len(values), len(keep)))
    for r, v in enumerate(values):
        c = col_of.get(v)
        if c is not None:
            X[r, c] = 1.0
    return X, [f"{prefix}{lv}" for lv in keep], ref


def build_design(rows: Sequence[TeamGameRow], spec: DesignSpec) -> Design:
    """Team-row design matrix per ``spec``, rank-filtered, deterministic.

    Column order: intercept, home indicator, team effects, opponent
    effects, season effects, series-state effects (canonical label order,
    0--0 reference), then targets in the order given. When series effects
    are requested, rows without a series state are excluded and counted.
    """
    if spec.outcome not in TEAM_OUTCOMES:
        raise DesignError(f"unknown outcome {spec.outcome!r}")
    if spec.target_form not in ("indicator", "paired"):
        raise DesignError(f"unknown target_form {spec.target_form!r}")
    rows = list(rows)
    notes: list[str] = []
    if spec.series_effects:
        with_state = [r for r in rows if r.series_key is not None]
        dropped_rows = len(rows) - len(with_state)
        if dropped_rows:
            notes.append(f"excluded {dropped_rows} rows without series state")
        rows = with_state
    if not rows:
        raise DesignError("no rows to fit")

    n = len(rows)
    blocks: list[np.ndarray] = []
    names: list[str] = []
    if spec.intercept:
        blocks.append(np.ones((n, 1)))
        names.append("intercept")
    if spec.home_indicator:
        blocks.append(np.array([[1.0 if r.is_home else 0.0] for r in rows]))
        names.append("home")
    if spec.team_effects:
        X, nm, ref = _dummy_block(
            [r.team for r in rows], "team_", spec.references.get("team")
        )
        blocks.append(X)
        names.extend(nm)
        notes.append(f"team reference {ref}")
    if spec.opponent_effects:
        X, nm, ref = _dummy_block(
            [r.opponent for r in rows], "opp_", spec.references.get("opponent")
        )
        blocks.append(X)
        names.extend(nm)
        notes.append(f"opponent reference {ref}")
    if spec.season_effects:
        X, nm, ref = _dummy_block(
            [r.season for r in rows], "season_", spec.references.get("season")
        )
        blocks.append(X)
        names.extend(nm)
        notes.append(f"season reference {ref}")
    if spec.series_effects:
        labels = [r.series_key.label for r in rows]  # type: ignore[union-attr]
        X, nm, ref = _dummy_block(
            labels, "series_", spec.references.get("series", SeriesStateKey(0, 0).label)
        )
        blocks.append(X)
        names.extend(nm)
        notes.append(f"series reference {ref}")
    for tgt in spec.targets:
        side_home = tgt.side == HOME
        col = np.zeros((n, 1))
        hit = 0
        for i, r in enumerate(rows):
            if r.team == tgt.team and r.is_home == side_home:
                col[i, 0] = 1.0
                hit += 1
            elif (
                spec.target_form == "paired"
                and r.opponent == tgt.team
                and r.is_home != side_home
            ):
                col[i, 0] = -1.0
        if hit == 0:
            raise DesignError(f"target {tgt.name} matches no rows")
        blocks.append(col)
        names.append(f"{tgt.name}[{spec.target_form}]")

    X = np.hstack(blocks)
    if spec.outcome == OUTCOME_DISPARITY:
        y = np.array([float(r.disparity) for r in rows])
    else:
        y = np.array([r.team_rim for r in rows])
    if np.all(y == y[0]):
        notes.append("outcome is constant; fit is degenerate")
    X, kept_names, dropped = _rank_filter(X, names)
    return Design(
        matrix=X,
        outcome=y,
        clusters=np.array([r.game_id for r in rows]),
        columns=tuple(kept_names),
        dropped=tuple(dropped),
        notes=tuple(notes),
        outcome_name=spec.outcome,
    )


# ---------------------------------------------------------------------------
# Fit results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefSummary:
    term: str
    estimate: float
    se: float
    t_stat: float
    ci_lower: float
    ci_upper: float
    rho: float


@dataclass(frozen=True, eq=False)
class FitResult:
    """One fitted regression: coefficients, clustered uncertainty, robustness."""

    outcome: str
    terms: tuple[str, ...]
    estimates: np.ndarray
    se: np.ndarray
    t_stats: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    rho: np.ndarray
    covariance: np.ndarray
    n_rows: int
    n_clusters: int
    rank: int
    dof: int
    ci_level: float
    small_sample: str
    dof_mode: str
    dropped: tuple[str, ...]
    notes: tuple[str, ...]

    def coef(self, term: str) -> CoefSummary:
        try:
            i = self.terms.index(term)
        except ValueError as exc:
            raise KeyError(f"no term {term!r} in fit") from exc
        return CoefSummary(
            term=term,
            estimate=float(self.estimates[i]),
            se=float(self.se[i]),
            t_stat=float(self.t_stats[i]),
            ci_lower=float(self.ci_lower[i]),
            ci_upper=float(self.ci_upper[i]),
            rho=float(self.rho[i]),
        )

    def coef_rows(self) -> list[CoefSummary]:
        return [self.coef(t) for t in self.terms]


def fit_clustered(
    design: Design,
    *,
    small_sample: str = "cr1",
    dof_mode: str = "residual",
    ci_level: float = 0.95,
) -> FitResult:
    """Fit a design and wrap estimates with clustered inference.

    ``dof_mode="residual"`` uses n − rank for the t reference; ``"cluster"``
    uses G − 1. Robustness values are computed per coefficient at the same
    degrees of freedom.
    """
    if dof_mode not in ("residual", "cluster"):
        raise ValueError(f"unknown dof_mode {dof_mode!r}")
    if not 0.0 < ci_level < 1.0:
        raise ValueError("ci_level must be in (0, 1)")
    beta, resid, rank, resid_dof = fit_ols(design.matrix, design.outcome)
    V = cluster_covariance(
        design.matrix, resid, design.clusters, small_sample=small_sample
    )
    G = int(np.unique(design.clusters).size)
    dof = resid_dof if dof_mode == "residual" else G - 1
    if dof < 1:
        raise FitError("no degrees of freedom for interval construction")
    se = np.sqrt(np.maximum(np.diag(V), 0.0))
    t_stats = np.zeros_like(beta)
    rho = np.zeros_like(beta)
    for i in range(beta.size):
        if se[i] > 0.0:
            t_stats[i] = beta[i] / se[i]
            rho[i] = robustness_rho(float(t_stats[i]), float(dof))
        else:
            t_stats[i] = 0.0 if beta[i] == 0.0 else math.inf
            rho[i] = 0.0 if beta[i] == 0.0 else math.nan
    tcrit = student_t_quantile(0.5 + ci_level / 2.0, float(dof))
    return FitResult(
        outcome=design.outcome_name,
        terms=design.columns,
        estimates=beta,
        se=se,
        t_stats=t_stats,
        ci_lower=beta - tcrit * se,
        ci_upper=beta + tcrit * se,
        rho=rho,
        covariance=V,
        n_rows=design.matrix.shape[0],
        n_clusters=G,
        rank=rank,
        dof=dof,
        ci_level=ci_level,
        small_sample=small_sample,
        dof_mode=dof_mode,
        dropped=design.dropped,
        notes=design.notes,
    )


# ---------------------------------------------------------------------------
# The three effect studies
# ---------------------------------------------------------------------------


def team_side_effects(
    rows: Sequence[TeamGameRow],
    targets: Sequence[TeamSideTarget],
    *,
    outcomes: Sequence[str] = TEAM_OUTCOMES,
    target_form: str = "indicator",
    include_series: bool = False,
    references: Mapping[str, str] | None = None,
    small_sample: str = "cr1",
    dof_mode: str = "residual",
) -> dict[str, FitResult]:
    """Estimate (team, side) effects on each outcome with full controls.

    Both rows of every game stay in the sample; clustering by game absorbs
    their mirror dependence. A target matching no rows is an error — a
    silent zero-column would fit but estimate nothing.
    """
    fits: dict[str, FitResult] = {}
    for outcome in outcomes:
        spec = DesignSpec(
            outcome=outcome,
            series_effects=include_series,
            targets=tuple(targets),
            target_form=target_form,
            references=dict(references or {}),
        )
        fits[outcome] = fit_clustered(
            build_design(rows, spec),
            small_sample=small_sample,
            dof_mode=dof_mode,
        )
    return fits


def series_state_effects(
    rows: Sequence[TeamGameRow],
    *,
    small_sample: str = "cr1",
    dof_mode: str = "residual",
) -> dict[str, FitResult]:
    """Game-level pregame series-state effects relative to 0--0.

    One observation per postseason game with a known state; outcomes are
    the game's absolute foul disparity and its total RIM; controls are
    home-team, away-team, and season effects. Each game is its own
    cluster, so the sandwich reduces to the heteroskedasticity-robust
    form.
    """
    per_game: dict[str, TeamGameRow] = {}
    for r in rows:
        if r.season_type != "postseason" or r.series_key is None:
            continue
        if r.is_home:
            per_game[r.game_id] = r
    if not per_game:
        raise DesignError("no postseason rows with series state")
    game_rows = [per_game[g] for g in sorted(per_game)]
    n = len(game_rows)

    blocks = [np.ones((n, 1))]
    names = ["intercept"]
    for values, prefix, family in (
        ([r.team for r in game_rows], "home_team_", "home_team"),
        ([r.opponent for r in game_rows], "away_team_", "away_team"),
        ([r.season for r in game_rows], "season_", "season"),
    ):
        X, nm, _ = _dummy_block(values, prefix, None)
        blocks.append(X)
        names.extend(nm)
    labels = [r.series_key.label for r in game_rows]  # type: ignore[union-attr]
    X, nm, ref = _dummy_block(labels, "series_", SeriesStateKey(0, 0).label)
    blocks.append(X)
    names.extend(nm)
    matrix = np.hstack(blocks)
    clusters = np.array([r.game_id for r in game_rows])

    outcomes = {
        "abs_disparity": np.array([float(abs(r.disparity)) for r in game_rows]),
        "game_rim": np.array([r.game_rim for r in game_rows]),
    }
    fits: dict[str, FitResult] = {}
    for name, y in outcomes.items():
        Xf, kept, dropped = _rank_filter(matrix, list(names))
        design = Design(
            matrix=Xf,
            outcome=y,
            clusters=clusters,
            columns=tuple(kept),
            dropped=tuple(dropped),
            notes=(f"series reference {ref}", f"games {n}"),
            outcome_name=name,
        )
        fits[name] = fit_clustered(
            design, small_sample=small_sample, dof_mode=dof_mode
        )
    return fits


def ref_team_residual_effects(
    rows: Sequence[PanelRow],
    target_pairs: Sequence[tuple[str, str]],
    *,
    min_pair_games: int = 5,
    outcomes: Sequence[str] = ("team_rim", "disparity"),
    small_sample: str = "cr1",
    dof_mode: str = "residual",
) -> dict[str, FitResult]:
    """Directly estimated (referee, team) effects with additive controls.

    The panel has one row per crew member and team side, so each pair
    indicator marks that referee with that team; controls are referee,
    team, opponent, and season effects, clustered by game. Pairs under the
    games minimum are excluded and reported in the fit notes.
    """
    rows = list(rows)
    if not rows:
        raise DesignError("no panel rows to fit")
    pair_games: dict[tuple[str, str], int] = {}
    for r in rows:
        key = (r.referee, r.team)
        pair_games[key] = pair_games.get(key, 0) + 1
    kept_targets: list[tuple[str, str]] = []
    excluded: list[str] = []
    for pair in target_pairs:
        if pair_games.get(tuple(pair), 0) >= min_pair_games:
            kept_targets.append(tuple(pair))
        else:
            excluded.append(f"{pair[0]}|{pair[1]}")
    notes = [f"pair minimum {min_pair_games} games"]
    if excluded:
        notes.append("excluded targets below minimum: " + ", ".join(sorted(excluded)))

    n = len(rows)
    blocks = [np.ones((n, 1))]
    names = ["intercept"]
    for values, prefix in (
        ([r.referee for r in rows], "ref_"),
        ([r.team for r in rows], "team_"),
        ([r.opponent for r in rows], "opp_"),
        ([r.season for r in rows], "season_"),
    ):
        X, nm, _ = _dummy_block(values, prefix, None)
        blocks.append(X)
        names.extend(nm)
    for ref, team in kept_targets:
        col = np.zeros((n, 1))
        for i, r in enumerate(rows):
            if r.referee == ref and r.team == team:
                col[i, 0] = 1.0
        blocks.append(col)
        names.append(f"pair_{ref}|{team}")
    matrix = np.hstack(blocks)
    clusters = np.array([r.game_id for r in rows])

    fits: dict[str, FitResult] = {}
    for outcome in outcomes:
        if outcome == "team_rim":
            y = np.array([r.team_rim for r in rows])
        elif outcome == "disparity":
            y = np.array([r.disparity for r in rows])
        else:
            raise DesignError(f"unknown outcome {outcome!r}")
        Xf, kept, dropped = _rank_filter(matrix, list(names))
        design = Design(
            matrix=Xf,
            outcome=y,
            clusters=clusters,
            columns=tuple(kept),
            dropped=tuple(dropped),
            notes=tuple(notes),
            outcome_name=outcome,
        )
        fits[outcome] = fit_clustered(
            design, small_sample=small_sample, dof_mode=dof_mode
        )
    return fits
