"""Calibration of the density metric against human ratings.

Fits ``y ~ a + b1*OM + b2*FR`` by least squares, grid-searches the
fragmentation hyperparameters ``(m_star, kappa)`` and evaluates the whole
procedure with leave-one-deck-out cross-validation.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .stats import UndefinedCorrelation, pearson, rmse, spearman

SCORE_MIN = 1.0
SCORE_MAX = 5.0


class CalibrationError(ValueError):
    pass


class SingularFitError(CalibrationError):
    def __init__(self, columns: Sequence[str]):
        super().__init__("design matrix is rank deficient; collinear columns: "
                         + ", ".join(columns))
        self.columns = tuple(columns)


class WeightDerivationError(CalibrationError):
    pass


@dataclass(frozen=True)
class RatedPage:
    deck_id: str
    page_id: str
    y: float
    rho: float
    m_eff: int


@dataclass(frozen=True)
class GridSpec:
    m_min: int = 1
    m_max: int = 8
    kappa_min: float = 1.0
    kappa_max: float = 12.0
    kappa_step: float = 0.1

    def __post_init__(self):
        if self.m_min > self.m_max:
            raise ValueError("m_min must not exceed m_max")
        if not 0 < self.kappa_min <= self.kappa_max:
            raise ValueError("need 0 < kappa_min <= kappa_max")
        if self.kappa_step <= 0:
            raise ValueError("kappa_step must be positive")

    def kappas(self) -> list[float]:
        # index-based stepping avoids accumulated float drift
        n = int(math.floor((self.kappa_max - self.kappa_min) / self.kappa_step + 1e-9)) + 1
        return [round(self.kappa_min + k * self.kappa_step, 10) for k in range(n)]

    def points(self) -> list[tuple[int, float]]:
        """Grid points in scan order: m_star outer ascending, kappa inner ascending."""
        ks = self.kappas()
        return [(m, k) for m in range(self.m_min, self.m_max + 1) for k in ks]


@dataclass(frozen=True)
class FitMetrics:
    pearson: float
    spearman: float
    rmse: float


@dataclass(frozen=True)
class CalibrationResult:
    m_star: int
    kappa: float
    a: float
    b1: float
    b2: float
    train: FitMetrics

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Prediction:
    deck_id: str
    page_id: str
    y: float
    y_raw: float
    y_clip: float


@dataclass
class LodoResult:
    folds: dict[str, CalibrationResult]
    failed: dict[str, str]
    predictions: list[Prediction]
    metrics: FitMetrics | None

    def to_json(self) -> dict:
        return {
            "folds": {d: r.to_json() for d, r in self.folds.items()},
            "failed": dict(self.failed),
            "predictions": [asdict(p) for p in self.predictions],
            "global": asdict(self.metrics) if self.metrics else None,
        }


# -- rater normalization ----------------------------------------------------

def zscore_normalize(ratings: Mapping[str, Mapping], eps: float = 1e-8) -> dict[str, dict]:
    """Per-rater z-scores ``(s - mean) / (std + eps)`` with population std."""
    out = {}
    for rater, table in ratings.items():
        if not table:
            raise ValueError(f"rater {rater!r} has no ratings")
        keys = list(table)
        s = np.array([table[k] for k in keys], dtype=float)
        mu, sd = s.mean(), s.std()
        out[rater] = {k: float(v) for k, v in zip(keys, (s - mu) / (sd + eps))}
    return out


def read_ratings(path) -> dict[str, dict[tuple[str, str], float]]:
    """Load a ``rater_id,deck_id,page_id,score`` CSV into per-rater tables."""
    tables: dict[str, dict] = defaultdict(dict)
    with open(path, newline="", encoding="utf-8") as fh:
        for line, row in enumerate(csv.DictReader(fh), start=2):
            try:
                score = float(row["score"])
                key = (row["deck_id"], row["page_id"])
                rater = row["rater_id"]
            except (KeyError, TypeError, ValueError) as exc:
                raise CalibrationError(f"{path}:{line}: bad ratings row ({exc})") from None
            if not SCORE_MIN <= score <= SCORE_MAX:
                raise CalibrationError(f"{path}:{line}: score {score} outside [1, 5]")
            tables[rater][key] = score
    return dict(tables)


def aggregate_targets(ratings: Mapping[str, Mapping], eps: float = 1e-8,
                      rescale: bool = True) -> dict:
    """Average per-rater z-scores per page.

    With ``rescale`` the mean z is mapped back to the rating scale with the
    pooled mean and population std of all raw scores; otherwise raw z
    means are returned.
    """
    z = zscore_normalize(ratings, eps)
    per_page: dict = defaultdict(list)
    for table in z.values():
        for key, v in table.items():
            per_page[key].append(v)
    raw = np.array([v for t in ratings.values() for v in t.values()], dtype=float)
    mu, sd = (raw.mean(), raw.std()) if rescale else (0.0, 1.0)
    return {k: float(np.mean(v)) * sd + mu for k, v in sorted(per_page.items())}


# -- least squares ----------------------------------------------------------

def fit_affine(y, om, fr) -> tuple[float, float, float]:
    """Least-squares ``(a, b1, b2)`` for ``y = a + b1*om + b2*fr`` via QR."""
    y = np.asarray(y, dtype=float)
    om = np.asarray(om, dtype=float)
    fr = np.asarray(fr, dtype=float)
    if not len(y) == len(om) == len(fr):
        raise ValueError("y, om and fr must have equal length")
    if len(y) < 3:
        raise ValueError("need at least three observations")
    X = np.column_stack([np.ones_like(om), om, fr])
    sv = np.linalg.svd(X, compute_uv=False)
    if sv[-1] <= sv[0] * 1e-10:
        raise SingularFitError(_collinear_columns(om, fr))
    q, r = np.linalg.qr(X)
    a, b1, b2 = np.linalg.solve(r, q.T @ y)
    return float(a), float(b1), float(b2)


def _collinear_columns(om: np.ndarray, fr: np.ndarray) -> list[str]:
    flat_om = np.ptp(om) <= 1e-12 * max(1.0, np.abs(om).max())
    flat_fr = np.ptp(fr) <= 1e-12 * max(1.0, np.abs(fr).max())
    if flat_om and flat_fr:
        return ["intercept", "OM", "FR"]
    if flat_om:
        return ["intercept", "OM"]
    if flat_fr:
        return ["intercept", "FR"]
    return ["OM", "FR"]


def occupancy_features(rho, tau: float) -> np.ndarray:
    return 1.0 - np.abs(np.asarray(rho, dtype=float) - tau)


def fragmentation_features(m_eff, m_star: int, kappa: float) -> np.ndarray:
    d = np.asarray(m_eff, dtype=float) - m_star
    return np.maximum(0.0, 1.0 - d * d / kappa)


def predict(result: CalibrationResult, om, fr):
    """Return ``(y_raw, y_clipped)``; works on scalars and arrays."""
    y_raw = result.a + result.b1 * np.asarray(om, dtype=float) + result.b2 * np.asarray(fr, dtype=float)
    y_clip = np.clip(y_raw, SCORE_MIN, SCORE_MAX)
    if np.ndim(y_raw) == 0:
        return float(y_raw), float(y_clip)
    return y_raw, y_clip


def _key(y: np.ndarray, y_raw: np.ndarray) -> tuple[float, float, float]:
    try:
        r = pearson(y, y_raw)
        s = spearman(y, y_raw)
    except UndefinedCorrelation:
        r = s = -math.inf
    e = rmse(y, np.clip(y_raw, SCORE_MIN, SCORE_MAX))
    return r, s, -e


def select_and_fit(train: Sequence[RatedPage], tau: float = 0.55,
                   grid: GridSpec | None = None) -> CalibrationResult:
    """Grid-search ``(m_star, kappa)`` and refit the affine map at each point.

    The winner maximizes ``(pearson, spearman, -rmse)`` lexicographically;
    only a strictly greater key replaces the incumbent, so the first
    maximizer in scan order wins ties.
    """
    grid = grid or GridSpec()
    if len({p.y for p in train}) < 2:
        raise CalibrationError("training set needs at least two distinct targets")
    y = np.array([p.y for p in train], dtype=float)
    m_eff = np.array([p.m_eff for p in train], dtype=float)
    om = occupancy_features([p.rho for p in train], tau)

    best_key = (-math.inf, -math.inf, -math.inf)
    best = None
    for m_star, kappa in grid.points():
        fr = fragmentation_features(m_eff, m_star, kappa)
        try:
            a, b1, b2 = fit_affine(y, om, fr)
        except SingularFitError:
            continue
        y_raw = a + b1 * om + b2 * fr
        key = _key(y, y_raw)
        if best is None or key > best_key:
            best_key = key
            best = (m_star, kappa, a, b1, b2)
    if best is None:
        raise CalibrationError("calibration failed: every grid point gave a singular fit")
    m_star, kappa, a, b1, b2 = best
    metrics = FitMetrics(best_key[0], best_key[1], -best_key[2])
    return CalibrationResult(m_star, kappa, a, b1, b2, metrics)


def group_by_deck(pages: Iterable[RatedPage]) -> dict[str, list[RatedPage]]:
    decks: dict[str, list[RatedPage]] = {}
    for p in pages:
        decks.setdefault(p.deck_id, []).append(p)
    return decks


def lodo_fold(pages: Sequence[RatedPage], deck_id: str, tau: float = 0.55,
              grid: GridSpec | None = None) -> tuple[CalibrationResult, list[Prediction]]:
    """Train on every deck except ``deck_id`` and predict its pages."""
    train = [p for p in pages if p.deck_id != deck_id]
    held = [p for p in pages if p.deck_id == deck_id]
    result = select_and_fit(train, tau, grid)
    om = occupancy_features([p.rho for p in held], tau)
    fr = fragmentation_features([p.m_eff for p in held], result.m_star, result.kappa)
    y_raw, y_clip = predict(result, om, fr)
    preds = [Prediction(p.deck_id, p.page_id, p.y, float(r), float(c))
             for p, r, c in zip(held, y_raw, y_clip)]
    return result, preds


def lodo_evaluate(pages: Sequence[RatedPage], tau: float = 0.55,
                  grid: GridSpec | None = None) -> LodoResult:
    """Leave-one-deck-out evaluation.

    Pooled Pearson and Spearman use raw predictions; RMSE uses predictions
    clipped to the rating scale. Folds whose training fit fails are
    reported in ``failed`` and left out of the pooled metrics.
    """
    decks = list(group_by_deck(pages))
    if len(decks) < 2:
        raise CalibrationError("leave-one-deck-out needs at least two decks")
    folds: dict[str, CalibrationResult] = {}
    failed: dict[str, str] = {}
    preds: list[Prediction] = []
    for d in decks:
        try:
            folds[d], fold_preds = lodo_fold(pages, d, tau, grid)
        except CalibrationError as exc:
            failed[d] = str(exc)
            continue
        preds.extend(fold_preds)
    metrics = None
    if len(preds) >= 2:
        y = np.array([p.y for p in preds])
        raw = np.array([p.y_raw for p in preds])
        clip = np.array([p.y_clip for p in preds])
        try:
            metrics = FitMetrics(pearson(y, raw), spearman(y, raw), rmse(y, clip))
        except UndefinedCorrelation:
            metrics = FitMetrics(math.nan, math.nan, rmse(y, clip))
    return LodoResult(folds, failed, preds, metrics)


def weights_from_coefficients(b1: float, b2: float) -> tuple[float, float]:
    """Mixing weights proportional to the fitted OM and FR coefficients."""
    if b1 < 0 or b2 < 0:
        raise WeightDerivationError(f"negative coefficient (b1={b1}, b2={b2})")
    total = b1 + b2
    if total == 0:
        raise WeightDerivationError("b1 + b2 is zero")
    lam1 = b1 / total
    return lam1, 1.0 - lam1


# -- feature files ---------------------------------------------------------

def read_features(path) -> dict[tuple[str, str], tuple[float, int]]:
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for line, row in enumerate(csv.DictReader(fh), start=2):
            try:
                out[(row["deck_id"], row["page_id"])] = (float(row["rho"]), int(row["m_eff"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise CalibrationError(f"{path}:{line}: bad features row ({exc})") from None
    return out


def build_pages(targets: Mapping[tuple[str, str], float],
                features: Mapping[tuple[str, str], tuple[float, int]]) -> list[RatedPage]:
    """Join aggregated targets with geometry features on ``(deck_id, page_id)``."""
    missing = sorted(set(targets) - set(features))
    if missing:
        raise CalibrationError(f"no features for rated page(s): {missing[:5]}")
    return [RatedPage(d, p, y, *features[(d, p)]) for (d, p), y in sorted(targets.items())]


def features_from_decks(paths: Iterable, a_min: float = 0.04) -> dict[tuple[str, str], tuple[float, int]]:
    """Geometry features for every content slide of each deck file.

    Pages are keyed ``(file stem, slide index)``.
    """
    from pathlib import Path

    from .deck import load_deck, scorable_slides
    from .geometry import content_regions, effective_region_count, union_area

    out = {}
    for path in paths:
        path = Path(path)
        for s in scorable_slides(load_deck(path)):
            boxes = content_regions(s.regions)
            out[(path.stem, str(s.index))] = (union_area(boxes),
                                              effective_region_count(boxes, a_min))
    return out
