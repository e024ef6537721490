"""Gradient-boosted shallow trees and time-series feature engineering.

The boosted ensemble fits depth-limited CART trees to squared-loss
residuals with shrinkage; prediction is the initial mean plus the shrunken
sum of tree outputs. For hourly load series, supervised rows combine
timestamp expansions (calendar fields plus an is-weekday flag) with lagged
values at hourly or daily spacing.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .trees import RegressionTree, fit_cart

# Calendar epoch of the synthetic year: a Monday, so day index mod 7 < 5
# matches the oracle's weekday rule.
SERIES_EPOCH = datetime(2024, 1, 1)

TIMESTAMP_FEATURES = ("year", "month", "week", "day", "day_of_week",
                      "week_of_month", "hour", "is_weekday")

LAG_BANDS = {"hours": (12, 24), "days": (3, 7)}


@dataclass(frozen=True)
class LagFeatureSpec:
    """Timestamp expansions plus ``n_lags`` previous values.

    ``granularity`` selects hourly lags (t-1 .. t-n) or daily lags at the
    same hour (t-24 .. t-24n). The lag count band follows the method's
    working range (12..24 hourly, 3..7 daily); pass ``enforce_band=False``
    to experiment outside it.
    """

    n_lags: int
    granularity: str = "hours"
    enforce_band: bool = True

    def __post_init__(self):
        if self.granularity not in LAG_BANDS:
            raise ValueError(f"granularity must be one of {tuple(LAG_BANDS)}")
        if self.n_lags < 1:
            raise ValueError("n_lags must be >= 1")
        if self.enforce_band:
            lo, hi = LAG_BANDS[self.granularity]
            if not lo <= self.n_lags <= hi:
                raise ValueError(
                    f"n_lags {self.n_lags} outside the {self.granularity} "
                    f"band [{lo}, {hi}]")

    @property
    def step(self) -> int:
        return 1 if self.granularity == "hours" else 24

    @property
    def max_lag(self) -> int:
        return self.n_lags * self.step

    def lag_names(self) -> tuple[str, ...]:
        unit = "h" if self.granularity == "hours" else "d"
        return tuple(f"lag_{k}{unit}" for k in range(1, self.n_lags + 1))


def timestamp_row(hour_index: int) -> list[float]:
    ts = SERIES_EPOCH + timedelta(hours=hour_index)
    iso = ts.isocalendar()
    return [
        float(ts.year),
        float(ts.month),
        float(iso.week),
        float(ts.day),
        float(ts.weekday()),              # 0 = Monday
        float((ts.day - 1) // 7 + 1),
        float(ts.hour),
        1.0 if ts.weekday() < 5 else 0.0,
    ]


def timeseries_featurize(series: np.ndarray, spec: LagFeatureSpec,
                         start_hour: int = 0) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Supervised rows for every timestamp with complete lag history.

    Returns (x, y, feature_names); row t predicts ``series[t]`` from its
    timestamp expansion and the ``n_lags`` previous values.
    """
    series = np.asarray(series, dtype=np.float64).reshape(-1)
    max_lag = spec.max_lag
    if len(series) <= max_lag:
        raise ValueError(
            f"series length {len(series)} does not cover max lag {max_lag}")
    names = TIMESTAMP_FEATURES + spec.lag_names()
    rows, targets = [], []
    for t in range(max_lag, len(series)):
        lags = [series[t - k * spec.step] for k in range(1, spec.n_lags + 1)]
        rows.append(timestamp_row(start_hour + t) + lags)
        targets.append(series[t])
    return np.array(rows), np.array(targets), names


# ---------------------------------------------------------------------------
# gradient boosting

@dataclass
class GbdtModel:
    trees: list[RegressionTree]
    shrinkage: float
    init: float                      # constant initial prediction
    feature_names: tuple[str, ...]
    train_losses: tuple[float, ...]  # mean squared error after each stage

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        out = np.full(len(x), self.init)
        for tree in self.trees:
            out += self.shrinkage * tree.predict(x)
        return out


def fit_gbdt(x: np.ndarray, y: np.ndarray, n_stages: int = 200,
             max_depth: int = 4, shrinkage: float = 0.1, min_leaf: int = 5,
             feature_names: tuple[str, ...] | None = None,
             min_rows: int = 100) -> GbdtModel:
    """Stagewise squared-loss boosting: the initial prediction is the target
    mean, each stage fits a depth-limited tree to the current residuals."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if len(x) < min_rows:
        raise ValueError(f"need at least {min_rows} rows, got {len(x)}")
    if not 0.0 < shrinkage <= 1.0:
        raise ValueError("shrinkage must be in (0, 1]")
    names = feature_names or tuple(f"x{j}" for j in range(x.shape[1]))

    init = float(y.mean())
    pred = np.full(len(y), init)
    trees: list[RegressionTree] = []
    losses: list[float] = []
    for _ in range(n_stages):
        residual = y - pred
        tree = fit_cart(x, residual, max_depth=max_depth, min_leaf=min_leaf,
                        feature_names=names)
        pred = pred + shrinkage * tree.predict(x)
        trees.append(tree)
        losses.append(float(np.mean((y - pred) ** 2)))
    return GbdtModel(trees=trees, shrinkage=shrinkage, init=init,
                     feature_names=names, train_losses=tuple(losses))


def predict_gbdt(model: GbdtModel, x: np.ndarray) -> np.ndarray:
    return model.predict(x)


def persistence_forecast(series: np.ndarray, horizon_hours: int = 24) -> np.ndarray:
    """Naive baseline: repeat the value from ``horizon_hours`` earlier."""
    series = np.asarray(series, dtype=np.float64).reshape(-1)
    out = np.full(len(series), np.nan)
    out[horizon_hours:] = series[:-horizon_hours]
    return out
