"""Single-hidden-layer feedforward regressor trained from scratch.

One architecture serves every component model and the monolithic baseline:
min-max scaling on inputs and output, a rectified hidden layer, a linear
output, mean squared error with an L2 penalty, adaptive-moment mini-batch
gradient descent, early stopping on a validation split, and a fixed
16-point grid search over hidden width and penalty strength. Scaling and
inverse scaling sit inside the model, so its public interface speaks
engineering units.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

HIDDEN_GRID = (200, 400, 600, 800)
L2_GRID = (3e-4, 1e-4, 3e-5, 1e-5)
MODEL_FORMAT = "enercomp.mlp/1"


class DegenerateFeatureError(ValueError):
    """A feature has (near-)zero spread and cannot be min-max scaled."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""


class DimensionMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------------
# scaling

@dataclass(frozen=True)
class ScalerParams:
    """Per-feature min-max bounds, with names and units as metadata."""

    names: tuple[str, ...]
    units: tuple[str, ...]
    x_min: np.ndarray
    x_max: np.ndarray


def fit_scaler(x: np.ndarray, names: tuple[str, ...],
               units: tuple[str, ...]) -> ScalerParams:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("expected a 2D array (rows, features)")
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    spread = hi - lo
    bad = np.nonzero(spread <= 1e-12)[0]
    if bad.size:
        raise DegenerateFeatureError(
            "constant feature(s): " + ", ".join(names[i] for i in bad))
    return ScalerParams(tuple(names), tuple(units), lo, hi)


def scale(params: ScalerParams, x: np.ndarray) -> np.ndarray:
    """Map engineering units onto [0, 1] at the training extrema."""
    return (np.asarray(x, dtype=np.float64) - params.x_min) / (params.x_max - params.x_min)


def unscale(params: ScalerParams, x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`scale`."""
    return np.asarray(x, dtype=np.float64) * (params.x_max - params.x_min) + params.x_min


# ---------------------------------------------------------------------------
# network math (scaled space); kept as free functions so the gradients can
# be finite-difference checked directly

def forward(w1, b1, w2, b2, x):
    hidden = x @ w1
    hidden += b1
    np.maximum(hidden, 0.0, out=hidden)
    return hidden @ w2 + b2, hidden


def loss_and_grads(w1, b1, w2, b2, x, y, l2):
    """Mean squared error plus L2 penalty on the weight matrices, and its
    analytic gradients. Inputs are never mutated."""
    n = x.shape[0]
    y_hat, hidden = forward(w1, b1, w2, b2, x)
    err = y_hat - y
    loss = float(err @ err) / n + l2 * (float(np.sum(w1 * w1)) + float(w2 @ w2))
    d_out = err
    d_out *= 2.0 / n
    g_w2 = hidden.T @ d_out + 2.0 * l2 * w2
    g_b2 = float(d_out.sum())
    d_hidden = d_out[:, None] * w2[None, :]
    np.multiply(d_hidden, hidden > 0.0, out=d_hidden)
    g_w1 = x.T @ d_hidden + 2.0 * l2 * w1
    g_b1 = d_hidden.sum(axis=0)
    return loss, (g_w1, g_b1, g_w2, g_b2)


def _init_params(rng: np.random.Generator, n_in: int, n_hidden: int):
    lim1 = 1.0 / np.sqrt(n_in)
    lim2 = 1.0 / np.sqrt(n_hidden)
    w1 = rng.uniform(-lim1, lim1, size=(n_in, n_hidden))
    b1 = np.zeros(n_hidden)
    w2 = rng.uniform(-lim2, lim2, size=n_hidden)
    b2 = 0.0
    return [w1, b1, np.asarray(w2), b2]


# ---------------------------------------------------------------------------
# training

@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    hidden_grid: tuple[int, ...] = HIDDEN_GRID
    l2_grid: tuple[float, ...] = L2_GRID
    validation_fraction: float = 0.2
    patience: int = 50
    max_epochs: int = 2000
    seed: int = 0

    @property
    def grid(self) -> list[tuple[int, float]]:
        return [(h, l2) for h in self.hidden_grid for l2 in self.l2_grid]


@dataclass(frozen=True)
class TrainReport:
    hidden: int
    l2: float
    seed: int
    epochs_run: int
    best_epoch: int
    validation_loss: float   # scaled-space MSE at the restored epoch
    validation_r2: float     # engineering units, validation split
    grid_losses: tuple[tuple[int, float, float], ...]  # (hidden, l2, val loss)
    max_epochs: int
    patience: int


@dataclass
class MlpModel:
    """A trained component regressor; immutable once built."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float
    x_scaler: ScalerParams
    y_scaler: ScalerParams
    report: TrainReport | None = None
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.w1, self.b1, self.w2):
            if not np.all(np.isfinite(arr)):
                raise ValueError("model weights must be finite")
        if self.w1.shape[1] not in HIDDEN_GRID:
            raise ValueError(
                f"hidden width {self.w1.shape[1]} outside the supported grid {HIDDEN_GRID}")

    @property
    def input_names(self) -> tuple[str, ...]:
        return self.x_scaler.names

    @property
    def output_name(self) -> str:
        return self.y_scaler.names[0]

    @property
    def output_unit(self) -> str:
        return self.y_scaler.units[0]

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Predict in engineering units for rows of engineering-unit inputs."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.w1.shape[0]:
            raise DimensionMismatchError(
                f"expected {self.w1.shape[0]} inputs "
                f"({', '.join(self.input_names)}), got {x.shape[1]}")
        xs = scale(self.x_scaler, x)
        y_hat, _ = forward(self.w1, self.b1, self.w2, self.b2, xs)
        return unscale(self.y_scaler, y_hat)


def _adam_update(params, grads, state, lr, step):
    b1, b2, eps = 0.9, 0.999, 1e-8
    for i, (p, g) in enumerate(zip(params, grads)):
        m, v = state[i]
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        state[i] = (m, v)
        m_hat = m / (1.0 - b1 ** step)
        v_hat = v / (1.0 - b2 ** step)
        params[i] = p - lr * m_hat / (np.sqrt(v_hat) + eps)
    return params


def _train_single(x_tr, y_tr, x_val, y_val, hidden: int, l2: float,
                  config: TrainConfig, rng: np.random.Generator):
    """One grid point: returns (params, best_val_loss, epochs_run, best_epoch)."""
    n = x_tr.shape[0]
    params = _init_params(rng, x_tr.shape[1], hidden)
    state = [(0.0, 0.0)] * 4
    batch = int(np.ceil(n / 5.0))
    best = None
    best_loss = np.inf
    best_epoch = 0
    since_best = 0
    step = 0
    epoch = 0
    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            step += 1
            loss, grads = loss_and_grads(*params, x_tr[idx], y_tr[idx], l2)
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"non-finite loss at grid point (hidden={hidden}, l2={l2})")
            params = _adam_update(params, grads, state, config.learning_rate, step)
        y_hat, _ = forward(*params, x_val)
        val = float(np.mean((y_hat - y_val) ** 2))
        if not np.isfinite(val):
            raise DivergenceError(
                f"non-finite validation loss at grid point (hidden={hidden}, l2={l2})")
        if val < best_loss:
            best_loss = val
            best = [p.copy() if isinstance(p, np.ndarray) else p for p in params]
            best_epoch = epoch
            since_best = 0
        else:
            since_best += 1
            if since_best >= config.patience:
                break
    return best, best_loss, epoch, best_epoch


def train(x: np.ndarray, y: np.ndarray, config: TrainConfig,
          input_names: tuple[str, ...], input_units: tuple[str, ...],
          output_name: str, output_unit: str,
          min_rows: int = 50, n_jobs: int | None = None) -> MlpModel:
    """Grid-search training over 16 (hidden width, L2) combinations.

    Scales inputs and output internally, holds out a validation fraction
    for early stopping and model selection, and returns the grid point
    with the lowest validation loss, weights restored to its best epoch.
    Grid points train concurrently (each seeded independently), so the
    result is deterministic for a fixed seed regardless of scheduling.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape[0] != y.shape[0]:
        raise ValueError("x and y row counts differ")
    if x.shape[0] < min_rows:
        raise ValueError(f"need at least {min_rows} rows, got {x.shape[0]}")

    x_scaler = fit_scaler(x, input_names, input_units)
    y_scaler = fit_scaler(y.reshape(-1, 1), (output_name,), (output_unit,))
    xs = scale(x_scaler, x)
    ys = scale(y_scaler, y.reshape(-1, 1)).reshape(-1)

    split_rng = np.random.default_rng([config.seed, 0])
    order = split_rng.permutation(x.shape[0])
    n_val = max(1, int(round(config.validation_fraction * x.shape[0])))
    val_idx, tr_idx = order[:n_val], order[n_val:]
    x_tr, y_tr = xs[tr_idx], ys[tr_idx]
    x_val, y_val = xs[val_idx], ys[val_idx]

    def run_point(gi: int):
        hidden, l2 = config.grid[gi]
        rng = np.random.default_rng([config.seed, 1 + gi])
        with threadpool_limits(limits=1):
            params, val_loss, epochs, best_epoch = _train_single(
                x_tr, y_tr, x_val, y_val, hidden, l2, config, rng)
        return (val_loss, gi, hidden, l2, params, epochs, best_epoch)

    workers = n_jobs if n_jobs is not None else min(2, os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_point, range(len(config.grid))))
    else:
        results = [run_point(gi) for gi in range(len(config.grid))]

    val_loss, gi, hidden, l2, params, epochs, best_epoch = min(
        results, key=lambda r: (r[0], r[1]))

    y_val_hat, _ = forward(*params, x_val)
    pred_val = unscale(y_scaler, y_val_hat.reshape(-1, 1)).reshape(-1)
    truth_val = y[val_idx]
    sse = float(np.sum((pred_val - truth_val) ** 2))
    sst = float(np.sum((truth_val - truth_val.mean()) ** 2))
    val_r2 = 1.0 - sse / sst if sst > 0 else float("nan")

    report = TrainReport(
        hidden=hidden, l2=l2, seed=config.seed,
        epochs_run=epochs, best_epoch=best_epoch,
        validation_loss=val_loss, validation_r2=val_r2,
        grid_losses=tuple((h, g, r[0]) for r, (h, g) in zip(results, config.grid)),
        max_epochs=config.max_epochs, patience=config.patience)
    return MlpModel(w1=params[0], b1=params[1], w2=params[2], b2=float(params[3]),
                    x_scaler=x_scaler, y_scaler=y_scaler, report=report)


# ---------------------------------------------------------------------------
# serialization

def model_to_dict(model: MlpModel) -> dict:
    d = {
        "format": MODEL_FORMAT,
        "inputs": [{"name": n, "unit": u}
                   for n, u in zip(model.x_scaler.names, model.x_scaler.units)],
        "output": {"name": model.output_name, "unit": model.output_unit},
        "x_min": model.x_scaler.x_min.tolist(),
        "x_max": model.x_scaler.x_max.tolist(),
        "y_min": model.y_scaler.x_min.tolist(),
        "y_max": model.y_scaler.x_max.tolist(),
        "w1": model.w1.tolist(),
        "b1": model.b1.tolist(),
        "w2": model.w2.tolist(),
        "b2": model.b2,
        "tags": model.tags,
    }
    if model.report is not None:
        r = model.report
        d["training"] = {
            "hidden": r.hidden, "l2": r.l2, "seed": r.seed,
            "epochs_run": r.epochs_run, "best_epoch": r.best_epoch,
            "validation_loss": r.validation_loss, "validation_r2": r.validation_r2,
            "grid_losses": [list(g) for g in r.grid_losses],
            "max_epochs": r.max_epochs, "patience": r.patience,
        }
    return d


def model_from_dict(d: dict) -> MlpModel:
    if d.get("format") != MODEL_FORMAT:
        raise ValueError(f"unsupported model format {d.get('format')!r}")
    x_scaler = ScalerParams(
        tuple(i["name"] for i in d["inputs"]),
        tuple(i["unit"] for i in d["inputs"]),
        np.asarray(d["x_min"]), np.asarray(d["x_max"]))
    y_scaler = ScalerParams(
        (d["output"]["name"],), (d["output"]["unit"],),
        np.asarray(d["y_min"]), np.asarray(d["y_max"]))
    report = None
    if "training" in d:
        t = d["training"]
        report = TrainReport(
            hidden=t["hidden"], l2=t["l2"], seed=t["seed"],
            epochs_run=t["epochs_run"], best_epoch=t["best_epoch"],
            validation_loss=t["validation_loss"], validation_r2=t["validation_r2"],
            grid_losses=tuple(tuple(g) for g in t["grid_losses"]),
            max_epochs=t["max_epochs"], patience=t["patience"])
    return MlpModel(w1=np.asarray(d["w1"]), b1=np.asarray(d["b1"]),
                    w2=np.asarray(d["w2"]), b2=float(d["b2"]),
                    x_scaler=x_scaler, y_scaler=y_scaler, report=report,
                    tags=dict(d.get("tags", {})))


def save_model(model: MlpModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), sort_keys=True) + "\n")


def load_model(path: str | Path) -> MlpModel:
    return model_from_dict(json.loads(Path(path).read_text()))
