"""Local design-space exploration and sensitivity analysis.

Around a base configuration, each varied parameter is independently
multiplied by one of the levels {1-delta, 1, 1+delta} (seeded), every
variant is pushed through the composed prediction graph, and ordinary
least squares per output recovers local sensitivities. A sensitivity S is
reported as the output change across the full span from (1-delta)x to
(1+delta)x, which for a linear response equals the two-point difference
f(x_plus) - f(x_minus). Columns (variables) are standardized by their own
maximum absolute entry, which preserves zeros and bounds entries to
[-1, 1]; activity and passivity are the column and row sums of absolute
standardized values.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .composition import CompositionGraph, ModelNode, StaticInput
from .design import DesignConfig, design_space

DEFAULT_DELTA = 0.05
LEVELS = (-1, 0, 1)   # multipliers 1 - d, 1, 1 + d


def default_varied_parameters() -> list[str]:
    """All continuously valued design-space parameters. The integer floor
    count is excluded: a +-5 % multiplier rounds back to the same value."""
    return [r.name for r in design_space() if not r.integer]


@dataclass(frozen=True)
class PerturbationPlan:
    base: DesignConfig
    parameters: tuple[str, ...]
    delta: float = DEFAULT_DELTA
    count: int = 0           # 0 means 10 per varied parameter
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.delta <= 0.2:
            raise ValueError("delta must be in (0, 0.2]")
        if self.count and self.count < 10 * len(self.parameters):
            raise ValueError(
                f"count must be >= {10 * len(self.parameters)} "
                f"(10 per varied parameter), got {self.count}")

    @property
    def n(self) -> int:
        return self.count or 10 * len(self.parameters)


def make_plan(base: DesignConfig, parameters=None, delta: float = DEFAULT_DELTA,
              count: int = 0, seed: int = 0) -> PerturbationPlan:
    params = tuple(parameters if parameters is not None
                   else default_varied_parameters())
    return PerturbationPlan(base=base, parameters=params, delta=delta,
                            count=count, seed=seed)


@dataclass
class LocalDataset:
    """Inputs, every interface activation, and final outputs of a DSE run."""

    plan: PerturbationPlan
    parameters: tuple[str, ...]
    base_values: np.ndarray                   # engineering units, per parameter
    x: np.ndarray                             # n x p parameter values
    outputs: dict[str, np.ndarray]            # node id -> n values
    output_names: dict[str, str]              # node id -> quantity name
    output_units: dict[str, str]
    node_inputs: dict[str, np.ndarray]        # model node id -> n x k inputs
    node_input_names: dict[str, tuple[str, ...]]
    failures: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return self.x.shape[0]

    def output_ids(self) -> list[str]:
        return list(self.outputs)


def dse_samples(plan: PerturbationPlan, graph: CompositionGraph) -> LocalDataset:
    """Evaluate seeded multiplicative perturbations through the graph.

    Per sample and per varied parameter one level of {1-d, 1, 1+d} is drawn
    independently. Evaluation failures are recorded and skipped; the run
    continues.
    """
    rng = np.random.default_rng(plan.seed)
    base = plan.base
    params = plan.parameters
    base_vals = np.array([float(getattr(base, p)) for p in params])
    n = plan.n

    level_idx = rng.integers(0, len(LEVELS), size=(n, len(params)))
    multipliers = 1.0 + plan.delta * np.array(LEVELS)[level_idx]

    model_nodes = [nid for nid in graph.topo_order()
                   if isinstance(graph.nodes[nid], ModelNode)]
    rows_x, out_acc, in_acc, failures = [], {}, {nid: [] for nid in model_nodes}, []
    for nid in graph.topo_order():
        out_acc[nid] = []

    out_names, out_units = {}, {}
    for i in range(n):
        values = base_vals * multipliers[i]
        cfg = base.with_values(**dict(zip(params, values)))
        try:
            if graph.context_builder is None:
                raise RuntimeError("graph has no context builder")
            ctx = graph.context_builder(cfg)
            _, trace = graph.evaluate_context(ctx)
        except Exception as exc:
            failures.append((i, str(exc)))
            continue
        rows_x.append(values)
        for nid, entry in trace.items():
            out_acc[nid].append(entry.value)
            out_names[nid] = entry.output_name
            out_units[nid] = entry.unit
        for nid in model_nodes:
            node = graph.nodes[nid]
            row = [ctx[b.key] if isinstance(b, StaticInput) else trace.value(b.producer)
                   for b in node.bindings]
            in_acc[nid].append(row)

    x = np.array(rows_x) if rows_x else np.empty((0, len(params)))
    return LocalDataset(
        plan=plan,
        parameters=params,
        base_values=base_vals,
        x=x,
        outputs={nid: np.array(v) for nid, v in out_acc.items()},
        output_names=out_names,
        output_units=out_units,
        node_inputs={nid: np.array(v) for nid, v in in_acc.items()},
        node_input_names={nid: graph.nodes[nid].model.input_names
                          for nid in model_nodes},
        failures=failures,
    )


# ---------------------------------------------------------------------------
# sensitivity matrix

@dataclass
class SensitivityMatrix:
    """S[output, variable] in the output's own unit, plus the standardized
    matrix and the activity/passivity aggregates."""

    outputs: tuple[str, ...]         # node ids, row order
    output_names: dict[str, str]
    output_units: dict[str, str]
    variables: tuple[str, ...]       # column order
    base_values: np.ndarray
    delta: float
    s: np.ndarray                    # raw sensitivities, NaN = undefined
    s_std: np.ndarray                # zero-preserving standardized, [-1, 1]
    activity: np.ndarray             # per variable
    passivity: np.ndarray            # per output
    warnings: list[str] = field(default_factory=list)


def sensitivities(dataset: LocalDataset) -> SensitivityMatrix:
    """OLS regression of every output on the varied parameters.

    The reported S is the regression slope rescaled to the level span,
    ``S = beta * 2 * delta * x_base``. Parameters without variation in the
    sample (for example a zero-valued base) are marked undefined (NaN).
    """
    x = dataset.x
    if len(x) < 2:
        raise ValueError("need at least 2 evaluated samples")
    params = dataset.parameters
    p = len(params)
    warnings: list[str] = []

    spread = x.max(axis=0) - x.min(axis=0)
    varied = spread > 1e-15
    if not np.all(varied):
        frozen = [params[j] for j in range(p) if not varied[j]]
        warnings.append("no variation in: " + ", ".join(frozen))

    design = np.column_stack([np.ones(len(x)), x[:, varied]])
    rank = np.linalg.matrix_rank(design)
    deficient = rank < design.shape[1]

    out_ids = dataset.output_ids()
    s = np.full((len(out_ids), p), np.nan)
    for i, nid in enumerate(out_ids):
        y = dataset.outputs[nid]
        if deficient:
            warnings.append(f"rank-deficient design for output {nid}")
            continue
        beta, *_ = np.linalg.lstsq(design, y, rcond=None)
        s[i, varied] = beta[1:] * 2.0 * dataset.plan.delta * dataset.base_values[varied]

    s_std = np.zeros_like(s)
    for j in range(p):
        col = s[:, j]
        finite = np.isfinite(col)
        if not finite.any():
            s_std[:, j] = np.nan
            continue
        m = np.max(np.abs(col[finite]))
        s_std[:, j] = col / m if m > 0.0 else np.where(finite, 0.0, np.nan)

    activity = np.nansum(np.abs(s_std), axis=0)
    passivity = np.nansum(np.abs(s_std), axis=1)
    return SensitivityMatrix(
        outputs=tuple(out_ids),
        output_names=dict(dataset.output_names),
        output_units=dict(dataset.output_units),
        variables=params,
        base_values=dataset.base_values,
        delta=dataset.plan.delta,
        s=s,
        s_std=s_std,
        activity=activity,
        passivity=passivity,
        warnings=warnings,
    )


def activity_passivity(matrix: SensitivityMatrix) -> tuple[dict[str, float], dict[str, float]]:
    """Column sums (how much a variable controls) and row sums (how much an
    output is controlled) of absolute standardized sensitivities."""
    act = {v: float(a) for v, a in zip(matrix.variables, matrix.activity)}
    pas = {o: float(pv) for o, pv in zip(matrix.outputs, matrix.passivity)}
    return act, pas


def two_point_difference(graph: CompositionGraph, base: DesignConfig,
                         parameter: str, delta: float) -> dict[str, float]:
    """Independent check: f(x * (1+d)) - f(x * (1-d)) per output, all other
    parameters at base."""
    v = float(getattr(base, parameter))
    _, hi = graph.evaluate(base.with_values(**{parameter: v * (1.0 + delta)}))
    _, lo = graph.evaluate(base.with_values(**{parameter: v * (1.0 - delta)}))
    return {nid: hi[nid].value - lo[nid].value for nid in hi}


# ---------------------------------------------------------------------------
# export

def matrix_to_csv(matrix: SensitivityMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["output", "quantity", "unit"] + list(matrix.variables))
        for i, nid in enumerate(matrix.outputs):
            row = [nid, matrix.output_names[nid], matrix.output_units[nid]]
            row += [("" if not np.isfinite(v) else repr(float(v)))
                    for v in matrix.s[i]]
            w.writerow(row)


def _grid(a: np.ndarray) -> list[list[float | None]]:
    return [[None if not np.isfinite(v) else float(v) for v in row] for row in a]


def matrix_to_dict(matrix: SensitivityMatrix) -> dict:
    return {
        "variables": list(matrix.variables),
        "outputs": [{"node": nid,
                     "quantity": matrix.output_names[nid],
                     "unit": matrix.output_units[nid]} for nid in matrix.outputs],
        "base_values": matrix.base_values.tolist(),
        "delta": matrix.delta,
        "s": _grid(matrix.s),
        "s_standardized": _grid(matrix.s_std),
        "activity": matrix.activity.tolist(),
        "passivity": matrix.passivity.tolist(),
        "warnings": matrix.warnings,
    }


def save_matrix_json(matrix: SensitivityMatrix, path: str | Path) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(matrix), indent=2,
                                     sort_keys=True) + "\n")
