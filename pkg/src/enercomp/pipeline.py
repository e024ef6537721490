"""Workspace pipeline: the batch stages behind the CLI.

Every stage reads and writes files under one workspace directory::

    workspace/
      data/      sampled configs, simulated sample records, datasets
      models/    component bundle, monolithic baseline
      reports/   experiment report, sensitivity matrix, trees, forecasts

All artifacts are pure functions of (configuration, seeds); JSON files are
written with sorted keys and no timestamps so repeated runs are
byte-identical.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baseline, boosting, composition, mlp, plots, sensitivity, trees
from .components import (COMPONENT_SCHEMAS, ModelBundle, dataset_to_csv,
                         extract_component_datasets, load_bundle, save_bundle,
                         SimSample)
from .design import (DesignConfig, configs_to_csv, design_space,
                     representative_config, validate_config)
from .evaluation import (ExperimentPlan, TestCase,
                         low_energy_distribution_compare, make_random_shape_cases,
                         make_setback_cases, make_train_samples, simulate_cases,
                         whitebox_interface_test)
from .geometry import GeometrySummary, derive_geometry, footprint_for
from .oracle import PointSummary, simulate, synth_weather


class MissingArtifactError(ValueError):
    """A stage prerequisite is not on disk; names the stage to run first."""


@dataclass
class RunConfig:
    workspace: str = "workspace"
    n_train: int = 1000
    n_random: int = 300
    n_setback: int = 300
    n_heldout: int = 200
    lhs_seed_random: int = 11
    lhs_seed_setback: int = 12
    lhs_seed_heldout: int = 14
    shape_seed: int = 13
    train_seed: int = 100
    max_epochs: int = 2000
    patience: int = 50
    dse_delta: float = 0.05
    dse_count: int = 1500
    dse_seed: int = 21
    tree_max_depth: int = 3
    tree_min_leaf: int = 10
    gbdt_stages: int = 200
    gbdt_depth: int = 4
    gbdt_shrinkage: float = 0.1
    # daily lags cover the weekly pattern of annual load series; hourly
    # lags (12..24) are the alternative band
    gbdt_lags: int = 7
    gbdt_lag_granularity: str = "days"
    service_host: str = "127.0.0.1"
    service_port: int = 8080

    def __post_init__(self):
        for name in ("n_train", "n_random", "n_setback", "n_heldout",
                     "dse_count", "gbdt_stages"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def root(self) -> Path:
        return Path(self.workspace)

    @property
    def data_dir(self) -> Path:
        return self.root / "data"

    @property
    def models_dir(self) -> Path:
        return self.root / "models"

    @property
    def reports_dir(self) -> Path:
        return self.root / "reports"

    def experiment_plan(self) -> ExperimentPlan:
        return ExperimentPlan(
            n_train=self.n_train, n_random=self.n_random,
            n_setback=self.n_setback, n_heldout=self.n_heldout,
            lhs_seed_random=self.lhs_seed_random,
            lhs_seed_setback=self.lhs_seed_setback,
            lhs_seed_heldout=self.lhs_seed_heldout,
            shape_seed=self.shape_seed, train_seed=self.train_seed,
            max_epochs=self.max_epochs, patience=self.patience)

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "RunConfig":
        d = json.loads(Path(path).read_text())
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown run-config fields: {sorted(unknown)}")
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**d)


def _dump_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# sample record persistence

def _geometry_to_dict(g: GeometrySummary) -> dict:
    d = dataclasses.asdict(g)
    d["roof_segments"] = [list(seg) for seg in g.roof_segments]
    return d


def _geometry_from_dict(d: dict) -> GeometrySummary:
    d = dict(d)
    d["roof_segments"] = tuple((int(l), float(a)) for l, a in d["roof_segments"])
    return GeometrySummary(**d)


def _summary_to_dict(s: PointSummary) -> dict:
    return dataclasses.asdict(s)


def _summary_from_dict(d: dict) -> PointSummary:
    return PointSummary(**d)


def save_cases(cases: list[TestCase], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for c in cases:
            rec = {
                "config": c.config.as_dict(),
                "footprint_spec": c.footprint_spec,
                "geometry": _geometry_to_dict(c.sample.geometry),
                "summary": _summary_to_dict(c.sample.summary),
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_cases(path: Path, stage_hint: str = "gen-data") -> list[TestCase]:
    if not path.exists():
        raise MissingArtifactError(
            f"{path} not found; run the '{stage_hint}' stage first")
    out = []
    with open(path) as fh:
        for line in fh:
            rec = json.loads(line)
            cfg = DesignConfig.from_dict(rec["config"])
            sample = SimSample(
                config=cfg,
                geometry=_geometry_from_dict(rec["geometry"]),
                summary=_summary_from_dict(rec["summary"]))
            out.append(TestCase(config=cfg, footprint_spec=rec["footprint_spec"],
                                sample=sample))
    return out


# ---------------------------------------------------------------------------
# stages

def gen_data(cfg: RunConfig) -> dict:
    """Sample the design space, simulate every variant, persist records."""
    data = cfg.data_dir
    data.mkdir(parents=True, exist_ok=True)

    train_cases = simulate_cases(make_train_samples(cfg.n_train))
    configs_to_csv([c.config for c in train_cases], data / "train_configs.csv")
    save_cases(train_cases, data / "train_samples.jsonl")

    random_cases = simulate_cases(make_random_shape_cases(
        cfg.n_random, cfg.lhs_seed_random, cfg.shape_seed))
    save_cases(random_cases, data / "test_random_samples.jsonl")

    setback_cases = simulate_cases(make_setback_cases(
        cfg.n_setback, cfg.lhs_seed_setback))
    save_cases(setback_cases, data / "test_setback_samples.jsonl")

    from .sampling import lhs_samples
    heldout = simulate_cases([(c, {"kind": "box"}) for c in lhs_samples(
        design_space(), cfg.n_heldout, cfg.lhs_seed_heldout)])
    save_cases(heldout, data / "heldout_samples.jsonl")

    manifest = {
        "stage": "gen-data",
        "counts": {"train": cfg.n_train, "random": cfg.n_random,
                   "setback": cfg.n_setback, "heldout": cfg.n_heldout},
        "seeds": {"lhs_random": cfg.lhs_seed_random,
                  "lhs_setback": cfg.lhs_seed_setback,
                  "lhs_heldout": cfg.lhs_seed_heldout,
                  "shape": cfg.shape_seed},
        "scheme": {"train": "sobol", "tests": "lhs"},
        "files": ["train_configs.csv", "train_samples.jsonl",
                  "test_random_samples.jsonl", "test_setback_samples.jsonl",
                  "heldout_samples.jsonl"],
    }
    _dump_json(manifest, data / "manifest.json")
    return manifest


def train_stage(cfg: RunConfig) -> dict:
    """Train the component bundle and the monolithic baseline."""
    train_cases = load_cases(cfg.data_dir / "train_samples.jsonl")
    samples = [c.sample for c in train_cases]
    datasets = extract_component_datasets(samples)
    ds_dir = cfg.data_dir / "datasets"
    ds_dir.mkdir(parents=True, exist_ok=True)
    for slot, ds in datasets.items():
        dataset_to_csv(ds, ds_dir / f"{slot}.csv")

    plan = cfg.experiment_plan()
    bundle_provenance = {
        "n_train": cfg.n_train, "scheme": "sobol", "train_seed": cfg.train_seed,
        "max_epochs": cfg.max_epochs, "patience": cfg.patience,
        "zone_input_aggregation": "summed per element kind",
    }
    from .evaluation import train_models
    bundle, mono = train_models(train_cases, plan)
    bundle.provenance = bundle_provenance
    save_bundle(bundle, cfg.models_dir / "bundle")
    mlp.save_model(mono.model, cfg.models_dir / "monolithic.json")

    manifest = {
        "stage": "train",
        "bundle": "bundle",
        "monolithic": "monolithic.json",
        "validation_r2": {k: v for k, v in sorted(bundle.validation_r2().items())},
        "monolithic_validation_r2": mono.model.report.validation_r2,
        "provenance": bundle_provenance,
    }
    _dump_json(manifest, cfg.models_dir / "manifest.json")
    return manifest


def load_models(cfg: RunConfig) -> tuple[ModelBundle, baseline.MonolithicModel]:
    bundle_dir = cfg.models_dir / "bundle"
    mono_path = cfg.models_dir / "monolithic.json"
    if not bundle_dir.exists() or not mono_path.exists():
        raise MissingArtifactError(
            f"models not found under {cfg.models_dir}; run 'train' first")
    bundle = load_bundle(bundle_dir)
    mono = baseline.monolithic_from_model(mlp.load_model(mono_path))
    return bundle, mono


def evaluate_stage(cfg: RunConfig) -> dict:
    """Score both models on the persisted test sets, run the white-box
    interface test, and emit the report plus SVG figures."""
    from .evaluation import score_component_model, score_monolithic_model

    bundle, mono = load_models(cfg)
    random_cases = load_cases(cfg.data_dir / "test_random_samples.jsonl")
    setback_cases = load_cases(cfg.data_dir / "test_setback_samples.jsonl")
    heldout_cases = load_cases(cfg.data_dir / "heldout_samples.jsonl")

    scores = {
        "random_shapes": {
            "component": score_component_model(bundle, random_cases),
            "monolithic": score_monolithic_model(mono, random_cases),
        },
        "setback": {
            "component": score_component_model(bundle, setback_cases),
            "monolithic": score_monolithic_model(mono, setback_cases),
        },
    }
    whitebox = whitebox_interface_test(bundle, heldout_cases)

    reports = cfg.reports_dir
    reports.mkdir(parents=True, exist_ok=True)
    for set_name, by_model in scores.items():
        errs = {}
        for model_name, sc in by_model.items():
            plots.scatter_svg(
                reports / f"scatter_{set_name}_{model_name}.svg",
                sc.truth_eui, sc.predictions_eui,
                f"{model_name} on {set_name}", "kWh/m2a",
                annotation=f"R2={sc.eui.r2:.3f}  MAPE={sc.eui.mape:.2f}%")
            errs[model_name] = sc.predictions_eui - sc.truth_eui
        plots.error_hist_svg(reports / f"errors_{set_name}.svg", errs,
                             f"signed EUI error on {set_name}", "kWh/m2a")
    for name, comp in whitebox.components.items():
        plots.scatter_svg(reports / f"whitebox_{name}.svg", comp.truth,
                          comp.predicted, f"component {name}", comp.unit,
                          annotation=f"R2={comp.metrics.r2:.3f}")

    report = {
        "stage": "evaluate",
        "plan": {k: getattr(cfg, k) for k in (
            "n_train", "n_random", "n_setback", "n_heldout",
            "lhs_seed_random", "lhs_seed_setback", "lhs_seed_heldout",
            "shape_seed", "train_seed", "max_epochs", "patience")},
        "component_validation_r2": {k: v for k, v in
                                    sorted(bundle.validation_r2().items())},
        "scores": {s: {m: sc.as_dict() for m, sc in by_model.items()}
                   for s, by_model in scores.items()},
        "whitebox_components": {n: {"unit": c.unit, **c.metrics.as_dict()}
                                for n, c in sorted(whitebox.components.items())},
        "whitebox_interfaces": {n: {"unit": c.unit, **c.metrics.as_dict()}
                                for n, c in sorted(whitebox.interfaces.items())},
    }
    _dump_json(report, reports / "experiment_report.json")
    return report


def predict_stage(cfg: RunConfig, config: DesignConfig,
                  footprint_spec: dict | None = None) -> dict:
    """Composed prediction plus trace for one design; warns when the design
    leaves the sampled ranges instead of refusing."""
    bundle, _ = load_models(cfg)
    violations = validate_config(config, design_space())
    eui, annual, trace = composition.predict_design(bundle, config, footprint_spec)
    return {
        "eui": eui,
        "annual_energy": annual,
        "activations": composition.trace_to_list(trace),
        "warnings": [v.message() for v in violations],
    }


def _graph_for(bundle: ModelBundle, config: DesignConfig,
               footprint_spec: dict | None):
    fp = footprint_for(config, footprint_spec)
    geometry = derive_geometry(config, fp)
    return composition.build_graph(config, geometry, bundle, footprint_spec)


def sensitivity_stage(cfg: RunConfig, config: DesignConfig | None = None,
                      footprint_spec: dict | None = None,
                      parameters=None) -> dict:
    """Local sensitivity matrix around a base design (the representative
    setback case by default)."""
    bundle, _ = load_models(cfg)
    base = config or representative_config()
    spec = footprint_spec or {"kind": "setback"}
    graph = _graph_for(bundle, base, spec)
    plan = sensitivity.make_plan(base, parameters=parameters,
                                 delta=cfg.dse_delta, count=cfg.dse_count,
                                 seed=cfg.dse_seed)
    ds = sensitivity.dse_samples(plan, graph)
    matrix = sensitivity.sensitivities(ds)
    reports = cfg.reports_dir
    reports.mkdir(parents=True, exist_ok=True)
    sensitivity.matrix_to_csv(matrix, reports / "sensitivity.csv")
    sensitivity.save_matrix_json(matrix, reports / "sensitivity.json")
    low = low_energy_distribution_compare(ds)
    _dump_json(low.as_dict(), reports / "low_energy_compare.json")
    act, pas = sensitivity.activity_passivity(matrix)
    return {"matrix": str(reports / "sensitivity.csv"),
            "activity": act, "passivity": pas,
            "failures": len(ds.failures)}


def tree_dataset(ds: sensitivity.LocalDataset, target: str
                 ) -> tuple[np.ndarray, np.ndarray, tuple[str, ...], tuple[str, ...], str, str]:
    """Assemble the (features, target) table a surrogate tree is fitted on.

    ``target`` may be a slot prefix like ``window`` (rows pooled across all
    instances of that component, features per its schema), a node id like
    ``window_S`` (features are the varied parameters), or ``eui``.
    """
    if target in COMPONENT_SCHEMAS and target in ("wall", "window", "floor",
                                                  "roof", "infiltration"):
        schema = COMPONENT_SCHEMAS[target]
        xs, ys = [], []
        for nid, arr in ds.node_inputs.items():
            if nid.split("_")[0] == target or nid.startswith(f"{target}_l"):
                if nid in ds.outputs and len(arr):
                    xs.append(arr)
                    ys.append(ds.outputs[nid])
        if not xs:
            raise ValueError(f"no instances of component {target!r} in the graph")
        x = np.vstack(xs)
        y = np.concatenate(ys)
        return (x, y, schema.input_names, schema.input_units,
                schema.output[0], schema.output[1])
    node = "building_energy" if target == "eui" else target
    if node not in ds.outputs:
        raise ValueError(f"unknown tree target {target!r}")
    space = design_space()
    units = tuple(space.range_of(p).unit if p in space else "-"
                  for p in ds.parameters)
    return (ds.x, ds.outputs[node], ds.parameters, units,
            ds.output_names[node], ds.output_units[node])


def tree_stage(cfg: RunConfig, target: str = "window",
               config: DesignConfig | None = None,
               footprint_spec: dict | None = None) -> dict:
    """Local surrogate tree with extracted rules for a requested target."""
    bundle, _ = load_models(cfg)
    base = config or representative_config()
    spec = footprint_spec or {"kind": "setback"}
    graph = _graph_for(bundle, base, spec)
    plan = sensitivity.make_plan(base, delta=cfg.dse_delta,
                                 count=cfg.dse_count, seed=cfg.dse_seed)
    ds = sensitivity.dse_samples(plan, graph)
    x, y, names, units, tname, tunit = tree_dataset(ds, target)
    tree = trees.fit_cart(x, y, max_depth=cfg.tree_max_depth,
                          min_leaf=cfg.tree_min_leaf, feature_names=names,
                          feature_units=units, target_name=tname,
                          target_unit=tunit)
    rules = trees.extract_rules(tree)
    reports = cfg.reports_dir
    reports.mkdir(parents=True, exist_ok=True)
    trees.save_tree_json(tree, reports / f"tree_{target}.json")
    (reports / f"rules_{target}.txt").write_text(trees.rules_text(rules))
    return {"tree": str(reports / f"tree_{target}.json"),
            "rules": [r.text() for r in rules]}


def timeseries_stage(cfg: RunConfig, config: DesignConfig | None = None,
                     footprint_spec: dict | None = None,
                     quantity: str = "heating", holdout_week: int = 4) -> dict:
    """Boosted-tree one-hour-ahead forecast of an hourly zone load series,
    scored against the 24-hour persistence baseline.

    Every ``holdout_week``-th calendar week is held out, so the test hours
    span all seasons; lag features use the observed history, which matches
    a one-step-ahead forecasting setting.
    """
    base = config or representative_config()
    spec = footprint_spec or {"kind": "setback"}
    fp = footprint_for(base, spec)
    geometry = derive_geometry(base, fp)
    result = simulate(base, geometry, synth_weather())
    series = {"cooling": result.cooling_load, "heating": result.heating_load,
              "lighting": result.lighting_load}[quantity]

    spec_lags = boosting.LagFeatureSpec(n_lags=cfg.gbdt_lags,
                                        granularity=cfg.gbdt_lag_granularity)
    x, y, names = boosting.timeseries_featurize(series, spec_lags)
    hour_idx = np.arange(spec_lags.max_lag, len(series))
    week = hour_idx // (24 * 7)
    test_mask = (week % holdout_week) == (holdout_week - 1)
    test_mask &= hour_idx >= 24   # persistence needs one day of history

    model = boosting.fit_gbdt(x[~test_mask], y[~test_mask],
                              n_stages=cfg.gbdt_stages, max_depth=cfg.gbdt_depth,
                              shrinkage=cfg.gbdt_shrinkage, feature_names=names)
    pred = model.predict(x[test_mask])
    truth = y[test_mask]
    persist = series[hour_idx[test_mask] - 24]

    def mape(p, t):
        mask = t != 0
        if not mask.any():
            return float("nan")
        return float(np.mean(np.abs(p[mask] - t[mask]) / np.abs(t[mask]))) * 100.0

    reports = cfg.reports_dir
    reports.mkdir(parents=True, exist_ok=True)
    import csv as _csv
    with open(reports / f"forecast_{quantity}.csv", "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["hour", f"truth_{quantity} [W]", "gbdt [W]", "persistence [W]"])
        for hi, ti, pi, si in zip(hour_idx[test_mask], truth, pred, persist):
            w.writerow([int(hi), repr(float(ti)), repr(float(pi)),
                        repr(float(si))])
    summary = {
        "quantity": quantity,
        "n_train": int(np.count_nonzero(~test_mask)),
        "n_test": len(truth),
        "n_test_nonzero": int(np.count_nonzero(truth)),
        "gbdt_mape": mape(pred, truth),
        "persistence_mape": mape(persist, truth),
        "stages": cfg.gbdt_stages,
        "lags": cfg.gbdt_lags,
        "lag_granularity": cfg.gbdt_lag_granularity,
        "holdout_week": holdout_week,
    }
    _dump_json(summary, reports / f"forecast_{quantity}_summary.json")
    return summary
