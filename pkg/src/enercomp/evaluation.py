"""Experiment protocol: generalization benchmark, white-box interface test
and low-energy distribution comparison.

The generalization experiment trains both the component bundle and the
monolithic baseline on box-building quasi-random samples, then scores both
on structurally different test sets: randomly generated rectilinear shapes
(identical plates on every storey) and a designed setback case whose top
storey covers half the footprint, producing a roof at an intermediate
level. The white-box test compares composed-graph activations against
oracle values at every component interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import Polygon
from shapely.ops import unary_union

from . import baseline, composition, mlp
from .components import (ModelBundle, SimSample, extract_component_datasets,
                         train_bundle)
from .design import DesignConfig, design_space
from .geometry import Footprint, Plate, derive_geometry, footprint_for
from .oracle import aggregate, simulate, synth_weather
from .sampling import lhs_samples, sobol_samples
from .sensitivity import LocalDataset


@dataclass(frozen=True)
class Metrics:
    """MAPE = mean(|pred - truth| / |truth|) * 100, R2 = 1 - SSE/SST,
    mean signed error = mean(pred - truth)."""

    mape: float
    r2: float
    mean_signed_error: float
    count: int
    mape_excluded: int = 0    # zero-truth pairs excluded from MAPE

    def as_dict(self) -> dict:
        return {"mape": self.mape, "r2": self.r2,
                "mean_signed_error": self.mean_signed_error,
                "count": self.count, "mape_excluded": self.mape_excluded}


def metrics(predictions, truths) -> Metrics:
    pred = np.asarray(predictions, dtype=np.float64).reshape(-1)
    truth = np.asarray(truths, dtype=np.float64).reshape(-1)
    if len(pred) != len(truth):
        raise ValueError("prediction and truth lengths differ")
    if len(pred) < 2:
        raise ValueError("need at least 2 pairs")
    err = pred - truth
    nonzero = truth != 0.0
    excluded = int(np.count_nonzero(~nonzero))
    if not nonzero.any():
        mape = float("nan")
    else:
        mape = float(np.mean(np.abs(err[nonzero]) / np.abs(truth[nonzero]))) * 100.0
    sse = float(err @ err)
    sst = float(np.sum((truth - truth.mean()) ** 2))
    r2 = 1.0 - sse / sst if sst > 0.0 else float("nan")
    return Metrics(mape=mape, r2=r2, mean_signed_error=float(err.mean()),
                   count=len(pred), mape_excluded=excluded)


# ---------------------------------------------------------------------------
# random rectilinear shapes (test set generator)

def random_rectilinear_footprint(rng: np.random.Generator, num_floors: int,
                                 min_area: float = 250.0,
                                 max_area: float = 800.0,
                                 max_tries: int = 200) -> Footprint:
    """Seeded generator for the random-shape test set.

    The plate is a union of 2-3 overlapping axis-aligned rectangles: a
    full-width strip at the bottom, a full-height strip at the left, and
    optionally a third column at the right edge. All rectangles share the
    bottom band, so the union is always a simple rectilinear polygon
    (no holes). Every storey gets the same plate. Rejection-samples until
    the plate area lies in [min_area, max_area]; the bounding box stays
    within the box-building length/width range.
    """
    for _ in range(max_tries):
        bw = rng.uniform(16.0, 30.0)
        bh = rng.uniform(16.0, 30.0)
        h1 = rng.uniform(0.35, 0.8) * bh
        w2 = rng.uniform(0.35, 0.8) * bw
        rects = [Polygon([(0, 0), (bw, 0), (bw, h1), (0, h1)]),
                 Polygon([(0, 0), (w2, 0), (w2, bh), (0, bh)])]
        w3_hi = min(0.45, 0.95 * (1.0 - w2 / bw))
        if rng.random() < 0.5 and w3_hi > 0.2:
            w3 = rng.uniform(0.2, w3_hi) * bw
            h3 = rng.uniform(0.5, 0.9) * bh
            rects.append(Polygon([(bw - w3, 0), (bw, 0), (bw, h3), (bw - w3, h3)]))
        union = unary_union(rects)
        if union.geom_type != "Polygon" or union.interiors:
            continue
        if not (min_area <= union.area <= max_area):
            continue
        coords = list(union.exterior.coords[:-1])
        if not union.exterior.is_ccw:
            coords = coords[::-1]
        verts = tuple((float(x), float(y)) for x, y in coords)
        return Footprint(tuple(Plate(k, verts) for k in range(num_floors)))
    raise RuntimeError("random footprint generation failed to converge")


# ---------------------------------------------------------------------------
# sample simulation helpers

def simulate_sample(config: DesignConfig, footprint_spec: dict) -> SimSample:
    fp = footprint_for(config, footprint_spec)
    geo = derive_geometry(config, fp)
    result = simulate(config, geo, synth_weather())
    return SimSample(config=config, geometry=geo, summary=aggregate(result, config))


@dataclass
class TestCase:
    config: DesignConfig
    footprint_spec: dict
    sample: SimSample


def make_train_samples(n: int) -> list[tuple[DesignConfig, dict]]:
    """Box-building training designs from the canonical Sobol sequence."""
    return [(c, {"kind": "box"}) for c in sobol_samples(design_space(), n)]


def make_random_shape_cases(n: int, lhs_seed: int, shape_seed: int) -> list[tuple[DesignConfig, dict]]:
    from .geometry import footprint_to_dict
    configs = lhs_samples(design_space(), n, lhs_seed)
    rng = np.random.default_rng(shape_seed)
    out = []
    for c in configs:
        fp = random_rectilinear_footprint(rng, c.num_floors)
        plate = fp.plates[0]
        xs = [v[0] for v in plate.vertices]
        ys = [v[1] for v in plate.vertices]
        c = c.with_values(length=max(xs) - min(xs), width=max(ys) - min(ys))
        out.append((c, footprint_to_dict(fp)))
    return out


def make_setback_cases(n: int, lhs_seed: int, num_floors: int = 4,
                       top_fraction: float = 0.5) -> list[tuple[DesignConfig, dict]]:
    """The representative designed configuration: engineering and geometry
    parameters vary, the storey structure (top setback) is fixed."""
    configs = lhs_samples(design_space(), n, lhs_seed)
    spec = {"kind": "setback", "top_fraction": top_fraction}
    return [(c.with_values(num_floors=num_floors), dict(spec)) for c in configs]


def simulate_cases(cases: list[tuple[DesignConfig, dict]]) -> list[TestCase]:
    return [TestCase(config=c, footprint_spec=spec,
                     sample=simulate_sample(c, spec))
            for c, spec in cases]


# ---------------------------------------------------------------------------
# white-box interface test

ENVELOPE_INTERFACES = ("wall_flow", "window_flow", "floor_flow", "roof_flow",
                       "infiltration_flow")
ZONE_INTERFACES = ("zone_heating", "zone_cooling", "zone_lighting")
# the four envelope component rows: floor and roof instances share one
# component, so the scatter (and its R2) pools both, like the zone rows
# pool nothing but wall/window pool their per-orientation instances
ENVELOPE_COMPONENTS = ("wall", "window", "floor_roof", "infiltration")


def interface_truth(sample: SimSample, interface: str) -> float:
    kind = sample.summary.kind_avg_flow
    if interface.endswith("_flow"):
        return kind[interface.removesuffix("_flow")]
    if interface == "zone_heating":
        return sample.summary.heating_load_w
    if interface == "zone_cooling":
        return sample.summary.cooling_load_w
    if interface == "zone_lighting":
        return sample.summary.lighting_load_w
    if interface == "building_energy":
        return sample.summary.eui
    if interface in sample.summary.element_avg_flow:
        return sample.summary.element_avg_flow[interface]
    raise KeyError(interface)


def _component_of_node(node_id: str) -> str | None:
    if node_id == "floor" or node_id.startswith("roof_l"):
        return "floor_roof"
    if node_id.startswith("wall_") and not node_id.endswith("flow"):
        return "wall"
    if node_id.startswith("window_") and not node_id.endswith("flow"):
        return "window"
    if node_id == "infiltration":
        return "infiltration"
    return None


@dataclass
class InterfaceComparison:
    interface: str
    unit: str
    predicted: np.ndarray
    truth: np.ndarray
    metrics: Metrics


@dataclass
class WhiteboxResult:
    """Per-component scatters (instances pooled) plus per-interface sums."""

    components: dict[str, InterfaceComparison]   # wall, window, floor_roof,
                                                 # infiltration, zones, building
    interfaces: dict[str, InterfaceComparison]   # per-kind flow sums etc.


def whitebox_interface_test(bundle: ModelBundle,
                            cases: list[TestCase]) -> WhiteboxResult:
    """Compare composed-graph activations against oracle values.

    Components pool every model-instance activation (each wall, window and
    roof segment contributes a point per building); the per-kind flow sums
    feeding the zones are reported as separate interfaces as well.
    """
    interfaces = ENVELOPE_INTERFACES + ZONE_INTERFACES + ("building_energy",)
    acc: dict[str, tuple[list[float], list[float]]] = {i: ([], []) for i in interfaces}
    comp_acc: dict[str, tuple[list[float], list[float]]] = {
        c: ([], []) for c in ENVELOPE_COMPONENTS}
    units: dict[str, str] = {}
    for case in cases:
        geo = case.sample.geometry
        graph = composition.build_graph(case.config, geo, bundle,
                                        case.footprint_spec)
        _, trace = graph.evaluate(case.config)
        for interface in interfaces:
            entry = trace[interface]
            acc[interface][0].append(entry.value)
            acc[interface][1].append(interface_truth(case.sample, interface))
            units[interface] = entry.unit
        for nid, entry in trace.items():
            comp = _component_of_node(nid)
            if comp is not None:
                comp_acc[comp][0].append(entry.value)
                comp_acc[comp][1].append(
                    case.sample.summary.element_avg_flow[nid])

    def compare(name: str, pair, unit: str) -> InterfaceComparison:
        pred = np.array(pair[0])
        truth = np.array(pair[1])
        return InterfaceComparison(interface=name, unit=unit, predicted=pred,
                                   truth=truth, metrics=metrics(pred, truth))

    out_interfaces = {i: compare(i, acc[i], units[i]) for i in interfaces}
    out_components = {c: compare(c, comp_acc[c], "W_avg")
                      for c in ENVELOPE_COMPONENTS}
    for z in ZONE_INTERFACES + ("building_energy",):
        out_components[z] = out_interfaces[z]
    return WhiteboxResult(components=out_components, interfaces=out_interfaces)


# ---------------------------------------------------------------------------
# generalization experiment

@dataclass(frozen=True)
class ExperimentPlan:
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

    def train_config(self) -> mlp.TrainConfig:
        return mlp.TrainConfig(seed=self.train_seed, max_epochs=self.max_epochs,
                               patience=self.patience)


@dataclass
class ModelSetScores:
    eui: Metrics
    annual: Metrics
    predictions_eui: np.ndarray
    truth_eui: np.ndarray

    def as_dict(self) -> dict:
        return {"eui": self.eui.as_dict(), "annual": self.annual.as_dict()}


def score_component_model(bundle: ModelBundle, cases: list[TestCase]) -> ModelSetScores:
    pred_eui, pred_annual, truth_eui, truth_annual = [], [], [], []
    for case in cases:
        eui, annual, _ = composition.predict_design(
            bundle, case.config, case.footprint_spec)
        pred_eui.append(eui)
        pred_annual.append(annual)
        truth_eui.append(case.sample.summary.eui)
        truth_annual.append(case.sample.summary.annual_final_energy_kwh)
    return ModelSetScores(
        eui=metrics(pred_eui, truth_eui),
        annual=metrics(pred_annual, truth_annual),
        predictions_eui=np.array(pred_eui), truth_eui=np.array(truth_eui))


def score_monolithic_model(model: baseline.MonolithicModel,
                           cases: list[TestCase]) -> ModelSetScores:
    pred_eui, pred_annual, truth_eui, truth_annual = [], [], [], []
    for case in cases:
        annual = model.predict(case.config, case.sample.geometry)
        pred_annual.append(annual)
        pred_eui.append(annual / case.sample.geometry.total_floor_area)
        truth_eui.append(case.sample.summary.eui)
        truth_annual.append(case.sample.summary.annual_final_energy_kwh)
    return ModelSetScores(
        eui=metrics(pred_eui, truth_eui),
        annual=metrics(pred_annual, truth_annual),
        predictions_eui=np.array(pred_eui), truth_eui=np.array(truth_eui))


@dataclass
class ExperimentReport:
    plan: ExperimentPlan
    bundle: ModelBundle
    monolithic: baseline.MonolithicModel
    scores: dict[str, dict[str, ModelSetScores]]      # set -> model -> scores
    whitebox: WhiteboxResult
    component_validation_r2: dict[str, float]

    def as_dict(self) -> dict:
        d = {
            "plan": {k: getattr(self.plan, k) for k in (
                "n_train", "n_random", "n_setback", "n_heldout",
                "lhs_seed_random", "lhs_seed_setback", "lhs_seed_heldout",
                "shape_seed", "train_seed", "max_epochs", "patience")},
            "component_validation_r2": self.component_validation_r2,
            "scores": {s: {m: sc.as_dict() for m, sc in by_model.items()}
                       for s, by_model in self.scores.items()},
            "whitebox_components": {i: {"unit": c.unit, **c.metrics.as_dict()}
                                    for i, c in self.whitebox.components.items()},
            "whitebox_interfaces": {i: {"unit": c.unit, **c.metrics.as_dict()}
                                    for i, c in self.whitebox.interfaces.items()},
        }
        return d


def train_models(train_cases: list[TestCase], plan: ExperimentPlan
                 ) -> tuple[ModelBundle, baseline.MonolithicModel]:
    samples = [c.sample for c in train_cases]
    datasets = extract_component_datasets(samples)
    bundle = train_bundle(datasets, plan.train_config(),
                          provenance={"n_train": plan.n_train,
                                      "scheme": "sobol",
                                      "train_seed": plan.train_seed})
    feats = np.array([baseline.featurize(s.config, s.geometry) for s in samples])
    annual = np.array([s.summary.annual_final_energy_kwh for s in samples])
    mono_cfg = mlp.TrainConfig(seed=plan.train_seed + 1000,
                               max_epochs=plan.max_epochs, patience=plan.patience)
    mono = baseline.train_monolithic(feats, annual, mono_cfg)
    return bundle, mono


def run_generalization_experiment(plan: ExperimentPlan,
                                  prebuilt: tuple | None = None) -> ExperimentReport:
    """Full protocol: train on boxes, score on random shapes and the
    setback set, and run the white-box interface test on held-out boxes.

    ``prebuilt`` can carry (train_cases, bundle, monolithic) to reuse an
    already trained pipeline.
    """
    if prebuilt is None:
        train_cases = simulate_cases(make_train_samples(plan.n_train))
        bundle, mono = train_models(train_cases, plan)
    else:
        train_cases, bundle, mono = prebuilt

    random_cases = simulate_cases(make_random_shape_cases(
        plan.n_random, plan.lhs_seed_random, plan.shape_seed))
    setback_cases = simulate_cases(make_setback_cases(
        plan.n_setback, plan.lhs_seed_setback))
    heldout_cases = simulate_cases(
        [(c, {"kind": "box"}) for c in lhs_samples(
            design_space(), plan.n_heldout, plan.lhs_seed_heldout)])

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
    return ExperimentReport(
        plan=plan, bundle=bundle, monolithic=mono, scores=scores,
        whitebox=whitebox,
        component_validation_r2=bundle.validation_r2())


# ---------------------------------------------------------------------------
# low-energy distribution comparison

@dataclass
class DistributionSummary:
    count: int
    quantiles: dict[str, float]       # q05, q25, q50, q75, q95
    histogram: tuple[list[float], list[int]]   # bin edges, counts
    mean: float

    def as_dict(self) -> dict:
        return {"count": self.count, "mean": self.mean,
                "quantiles": self.quantiles,
                "histogram": {"edges": self.histogram[0],
                              "counts": self.histogram[1]}}


def _summarize(values: np.ndarray, edges: np.ndarray) -> DistributionSummary:
    qs = np.quantile(values, [0.05, 0.25, 0.5, 0.75, 0.95])
    counts, _ = np.histogram(values, bins=edges)
    return DistributionSummary(
        count=len(values),
        quantiles={"q05": float(qs[0]), "q25": float(qs[1]), "q50": float(qs[2]),
                   "q75": float(qs[3]), "q95": float(qs[4])},
        histogram=([float(e) for e in edges], [int(c) for c in counts]),
        mean=float(values.mean()))


@dataclass
class LowEnergyComparison:
    threshold: float
    eui_node: str
    n_total: int
    n_low: int
    empty_subset: bool
    per_quantity: dict[str, dict[str, DistributionSummary]]   # name -> {all, low}

    def as_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "n_total": self.n_total,
            "n_low": self.n_low,
            "empty_subset": self.empty_subset,
            "per_quantity": {
                name: {k: s.as_dict() for k, s in subsets.items()}
                for name, subsets in self.per_quantity.items()},
        }


def low_energy_distribution_compare(dataset: LocalDataset,
                                    threshold: float = 60.0,
                                    eui_node: str = "building_energy",
                                    bins: int = 20) -> LowEnergyComparison:
    """Split a local exploration sample at EUI < threshold and summarize
    every varied parameter and every interface activation for the full set
    and the low-energy subset."""
    eui = dataset.outputs[eui_node]
    low_mask = eui < threshold
    n_low = int(np.count_nonzero(low_mask))
    empty = n_low == 0

    per_quantity: dict[str, dict[str, DistributionSummary]] = {}

    def add(name: str, values: np.ndarray):
        finite = values[np.isfinite(values)]
        if len(finite) == 0:
            return
        lo, hi = float(finite.min()), float(finite.max())
        if hi <= lo:
            hi = lo + max(1e-9, abs(lo) * 1e-9)
        edges = np.linspace(lo, hi, bins + 1)
        entry = {"all": _summarize(values, edges)}
        if not empty:
            entry["low"] = _summarize(values[low_mask], edges)
        per_quantity[name] = entry

    for j, p in enumerate(dataset.parameters):
        add(f"parameter.{p}", dataset.x[:, j])
    for nid in dataset.output_ids():
        add(f"interface.{nid}", dataset.outputs[nid])

    return LowEnergyComparison(
        threshold=threshold, eui_node=eui_node, n_total=len(eui),
        n_low=n_low, empty_subset=empty, per_quantity=per_quantity)
