"""Component schemas, per-component dataset extraction and bundle training.

Nine regressors cover the building decomposition: five envelope models
(wall, window, floor, roof, infiltration), three zone-load models
(heating, cooling, lighting) and one building-energy model. Schemas are
frozen; every training row is extracted from a simulated sample in the
exact input/output layout the schema declares. Zone and building models
train on simulated ground-truth interface inputs; composition later feeds
them predicted values.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import mlp
from .design import DesignConfig
from .geometry import ORIENTATIONS, GeometrySummary
from .oracle import PointSummary


class ComponentKind(enum.Enum):
    WALL = "Wall"
    WINDOW = "Window"
    FLOOR_ROOF = "FloorRoof"
    INFILTRATION = "Infiltration"
    ZONE_HEATING = "ZoneHeating"
    ZONE_COOLING = "ZoneCooling"
    ZONE_LIGHTING = "ZoneLighting"
    BUILDING_ENERGY = "BuildingEnergy"


@dataclass(frozen=True)
class ComponentSchema:
    slot: str                                  # model instance name
    kind: ComponentKind
    level: int
    inputs: tuple[tuple[str, str], ...]        # (name, unit)
    output: tuple[str, str]

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.inputs)

    @property
    def input_units(self) -> tuple[str, ...]:
        return tuple(u for _, u in self.inputs)


_ZONE_LOAD_INPUTS = (
    ("area", "m2"),
    ("wall_heat_flow", "W_avg"),
    ("window_heat_flow", "W_avg"),
    ("floor_heat_flow", "W_avg"),
    ("roof_heat_flow", "W_avg"),
    ("infiltration_heat_flow", "W_avg"),
    ("internal_mass", "kJ/m2K"),
    ("light_gain", "W/m2"),
    ("equipment_gain", "W/m2"),
    ("operating_hours", "h"),
    ("occupancy", "m2/person"),
)

COMPONENT_SCHEMAS: dict[str, ComponentSchema] = {s.slot: s for s in [
    ComponentSchema(
        "wall", ComponentKind.WALL, 1,
        (("area", "m2"), ("orientation", "deg"), ("u_value", "W/m2K")),
        ("heat_flow", "W_avg")),
    ComponentSchema(
        "window", ComponentKind.WINDOW, 1,
        (("area", "m2"), ("orientation", "deg"), ("u_value", "W/m2K"),
         ("g_value", "-")),
        ("heat_flow", "W_avg")),
    ComponentSchema(
        "floor", ComponentKind.FLOOR_ROOF, 1,
        (("area", "m2"), ("u_value", "W/m2K"), ("heat_capacity", "J/m3K")),
        ("heat_flow", "W_avg")),
    ComponentSchema(
        "roof", ComponentKind.FLOOR_ROOF, 1,
        (("area", "m2"), ("u_value", "W/m2K"), ("heat_capacity", "J/m3K")),
        ("heat_flow", "W_avg")),
    ComponentSchema(
        "infiltration", ComponentKind.INFILTRATION, 1,
        (("area", "m2"), ("height", "m"), ("permeability", "m3/m2h"),
         ("heat_capacity", "J/m3K")),
        ("heat_flow", "W_avg")),
    ComponentSchema("zone_heating", ComponentKind.ZONE_HEATING, 2,
                    _ZONE_LOAD_INPUTS, ("heating_load", "W")),
    ComponentSchema("zone_cooling", ComponentKind.ZONE_COOLING, 2,
                    _ZONE_LOAD_INPUTS, ("cooling_load", "W")),
    ComponentSchema(
        "zone_lighting", ComponentKind.ZONE_LIGHTING, 2,
        (("area", "m2"), ("light_gain", "W/m2"), ("operating_hours", "h"),
         ("window_area", "m2"), ("g_value", "-")),
        ("lighting_load", "W")),
    ComponentSchema(
        "building_energy", ComponentKind.BUILDING_ENERGY, 3,
        (("boiler_efficiency", "-"), ("cop_heating", "-"), ("cop_cooling", "-"),
         ("heating_load", "W/m2"), ("cooling_load", "W/m2"),
         ("lighting_load", "W/m2")),
        ("energy_use_intensity", "kWh/m2a")),
]}

SLOTS: tuple[str, ...] = tuple(COMPONENT_SCHEMAS)   # nine model instances
LEVEL1_SLOTS = ("wall", "window", "floor", "roof", "infiltration")


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class SimSample:
    """One simulated design: configuration, geometry and point summary."""

    config: DesignConfig
    geometry: GeometrySummary
    summary: PointSummary


@dataclass
class Dataset:
    schema: ComponentSchema
    x: np.ndarray
    y: np.ndarray

    def __len__(self) -> int:
        return len(self.y)

    def header(self) -> list[str]:
        cols = [f"{n} [{u}]" for n, u in self.schema.inputs]
        cols.append(f"{self.schema.output[0]} [{self.schema.output[1]}]")
        return cols


def _zone_inputs(s: SimSample) -> list[float]:
    g, c, k = s.geometry, s.config, s.summary.kind_avg_flow
    return [g.total_floor_area, k["wall"], k["window"], k["floor"], k["roof"],
            k["infiltration"], c.internal_mass_capacity, c.light_gain,
            c.equipment_gain, c.operating_hours, c.occupancy_density]


def component_rows(sample: SimSample) -> dict[str, list[tuple[list[float], float]]]:
    """All training rows one simulated sample contributes, per slot."""
    c, g, summ = sample.config, sample.geometry, sample.summary
    flows = summ.element_avg_flow
    rows: dict[str, list[tuple[list[float], float]]] = {s: [] for s in SLOTS}

    for o in ORIENTATIONS:
        area = g.wall_area_by_orientation[o]
        if area > 0.0:
            key = f"wall_{o}"
            if key not in flows:
                raise ExtractionError(f"missing oracle flow for {key}")
            rows["wall"].append(
                ([area, g.azimuth_by_orientation[o], c.u_wall], flows[key]))
        w_area = g.window_area_by_orientation[o]
        if w_area > 0.0:
            key = f"window_{o}"
            if key not in flows:
                raise ExtractionError(f"missing oracle flow for {key}")
            rows["window"].append(
                ([w_area, g.azimuth_by_orientation[o], c.u_window, c.g_value],
                 flows[key]))

    rows["floor"].append(
        ([g.ground_area, c.u_ground, c.slab_heat_capacity], flows["floor"]))
    for level, area in g.roof_segments:
        key = f"roof_l{level}"
        if key not in flows:
            raise ExtractionError(f"missing oracle flow for {key}")
        rows["roof"].append(([area, c.u_roof, c.slab_heat_capacity], flows[key]))
    rows["infiltration"].append(
        ([g.envelope_area, g.height, c.permeability, c.slab_heat_capacity],
         flows["infiltration"]))

    zone_in = _zone_inputs(sample)
    rows["zone_heating"].append((zone_in, summ.heating_load_w))
    rows["zone_cooling"].append((list(zone_in), summ.cooling_load_w))
    rows["zone_lighting"].append(
        ([g.total_floor_area, c.light_gain, c.operating_hours,
          g.total_window_area, c.g_value], summ.lighting_load_w))

    area = g.total_floor_area
    rows["building_energy"].append(
        ([c.boiler_efficiency, c.cop_heating, c.cop_cooling,
          summ.heating_load_w / area, summ.cooling_load_w / area,
          summ.lighting_load_w / area], summ.eui))
    return rows


def extract_component_datasets(samples: Sequence[SimSample]) -> dict[str, Dataset]:
    """Aligned per-slot datasets from simulated samples.

    Each wall/window instance contributes one row per building; zone rows
    consume the per-kind summed envelope flows of the same sample.
    """
    if not samples:
        raise ExtractionError("need at least one sample")
    acc: dict[str, list[tuple[list[float], float]]] = {s: [] for s in SLOTS}
    for i, sample in enumerate(samples):
        try:
            for slot, slot_rows in component_rows(sample).items():
                acc[slot].extend(slot_rows)
        except KeyError as exc:
            raise ExtractionError(f"sample {i}: missing oracle field {exc}") from exc
    out = {}
    for slot, pairs in acc.items():
        schema = COMPONENT_SCHEMAS[slot]
        x = np.array([p[0] for p in pairs], dtype=np.float64)
        y = np.array([p[1] for p in pairs], dtype=np.float64)
        out[slot] = Dataset(schema=schema, x=x, y=y)
    return out


# ---------------------------------------------------------------------------
# bundle

class BundleTrainingError(RuntimeError):
    pass


@dataclass
class ModelBundle:
    """All nine trained component models plus their provenance."""

    models: dict[str, mlp.MlpModel]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [s for s in SLOTS if s not in self.models]
        if missing:
            raise ValueError(f"bundle incomplete, missing: {missing}")
        for slot, model in self.models.items():
            schema = COMPONENT_SCHEMAS[slot]
            if model.input_names != schema.input_names:
                raise ValueError(
                    f"{slot}: model inputs {model.input_names} do not match "
                    f"schema {schema.input_names}")

    def validation_r2(self) -> dict[str, float]:
        return {s: m.report.validation_r2 for s, m in self.models.items()
                if m.report is not None}


def train_bundle(datasets: dict[str, Dataset], config: mlp.TrainConfig,
                 provenance: dict | None = None) -> ModelBundle:
    """Train all nine component models independently.

    Each slot trains with a seed offset from the base seed by its position
    in the fixed slot order, so a bundle is reproducible from one seed.
    """
    models = {}
    for i, slot in enumerate(SLOTS):
        ds = datasets.get(slot)
        if ds is None or len(ds) == 0:
            raise BundleTrainingError(f"dataset for {slot!r} is empty")
        slot_cfg = mlp.TrainConfig(
            learning_rate=config.learning_rate,
            hidden_grid=config.hidden_grid,
            l2_grid=config.l2_grid,
            validation_fraction=config.validation_fraction,
            patience=config.patience,
            max_epochs=config.max_epochs,
            seed=config.seed + i)
        try:
            model = mlp.train(
                ds.x, ds.y, slot_cfg,
                ds.schema.input_names, ds.schema.input_units,
                ds.schema.output[0], ds.schema.output[1])
        except Exception as exc:
            raise BundleTrainingError(f"training {slot!r} failed: {exc}") from exc
        model.tags["slot"] = slot
        model.tags["kind"] = ds.schema.kind.value
        model.tags["level"] = ds.schema.level
        models[slot] = model
    return ModelBundle(models=models, provenance=dict(provenance or {}))


BUNDLE_FORMAT = "enercomp.bundle/1"


def save_bundle(bundle: ModelBundle, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format": BUNDLE_FORMAT,
        "slots": {},
        "provenance": bundle.provenance,
    }
    for slot in SLOTS:
        fname = f"{slot}.json"
        mlp.save_model(bundle.models[slot], directory / fname)
        report = bundle.models[slot].report
        manifest["slots"][slot] = {
            "file": fname,
            "kind": COMPONENT_SCHEMAS[slot].kind.value,
            "level": COMPONENT_SCHEMAS[slot].level,
            "validation_r2": None if report is None else report.validation_r2,
        }
    (directory / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_bundle(directory: str | Path) -> ModelBundle:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    if manifest.get("format") != BUNDLE_FORMAT:
        raise ValueError(f"unsupported bundle format {manifest.get('format')!r}")
    models = {slot: mlp.load_model(directory / entry["file"])
              for slot, entry in manifest["slots"].items()}
    return ModelBundle(models=models, provenance=manifest.get("provenance", {}))


# ---------------------------------------------------------------------------
# dataset persistence

def dataset_to_csv(ds: Dataset, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ds.header())
        for xi, yi in zip(ds.x, ds.y):
            w.writerow([repr(v) for v in xi] + [repr(yi)])


def dataset_from_csv(path: str | Path, slot: str) -> Dataset:
    schema = COMPONENT_SCHEMAS[slot]
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    expect = [f"{n} [{u}]" for n, u in schema.inputs]
    expect.append(f"{schema.output[0]} [{schema.output[1]}]")
    if rows[0] != expect:
        raise ExtractionError(f"{slot}: header mismatch, got {rows[0]}")
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    return Dataset(schema=schema, x=data[:, :-1], y=data[:, -1])
