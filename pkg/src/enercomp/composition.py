"""Hierarchical composition of trained component models.

A composition graph wires component model instances into a DAG for one
design: envelope models per facade/segment feed per-kind flow sums, which
feed the zone models, whose loads (divided by floor area) feed the
building model. Evaluating the graph yields the energy-use-intensity
prediction plus a trace of every interface value in engineering units,
which is what makes the composed network inspectable.

The core machinery is generic: nodes evaluate against a context of named
static values, so small synthetic graphs can be built and checked against
hand-nested function composition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .components import COMPONENT_SCHEMAS, ModelBundle
from .design import DesignConfig
from .geometry import (ORIENTATIONS, GeometrySummary, derive_geometry,
                       footprint_for)


class CompositionError(ValueError):
    pass


class EvaluationError(RuntimeError):
    pass


class PointModel(Protocol):
    """What a graph node needs from a regressor."""

    @property
    def input_names(self) -> tuple[str, ...]: ...
    @property
    def output_name(self) -> str: ...
    @property
    def output_unit(self) -> str: ...
    def predict(self, x: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class StaticInput:
    key: str    # context key


@dataclass(frozen=True)
class EdgeInput:
    producer: str    # node id


Binding = StaticInput | EdgeInput


@dataclass
class ModelNode:
    node_id: str
    model: PointModel
    bindings: tuple[Binding, ...]
    stage: float

    @property
    def output_name(self) -> str:
        return self.model.output_name

    @property
    def unit(self) -> str:
        return self.model.output_unit


@dataclass
class SumNode:
    node_id: str
    output_name: str
    unit: str
    producers: tuple[str, ...]
    stage: float


@dataclass
class ScaleNode:
    """Multiplies or divides a producer by a static context value."""

    node_id: str
    output_name: str
    unit: str
    producer: str
    factor_key: str
    op: str     # "mul" or "div"
    stage: float


Node = ModelNode | SumNode | ScaleNode


@dataclass(frozen=True)
class TraceEntry:
    node_id: str
    output_name: str
    value: float
    unit: str


class ActivationTrace(dict):
    """Map node id -> TraceEntry for one evaluation."""

    def value(self, node_id: str) -> float:
        return self[node_id].value


class CompositionGraph:
    """Immutable-after-build DAG of component instances."""

    def __init__(self, output_node: str,
                 context_builder: Callable[[DesignConfig], dict] | None = None,
                 footprint_spec: dict | None = None):
        self._nodes: dict[str, Node] = {}
        self.output_node = output_node
        self.context_builder = context_builder
        self.footprint_spec = footprint_spec
        self._order: list[str] | None = None

    # -- construction -------------------------------------------------

    def add(self, node: Node) -> None:
        if node.node_id in self._nodes:
            raise CompositionError(f"duplicate node id {node.node_id!r}")
        self._nodes[node.node_id] = node
        self._order = None

    @property
    def nodes(self) -> dict[str, Node]:
        return self._nodes

    def _dependencies(self, node: Node) -> list[str]:
        if isinstance(node, ModelNode):
            return [b.producer for b in node.bindings if isinstance(b, EdgeInput)]
        if isinstance(node, SumNode):
            return list(node.producers)
        return [node.producer]

    def validate(self) -> None:
        """Check completeness, acyclicity and unit agreement on every edge."""
        if self.output_node not in self._nodes:
            raise CompositionError(f"output node {self.output_node!r} missing")
        for node in self._nodes.values():
            for dep in self._dependencies(node):
                if dep not in self._nodes:
                    raise CompositionError(
                        f"{node.node_id}: consumes unknown node {dep!r}")
            if isinstance(node, ModelNode):
                if len(node.bindings) != len(node.model.input_names):
                    raise CompositionError(
                        f"{node.node_id}: {len(node.bindings)} bindings for "
                        f"{len(node.model.input_names)} inputs")
                units = getattr(node.model, "input_units", None)
                if units is None and hasattr(node.model, "x_scaler"):
                    units = node.model.x_scaler.units
                for i, b in enumerate(node.bindings):
                    if isinstance(b, EdgeInput) and units is not None:
                        want = units[i]
                        have = self._nodes[b.producer]
                        have_unit = have.unit if not isinstance(have, ModelNode) \
                            else have.model.output_unit
                        if have_unit != want:
                            name = node.model.input_names[i]
                            raise CompositionError(
                                f"unit mismatch on edge {b.producer} -> "
                                f"{node.node_id}.{name}: {have_unit} != {want}")
            elif isinstance(node, SumNode):
                for p in node.producers:
                    prod = self._nodes[p]
                    pu = prod.unit if not isinstance(prod, ModelNode) \
                        else prod.model.output_unit
                    if pu != node.unit:
                        raise CompositionError(
                            f"unit mismatch on edge {p} -> {node.node_id}: "
                            f"{pu} != {node.unit}")
        self.topo_order()

    def topo_order(self) -> list[str]:
        """Deterministic topological order (ready nodes sorted by id), so
        the evaluation sequence does not depend on insertion order."""
        if self._order is not None:
            return self._order
        deps = {nid: set(self._dependencies(n)) for nid, n in self._nodes.items()}
        remaining = dict(deps)
        order: list[str] = []
        while remaining:
            ready = sorted(nid for nid, d in remaining.items() if not d)
            if not ready:
                raise CompositionError("graph has a cycle")
            for nid in ready:
                order.append(nid)
                del remaining[nid]
            for d in remaining.values():
                d.difference_update(ready)
        self._order = order
        return order

    # -- evaluation ----------------------------------------------------

    def evaluate_context(self, context: dict[str, float]) -> tuple[float, ActivationTrace]:
        """Evaluate all nodes in topological order against named statics."""
        values: dict[str, float] = {}
        trace = ActivationTrace()
        for nid in self.topo_order():
            node = self._nodes[nid]
            if isinstance(node, ModelNode):
                row = np.empty(len(node.bindings))
                for i, b in enumerate(node.bindings):
                    if isinstance(b, StaticInput):
                        try:
                            row[i] = context[b.key]
                        except KeyError:
                            raise EvaluationError(
                                f"{nid}: missing static input {b.key!r}") from None
                    else:
                        row[i] = values[b.producer]
                out = float(node.model.predict(row[None, :])[0])
                unit = node.model.output_unit
                name = node.model.output_name
            elif isinstance(node, SumNode):
                out = math.fsum(values[p] for p in node.producers)
                unit, name = node.unit, node.output_name
            else:
                factor = context.get(node.factor_key)
                if factor is None:
                    raise EvaluationError(
                        f"{nid}: missing static factor {node.factor_key!r}")
                out = values[node.producer] * factor if node.op == "mul" \
                    else values[node.producer] / factor
                unit, name = node.unit, node.output_name
            if not math.isfinite(out):
                raise EvaluationError(f"non-finite activation at node {nid!r}")
            values[nid] = out
            trace[nid] = TraceEntry(nid, name, out, unit)
        return values[self.output_node], trace

    def evaluate(self, config: DesignConfig) -> tuple[float, ActivationTrace]:
        """Evaluate for a design configuration, re-deriving the static
        context (geometry included) so perturbed variants flow through."""
        if self.context_builder is None:
            raise EvaluationError("graph has no context builder; "
                                  "use evaluate_context")
        return self.evaluate_context(self.context_builder(config))


# ---------------------------------------------------------------------------
# building graph

def building_context(config: DesignConfig, geometry: GeometrySummary) -> dict[str, float]:
    ctx: dict[str, float] = {
        "total_floor_area": geometry.total_floor_area,
        "envelope_area": geometry.envelope_area,
        "height": geometry.height,
        "ground_area": geometry.ground_area,
        "total_window_area": geometry.total_window_area,
        "u_wall": config.u_wall,
        "u_ground": config.u_ground,
        "u_roof": config.u_roof,
        "u_window": config.u_window,
        "g_value": config.g_value,
        "slab_heat_capacity": config.slab_heat_capacity,
        "internal_mass_capacity": config.internal_mass_capacity,
        "permeability": config.permeability,
        "boiler_efficiency": config.boiler_efficiency,
        "cop_heating": config.cop_heating,
        "cop_cooling": config.cop_cooling,
        "operating_hours": config.operating_hours,
        "light_gain": config.light_gain,
        "equipment_gain": config.equipment_gain,
        "occupancy_density": config.occupancy_density,
    }
    for o in ORIENTATIONS:
        ctx[f"wall_{o}.area"] = geometry.wall_area_by_orientation[o]
        ctx[f"window_{o}.area"] = geometry.window_area_by_orientation[o]
        ctx[f"azimuth_{o}"] = geometry.azimuth_by_orientation[o]
    for level, area in geometry.roof_segments:
        ctx[f"roof_l{level}.area"] = area
    return ctx


def build_graph(config: DesignConfig, geometry: GeometrySummary,
                bundle: ModelBundle,
                footprint_spec: dict | None = None) -> CompositionGraph:
    """Wire the component DAG for one design.

    One node per wall/window orientation with positive area, one per roof
    segment, one floor and one infiltration node; per-kind sum nodes; three
    zone models; per-area load scalers; the building model; and an annual
    energy scaler on top. The graph keeps the footprint descriptor so that
    geometry-changing parameter variations re-derive their static inputs.
    """
    for slot in COMPONENT_SCHEMAS:
        if slot not in bundle.models:
            raise CompositionError(f"bundle is missing model {slot!r}")

    spec = footprint_spec or {"kind": "box"}

    def context_builder(cfg: DesignConfig) -> dict[str, float]:
        geo = derive_geometry(cfg, footprint_for(cfg, spec))
        return building_context(cfg, geo)

    g = CompositionGraph("annual_energy", context_builder, spec)

    wall_ids, window_ids = [], []
    for o in ORIENTATIONS:
        if geometry.wall_area_by_orientation[o] > 0.0:
            nid = f"wall_{o}"
            g.add(ModelNode(nid, bundle.models["wall"], (
                StaticInput(f"wall_{o}.area"), StaticInput(f"azimuth_{o}"),
                StaticInput("u_wall")), stage=1.0))
            wall_ids.append(nid)
        if geometry.window_area_by_orientation[o] > 0.0:
            nid = f"window_{o}"
            g.add(ModelNode(nid, bundle.models["window"], (
                StaticInput(f"window_{o}.area"), StaticInput(f"azimuth_{o}"),
                StaticInput("u_window"), StaticInput("g_value")), stage=1.0))
            window_ids.append(nid)

    g.add(ModelNode("floor", bundle.models["floor"], (
        StaticInput("ground_area"), StaticInput("u_ground"),
        StaticInput("slab_heat_capacity")), stage=1.0))
    roof_ids = []
    for level, _area in geometry.roof_segments:
        nid = f"roof_l{level}"
        g.add(ModelNode(nid, bundle.models["roof"], (
            StaticInput(f"roof_l{level}.area"), StaticInput("u_roof"),
            StaticInput("slab_heat_capacity")), stage=1.0))
        roof_ids.append(nid)
    g.add(ModelNode("infiltration", bundle.models["infiltration"], (
        StaticInput("envelope_area"), StaticInput("height"),
        StaticInput("permeability"), StaticInput("slab_heat_capacity")),
        stage=1.0))

    g.add(SumNode("wall_flow", "wall_heat_flow", "W_avg", tuple(wall_ids), 1.5))
    g.add(SumNode("window_flow", "window_heat_flow", "W_avg", tuple(window_ids), 1.5))
    g.add(SumNode("floor_flow", "floor_heat_flow", "W_avg", ("floor",), 1.5))
    g.add(SumNode("roof_flow", "roof_heat_flow", "W_avg", tuple(roof_ids), 1.5))
    g.add(SumNode("infiltration_flow", "infiltration_heat_flow", "W_avg",
                  ("infiltration",), 1.5))

    zone_flow_edges = (EdgeInput("wall_flow"), EdgeInput("window_flow"),
                       EdgeInput("floor_flow"), EdgeInput("roof_flow"),
                       EdgeInput("infiltration_flow"))
    zone_static = (StaticInput("internal_mass_capacity"),
                   StaticInput("light_gain"), StaticInput("equipment_gain"),
                   StaticInput("operating_hours"), StaticInput("occupancy_density"))
    for slot in ("zone_heating", "zone_cooling"):
        g.add(ModelNode(slot, bundle.models[slot],
                        (StaticInput("total_floor_area"),) + zone_flow_edges + zone_static,
                        stage=2.0))
    g.add(ModelNode("zone_lighting", bundle.models["zone_lighting"], (
        StaticInput("total_floor_area"), StaticInput("light_gain"),
        StaticInput("operating_hours"), StaticInput("total_window_area"),
        StaticInput("g_value")), stage=2.0))

    for load in ("heating", "cooling", "lighting"):
        g.add(ScaleNode(f"{load}_per_area", f"{load}_load", "W/m2",
                        f"zone_{load}", "total_floor_area", "div", 2.5))

    g.add(ModelNode("building_energy", bundle.models["building_energy"], (
        StaticInput("boiler_efficiency"), StaticInput("cop_heating"),
        StaticInput("cop_cooling"), EdgeInput("heating_per_area"),
        EdgeInput("cooling_per_area"), EdgeInput("lighting_per_area")),
        stage=3.0))

    g.add(ScaleNode("annual_energy", "annual_energy", "kWh/a",
                    "building_energy", "total_floor_area", "mul", 3.5))
    g.validate()
    return g


def predict_design(bundle: ModelBundle, config: DesignConfig,
                   footprint_spec: dict | None = None
                   ) -> tuple[float, float, ActivationTrace]:
    """Convenience: build and evaluate in one step.

    Returns (eui kWh/m2a, annual energy kWh/a, trace)."""
    fp = footprint_for(config, footprint_spec)
    geometry = derive_geometry(config, fp)
    graph = build_graph(config, geometry, bundle, footprint_spec)
    annual, trace = graph.evaluate(config)
    eui = trace.value("building_energy")
    return eui, annual, trace


# ---------------------------------------------------------------------------
# export

def graph_to_dict(graph: CompositionGraph,
                  config: DesignConfig | None = None) -> dict:
    """Structure export for the UI diagram; includes static input values
    when a configuration is given."""
    context = None
    if config is not None and graph.context_builder is not None:
        context = graph.context_builder(config)
    nodes, edges = [], []
    for nid in graph.topo_order():
        node = graph.nodes[nid]
        entry = {"id": nid, "stage": node.stage}
        if isinstance(node, ModelNode):
            entry["type"] = "model"
            entry["output"] = node.model.output_name
            entry["unit"] = node.model.output_unit
            statics = {}
            for b, name in zip(node.bindings, node.model.input_names):
                if isinstance(b, StaticInput):
                    statics[name] = context[b.key] if context else None
                else:
                    edges.append({"from": b.producer, "to": nid, "input": name})
            entry["static_inputs"] = statics
        elif isinstance(node, SumNode):
            entry["type"] = "sum"
            entry["output"] = node.output_name
            entry["unit"] = node.unit
            for p in node.producers:
                edges.append({"from": p, "to": nid, "input": node.output_name})
        else:
            entry["type"] = "scale"
            entry["output"] = node.output_name
            entry["unit"] = node.unit
            entry["op"] = node.op
            entry["factor"] = node.factor_key
            edges.append({"from": node.producer, "to": nid,
                          "input": node.output_name})
        nodes.append(entry)
    return {"output_node": graph.output_node, "nodes": nodes, "edges": edges}


def trace_to_list(trace: ActivationTrace) -> list[dict]:
    return [{"node": e.node_id, "output": e.output_name,
             "value": e.value, "unit": e.unit}
            for e in trace.values()]
