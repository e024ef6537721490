"""JSON-over-HTTP service for interactive design exploration.

Stateless handlers over an immutable model bundle loaded at startup.
Malformed request bodies return 400 with the offending field path;
syntactically valid but out-of-range designs return 422 carrying the full
prediction plus warnings (extrapolation is something the user should see,
not an error); non-finite evaluations return 500.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Literal

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import composition, sensitivity, trees
from .baseline import MonolithicModel
from .components import ModelBundle
from .composition import EvaluationError
from .design import (DEFAULT_COOLING_SETPOINT, DEFAULT_HEATING_SETPOINT,
                     DesignConfig, design_space, validate_config)
from .geometry import derive_geometry, footprint_for
from .mlp import model_to_dict
from .pipeline import tree_dataset

DSE_BATCH_CAP = 10_000


class DesignPayload(BaseModel):
    length: float
    width: float
    floor_height: float
    orientation: float
    num_floors: int
    u_wall: float
    u_ground: float
    u_roof: float
    u_internal_floor: float
    u_window: float
    g_value: float
    slab_heat_capacity: float
    internal_mass_capacity: float
    permeability: float
    wwr_north: float
    wwr_east: float
    wwr_south: float
    wwr_west: float
    boiler_efficiency: float
    cop_heating: float
    cop_cooling: float
    operating_hours: float
    light_gain: float
    equipment_gain: float
    occupancy_density: float
    heating_setpoint: float = DEFAULT_HEATING_SETPOINT
    cooling_setpoint: float = DEFAULT_COOLING_SETPOINT

    def to_config(self) -> DesignConfig:
        return DesignConfig(**self.model_dump())


class PredictRequest(BaseModel):
    config: DesignPayload
    footprint: dict | None = None


class SensitivityRequest(BaseModel):
    config: DesignPayload
    footprint: dict | None = None
    delta: float = Field(default=0.05, gt=0.0, le=0.2)
    n: int = Field(default=0, ge=0)
    seed: int = 0
    parameters: list[str] | None = None


class TreeRequest(BaseModel):
    config: DesignPayload
    footprint: dict | None = None
    target: str = "window"
    max_depth: int = Field(default=3, ge=0, le=8)
    min_leaf: int = Field(default=10, ge=1)
    delta: float = Field(default=0.05, gt=0.0, le=0.2)
    n: int = Field(default=0, ge=0)
    seed: int = 0
    leaf_models: bool = True


class DseRequest(BaseModel):
    variants: list[DesignPayload]
    footprint: dict | None = None


def _bundle_version(bundle: ModelBundle) -> str:
    h = hashlib.sha256()
    for slot in sorted(bundle.models):
        h.update(json.dumps(model_to_dict(bundle.models[slot]),
                            sort_keys=True).encode())
    return h.hexdigest()[:12]


def _graph_for(bundle: ModelBundle, config: DesignConfig, spec: dict | None):
    geometry = derive_geometry(config, footprint_for(config, spec))
    return composition.build_graph(config, geometry, bundle, spec), geometry


def create_app(bundle: ModelBundle,
               monolithic: MonolithicModel | None = None) -> FastAPI:
    app = FastAPI(title="enercomp service", version="1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])
    version = _bundle_version(bundle)

    @app.exception_handler(RequestValidationError)
    async def schema_error(_req: Request, exc: RequestValidationError):
        details = [{"field": ".".join(str(p) for p in e["loc"] if p != "body"),
                    "message": e["msg"]} for e in exc.errors()]
        return JSONResponse(status_code=400,
                            content={"error": "schema", "details": details})

    @app.exception_handler(EvaluationError)
    async def eval_error(_req: Request, exc: EvaluationError):
        return JSONResponse(status_code=500,
                            content={"error": "evaluation", "message": str(exc)})

    def predict_payload(config: DesignConfig, spec: dict | None) -> tuple[dict, int]:
        violations = validate_config(config, design_space())
        eui, annual, trace = composition.predict_design(bundle, config, spec)
        body = {
            "eui": eui,
            "annual_energy": annual,
            "activations": composition.trace_to_list(trace),
            "model_version": version,
            "warnings": [{"field": v.field, "message": v.message()}
                         for v in violations],
        }
        return body, (422 if violations else 200)

    @app.get("/model/info")
    def model_info():
        return {
            "model_version": version,
            "provenance": bundle.provenance,
            "validation_r2": bundle.validation_r2(),
            "slots": sorted(bundle.models),
            "monolithic": None if monolithic is None else {
                "validation_r2": monolithic.model.report.validation_r2
                if monolithic.model.report else None,
                "dropped_features": list(monolithic.dropped_features),
            },
        }

    @app.post("/predict")
    def predict(req: PredictRequest):
        body, status = predict_payload(req.config.to_config(), req.footprint)
        return JSONResponse(status_code=status, content=body)

    @app.post("/sensitivity")
    def sensitivity_endpoint(req: SensitivityRequest):
        config = req.config.to_config()
        graph, _ = _graph_for(bundle, config, req.footprint)
        plan = sensitivity.make_plan(config, parameters=req.parameters,
                                     delta=req.delta, count=req.n,
                                     seed=req.seed)
        ds = sensitivity.dse_samples(plan, graph)
        matrix = sensitivity.sensitivities(ds)
        return sensitivity.matrix_to_dict(matrix)

    @app.post("/tree")
    def tree_endpoint(req: TreeRequest):
        config = req.config.to_config()
        graph, _ = _graph_for(bundle, config, req.footprint)
        plan = sensitivity.make_plan(config, delta=req.delta, count=req.n,
                                     seed=req.seed)
        ds = sensitivity.dse_samples(plan, graph)
        try:
            x, y, names, units, tname, tunit = tree_dataset(ds, req.target)
        except ValueError as exc:
            return JSONResponse(status_code=400,
                                content={"error": "schema",
                                         "details": [{"field": "target",
                                                      "message": str(exc)}]})
        tree = trees.fit_cart(x, y, max_depth=req.max_depth,
                              min_leaf=req.min_leaf, feature_names=names,
                              feature_units=units, target_name=tname,
                              target_unit=tunit)
        rules = trees.extract_rules(tree)
        leaf_models: list[dict] = []
        if req.leaf_models:
            for i, leaf in enumerate(tree.leaves()):
                varying = tuple(
                    n for j, n in enumerate(names)
                    if np.ptp(np.asarray(x)[leaf.sample_indices][:, j]) > 1e-12)
                if not varying:
                    continue
                try:
                    lm = trees.leaf_linear_model(tree, leaf, varying, x, y)
                except trees.LeafModelError:
                    continue
                leaf_models.append({
                    "leaf": i,
                    "count": lm.count,
                    "intercept": lm.intercept,
                    "target_unit": lm.target_unit,
                    "terms": [{"feature": f, "unit": u, "coefficient": c}
                              for f, u, c in zip(lm.features, lm.units,
                                                 lm.coefficients)],
                })
        return {
            "tree": trees.tree_to_dict(tree),
            "rules": [{"text": r.text(),
                       "prediction": r.prediction,
                       "unit": r.unit,
                       "count": r.count,
                       "under_dependence": r.under_dependence,
                       "conditions": [{"feature": c.feature, "unit": c.unit,
                                       "comparator": c.comparator,
                                       "threshold": c.threshold}
                                      for c in r.conditions]}
                      for r in rules],
            "leaf_models": leaf_models,
            "n_samples": len(ds),
        }

    @app.post("/dse")
    def dse_endpoint(req: DseRequest):
        if len(req.variants) > DSE_BATCH_CAP:
            return JSONResponse(
                status_code=400,
                content={"error": "schema",
                         "details": [{"field": "variants",
                                      "message": f"batch size capped at {DSE_BATCH_CAP}"}]})
        results = []
        for variant in req.variants:
            config = variant.to_config()
            eui, annual, _ = composition.predict_design(bundle, config,
                                                        req.footprint)
            violations = validate_config(config, design_space())
            results.append({"eui": eui, "annual_energy": annual,
                            "out_of_range": bool(violations)})
        return {"results": results, "model_version": version}

    @app.get("/schema")
    def schema():
        return {
            "design": DesignPayload.model_json_schema(),
            "predict": PredictRequest.model_json_schema(),
            "sensitivity": SensitivityRequest.model_json_schema(),
            "tree": TreeRequest.model_json_schema(),
            "dse": DseRequest.model_json_schema(),
            "parameter_space": [
                {"name": r.name, "unit": r.unit, "low": r.low, "high": r.high,
                 "integer": r.integer} for r in design_space()],
        }

    return app
