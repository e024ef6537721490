"""Monolithic baseline: one regressor over parametric features plus
relative compactness.

This is the conventional approach the component system is compared
against: all design parameters and a single shape descriptor go into one
network predicting annual energy. Relative compactness here is volume per
envelope area (m3/m2); the inverse convention (envelope per volume) is
exposed as a separate accessor for reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mlp
from .design import DesignConfig
from .geometry import GeometrySummary

MONOLITHIC_TAG = "monolithic"

# Fixed, versioned feature order. Setpoints are study constants, retained
# for schema fidelity; they are dropped at training time because a
# constant feature cannot be min-max scaled (see train_monolithic).
MONOLITHIC_FEATURES: tuple[tuple[str, str], ...] = (
    ("floor_area", "m2"),
    ("height", "m"),
    ("num_floors", "-"),
    ("relative_compactness", "m3/m2"),
    ("u_wall", "W/m2K"),
    ("u_ground", "W/m2K"),
    ("u_roof", "W/m2K"),
    ("u_window", "W/m2K"),
    ("g_value", "-"),
    ("permeability", "m3/m2h"),
    ("internal_mass", "kJ/m2K"),
    ("wwr_north", "-"),
    ("wwr_east", "-"),
    ("wwr_south", "-"),
    ("wwr_west", "-"),
    ("operating_hours", "h"),
    ("light_gain", "W/m2"),
    ("equipment_gain", "W/m2"),
    ("occupancy", "m2/person"),
    ("heating_setpoint", "degC"),
    ("cooling_setpoint", "degC"),
    ("boiler_efficiency", "-"),
    ("cop_heating", "-"),
    ("cop_cooling", "-"),
)

FEATURE_NAMES = tuple(n for n, _ in MONOLITHIC_FEATURES)
FEATURE_UNITS = tuple(u for _, u in MONOLITHIC_FEATURES)
OUTPUT_NAME, OUTPUT_UNIT = "annual_energy", "kWh/a"


def relative_compactness(geometry: GeometrySummary) -> float:
    """Volume per envelope area, m3/m2."""
    if geometry.envelope_area <= 0.0:
        raise ValueError("zero envelope area")
    return geometry.volume / geometry.envelope_area


def surface_to_volume(geometry: GeometrySummary) -> float:
    """Envelope area per volume, m2/m3 (the inverse convention)."""
    return geometry.envelope_area / geometry.volume


def featurize(config: DesignConfig, geometry: GeometrySummary) -> np.ndarray:
    """One feature row in the fixed MONOLITHIC_FEATURES order."""
    return np.array([
        geometry.total_floor_area,
        geometry.height,
        float(config.num_floors),
        relative_compactness(geometry),
        config.u_wall,
        config.u_ground,
        config.u_roof,
        config.u_window,
        config.g_value,
        config.permeability,
        config.internal_mass_capacity,
        config.wwr_north,
        config.wwr_east,
        config.wwr_south,
        config.wwr_west,
        config.operating_hours,
        config.light_gain,
        config.equipment_gain,
        config.occupancy_density,
        config.heating_setpoint,
        config.cooling_setpoint,
        config.boiler_efficiency,
        config.cop_heating,
        config.cop_cooling,
    ], dtype=np.float64)


@dataclass
class MonolithicModel:
    """The trained baseline plus the feature columns it kept."""

    model: mlp.MlpModel
    kept_features: tuple[str, ...]
    dropped_features: tuple[str, ...]

    def predict(self, config: DesignConfig, geometry: GeometrySummary) -> float:
        """Annual energy in kWh/a. Out-of-range inputs still predict;
        extrapolation behavior is exactly what the baseline is probed for."""
        row = featurize(config, geometry)
        keep = [FEATURE_NAMES.index(n) for n in self.kept_features]
        return float(self.model.predict(row[keep][None, :])[0])

    def predict_eui(self, config: DesignConfig, geometry: GeometrySummary) -> float:
        return self.predict(config, geometry) / geometry.total_floor_area


def train_monolithic(features: np.ndarray, annual_energy: np.ndarray,
                     config: mlp.TrainConfig) -> MonolithicModel:
    """Train the baseline with the identical hyperparameter protocol used
    for the components.

    Constant feature columns (the fixed setpoints) are dropped before
    scaling, with their names recorded on the model.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.shape[1] != len(FEATURE_NAMES):
        raise ValueError(
            f"expected {len(FEATURE_NAMES)} features, got {features.shape[1]}")
    spread = features.max(axis=0) - features.min(axis=0)
    keep = spread > 1e-12
    kept = tuple(n for n, k in zip(FEATURE_NAMES, keep) if k)
    dropped = tuple(n for n, k in zip(FEATURE_NAMES, keep) if not k)
    units = tuple(u for u, k in zip(FEATURE_UNITS, keep) if k)
    model = mlp.train(features[:, keep], annual_energy, config,
                      kept, units, OUTPUT_NAME, OUTPUT_UNIT)
    model.tags["slot"] = MONOLITHIC_TAG
    model.tags["dropped_features"] = list(dropped)
    return MonolithicModel(model=model, kept_features=kept, dropped_features=dropped)


def monolithic_from_model(model: mlp.MlpModel) -> MonolithicModel:
    if model.tags.get("slot") != MONOLITHIC_TAG:
        raise ValueError("model is not tagged as the monolithic baseline")
    dropped = tuple(model.tags.get("dropped_features", ()))
    kept = tuple(n for n in FEATURE_NAMES if n not in dropped)
    return MonolithicModel(model=model, kept_features=kept, dropped_features=dropped)
