"""Deterministic hourly building-physics simulator (the ground truth).

A single-zone, lumped-capacitance model stepped hourly over a synthetic
year. It produces per-envelope-element heat flows, zone loads and annual
energy in exactly the quantities the component surrogates are trained on.
Sign convention: positive flow heats the zone.

Model constants, fixed and documented here:

* air volumetric heat capacity 1200 J/m3K (infiltration term)
* sol-air temperature T_sol = T_out + 0.6 * I / 25 (absorptivity over
  outside film coefficient)
* slab thickness 0.2 m (converts volumetric slab capacity to area capacity)
* ground temperature constant 10 degC
* occupants emit 90 W/person
* daylight reduces lighting by 0.2 * (window area * g) / floor area,
  capped at 50 %
* occupied weekday window starts at 08:00 and lasts ``operating_hours``
  (fractional trailing hours weight gains proportionally)
* day 0 of the synthetic year is a Monday
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .design import DesignConfig
from .geometry import ORIENTATIONS, GeometrySummary

HOURS_PER_YEAR = 8760
DAYS_PER_YEAR = 365
SECONDS_PER_HOUR = 3600.0

AIR_HEAT_CAPACITY = 1200.0   # J/m3K
SOLAIR_FACTOR = 0.6 / 25.0   # K per W/m2
SLAB_THICKNESS = 0.2         # m
GROUND_TEMPERATURE = 10.0    # degC
OCCUPANT_GAIN = 90.0         # W/person
DAYLIGHT_COEFF = 0.2
DAYLIGHT_CAP = 0.5
WORKDAY_START = 8.0          # h


class UnknownWeatherPreset(ValueError):
    pass


class OracleConfigError(ValueError):
    """Physically impossible configuration (for example zero capacitance)."""


@dataclass(frozen=True)
class WeatherSeries:
    """Hourly outdoor temperature and per-orientation irradiance."""

    t_out: np.ndarray                    # degC, 8760
    irradiance: dict[str, np.ndarray]    # W/m2, keys N/E/S/W/H

    def __post_init__(self):
        if len(self.t_out) != HOURS_PER_YEAR:
            raise ValueError("weather series must cover 8760 hours")
        for key, arr in self.irradiance.items():
            if len(arr) != HOURS_PER_YEAR:
                raise ValueError(f"irradiance[{key}] must cover 8760 hours")
            if np.any(arr < 0.0):
                raise ValueError(f"irradiance[{key}] has negative values")


@lru_cache(maxsize=4)
def synth_weather(preset: str = "temperate-default") -> WeatherSeries:
    """Synthesize the deterministic test-reference year.

    Temperature: annual cosine (peak day 202) plus a daily cosine peaking
    at 15:00. Horizontal irradiance: half-sine day shape (06:00 to 18:00)
    scaled by a seasonal cosine peaking at day 172. Facade orientations
    weight the horizontal series:

    * South: 0.75 * midday weight (the day-shape half-sine itself)
    * East: morning weight, a half-cosine peaking at 09:00
    * West: afternoon weight, a half-cosine peaking at 15:00
    * North: 0.2 (diffuse fraction only)
    """
    if preset != "temperate-default":
        raise UnknownWeatherPreset(f"unknown weather preset {preset!r}")
    t = np.arange(HOURS_PER_YEAR)
    d = t // 24
    h = t % 24
    t_out = (10.0
             + 10.0 * np.cos(2.0 * np.pi * (d - 202) / DAYS_PER_YEAR)
             + 5.0 * np.cos(2.0 * np.pi * (h - 15) / 24.0))
    day_shape = np.maximum(0.0, np.sin(np.pi * (h - 6) / 12.0))
    seasonal = 0.6 + 0.4 * np.cos(2.0 * np.pi * (d - 172) / DAYS_PER_YEAR)
    horizontal = 800.0 * day_shape * seasonal
    morning = np.maximum(0.0, np.cos(np.pi * (h - 9) / 6.0))
    afternoon = np.maximum(0.0, np.cos(np.pi * (h - 15) / 6.0))
    irr = {
        "H": horizontal,
        "S": 0.75 * horizontal * day_shape,
        "E": horizontal * morning,
        "W": horizontal * afternoon,
        "N": 0.2 * horizontal,
    }
    for a in irr.values():
        a.setflags(write=False)
    t_out.setflags(write=False)
    return WeatherSeries(t_out=t_out, irradiance=irr)


def occupancy_weight(operating_hours: float) -> np.ndarray:
    """Fraction of each hour of the year inside the weekday operating
    window. Weekends (day index mod 7 in {5, 6}) are zero."""
    t = np.arange(HOURS_PER_YEAR)
    d = t // 24
    h = t % 24
    start = WORKDAY_START
    end = WORKDAY_START + operating_hours
    w = np.clip(np.minimum(h + 1.0, end) - np.maximum(h.astype(float), start), 0.0, 1.0)
    w[(d % 7) >= 5] = 0.0
    return w


@dataclass
class SimulationResult:
    """Hourly series plus the annual aggregates used for training."""

    element_flows: dict[str, np.ndarray]   # W, per envelope element
    heating_load: np.ndarray               # W, >= 0
    cooling_load: np.ndarray               # W, >= 0
    lighting_load: np.ndarray              # W, >= 0
    indoor_temperature: np.ndarray         # degC
    occupancy: np.ndarray                  # fraction of hour occupied
    total_floor_area: float                # m2

    @property
    def occupied_mask(self) -> np.ndarray:
        return self.occupancy > 0.0

    @property
    def element_avg_flow(self) -> dict[str, float]:
        return {k: float(v.mean()) for k, v in self.element_flows.items()}

    @property
    def annual_heating_kwh(self) -> float:
        return float(self.heating_load.sum()) / 1000.0

    @property
    def annual_cooling_kwh(self) -> float:
        return float(self.cooling_load.sum()) / 1000.0

    @property
    def annual_lighting_kwh(self) -> float:
        return float(self.lighting_load.sum()) / 1000.0


def _element_conductances(config: DesignConfig, geometry: GeometrySummary,
                          weather: WeatherSeries):
    """Per element: (id, UA in W/K, hourly drive temperature degC,
    hourly T_in-independent gain W)."""
    elements = []
    zeros = np.zeros(HOURS_PER_YEAR)
    for o in ORIENTATIONS:
        area = geometry.wall_area_by_orientation[o]
        if area > 0.0:
            t_sol = weather.t_out + SOLAIR_FACTOR * weather.irradiance[o]
            elements.append((f"wall_{o}", config.u_wall * area, t_sol, zeros))
    for o in ORIENTATIONS:
        area = geometry.window_area_by_orientation[o]
        if area > 0.0:
            solar = config.g_value * area * weather.irradiance[o]
            elements.append((f"window_{o}", config.u_window * area,
                             weather.t_out, solar))
    t_sol_h = weather.t_out + SOLAIR_FACTOR * weather.irradiance["H"]
    for level, area in geometry.roof_segments:
        elements.append((f"roof_l{level}", config.u_roof * area, t_sol_h, zeros))
    ground_drive = np.full(HOURS_PER_YEAR, GROUND_TEMPERATURE)
    elements.append(("floor", config.u_ground * geometry.ground_area,
                     ground_drive, zeros))
    ach_volume = config.permeability * geometry.envelope_area / SECONDS_PER_HOUR
    elements.append(("infiltration", AIR_HEAT_CAPACITY * ach_volume,
                     weather.t_out, zeros))
    return elements


def simulate(config: DesignConfig, geometry: GeometrySummary,
             weather: WeatherSeries) -> SimulationResult:
    """Run the hourly balance for one design variant.

    The zone temperature follows an explicit Euler step of the lumped
    capacitance; an ideal HVAC clamps it into the setpoint band during
    weekday operating hours, and the clamping energies are the heating and
    cooling loads. Outside operating hours (and all weekend) the zone
    floats freely.
    """
    floor_area = geometry.total_floor_area
    capacitance = (config.internal_mass_capacity * 1000.0 * floor_area
                   + config.slab_heat_capacity * SLAB_THICKNESS * floor_area)
    if capacitance <= 0.0:
        raise OracleConfigError("non-positive thermal capacitance")

    elements = _element_conductances(config, geometry, weather)
    ua_total = sum(ua for _, ua, _, _ in elements)
    # T_in-independent part of the balance: sum(UA * drive) + solar + gains
    forcing = np.zeros(HOURS_PER_YEAR)
    for _, ua, drive, gain in elements:
        forcing += ua * drive + gain

    occ = occupancy_weight(config.operating_hours)
    people_gain = OCCUPANT_GAIN / config.occupancy_density
    internal = (config.light_gain + config.equipment_gain + people_gain) * floor_area * occ
    forcing = forcing + internal

    daylight = min(DAYLIGHT_CAP,
                   DAYLIGHT_COEFF * config.g_value * geometry.total_window_area / floor_area)
    lighting = config.light_gain * floor_area * (1.0 - daylight) * occ

    dt = SECONDS_PER_HOUR
    rate = dt / capacitance
    t_set_h, t_set_c = config.heating_setpoint, config.cooling_setpoint
    hvac_on = occ > 0.0

    t_in = np.empty(HOURS_PER_YEAR)
    heating = np.zeros(HOURS_PER_YEAR)
    cooling = np.zeros(HOURS_PER_YEAR)
    temp = t_set_h  # start the year at the heating setpoint
    forcing_list = forcing.tolist()
    hvac_list = hvac_on.tolist()
    for t in range(HOURS_PER_YEAR):
        t_in[t] = temp
        t_free = temp + rate * (forcing_list[t] - ua_total * temp)
        if hvac_list[t]:
            if t_free < t_set_h:
                heating[t] = capacitance * (t_set_h - t_free) / dt
                t_free = t_set_h
            elif t_free > t_set_c:
                cooling[t] = capacitance * (t_free - t_set_c) / dt
                t_free = t_set_c
        temp = t_free

    flows = {}
    for name, ua, drive, gain in elements:
        flows[name] = ua * (drive - t_in) + gain

    return SimulationResult(
        element_flows=flows,
        heating_load=heating,
        cooling_load=cooling,
        lighting_load=lighting,
        indoor_temperature=t_in,
        occupancy=occ,
        total_floor_area=floor_area,
    )


# ---------------------------------------------------------------------------
# point aggregation

ELEMENT_KINDS = ("wall", "window", "roof", "floor", "infiltration")


def kind_of_element(element_id: str) -> str:
    return element_id.split("_")[0] if "_" in element_id else element_id


@dataclass(frozen=True)
class PointSummary:
    """Annual point quantities for one simulated variant."""

    element_avg_flow: dict[str, float]    # W_avg per element instance
    kind_avg_flow: dict[str, float]       # W_avg summed per element kind
    heating_load_w: float                 # W, annual average
    cooling_load_w: float
    lighting_load_w: float
    annual_heating_kwh: float
    annual_cooling_kwh: float
    annual_lighting_kwh: float
    annual_final_energy_kwh: float
    eui: float                            # kWh/m2a


def aggregate(result: SimulationResult, config: DesignConfig) -> PointSummary:
    """Collapse hourly series to the point quantities the components use:
    envelope flows and zone loads as annual averages (W_avg / W), building
    output as kWh/m2a.

    Zone loads are annual averages, not occupied-hour averages, so that
    annual energy is an exact function of the load interfaces; the
    composed hierarchy must be a nesting of functions, and an
    occupied-hour average would leave the annual operating time as a
    hidden variable at the building interface."""
    avg = result.element_avg_flow
    kind_avg = {k: 0.0 for k in ELEMENT_KINDS}
    for name, v in avg.items():
        kind_avg[kind_of_element(name)] += v

    heat_w = float(result.heating_load.mean())
    cool_w = float(result.cooling_load.mean())
    light_w = float(result.lighting_load.mean())

    heat_kwh = result.annual_heating_kwh
    cool_kwh = result.annual_cooling_kwh
    light_kwh = result.annual_lighting_kwh
    final = (heat_kwh / (config.boiler_efficiency * config.cop_heating)
             + cool_kwh / config.cop_cooling
             + light_kwh)
    return PointSummary(
        element_avg_flow=avg,
        kind_avg_flow=kind_avg,
        heating_load_w=heat_w,
        cooling_load_w=cool_w,
        lighting_load_w=light_w,
        annual_heating_kwh=heat_kwh,
        annual_cooling_kwh=cool_kwh,
        annual_lighting_kwh=light_kwh,
        annual_final_energy_kwh=final,
        eui=final / result.total_floor_area,
    )
