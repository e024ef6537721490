"""Design variables, their engineering ranges, and range validation.

A :class:`DesignConfig` is one building variant: geometry drivers, envelope
properties, internal gains, schedules and system efficiencies. The
:class:`ParameterSpace` declares the sampled range of every variable; the
default space built by :func:`design_space` is the range set used for all
training and test data generation.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Sequence

# Setpoints are deliberately fixed, not sampled: they are part of the
# operating convention of the study, shared by every variant.
DEFAULT_HEATING_SETPOINT = 20.0  # degC
DEFAULT_COOLING_SETPOINT = 26.0  # degC


@dataclass(frozen=True)
class DesignConfig:
    """One building design variant in engineering units."""

    length: float = 20.0            # m, footprint extent along x
    width: float = 15.0             # m, footprint extent along y
    floor_height: float = 3.5      # m, floor-to-floor
    orientation: float = 0.0        # deg clockwise from North, [0, 360)
    num_floors: int = 3
    u_wall: float = 0.2             # W/m2K
    u_ground: float = 0.2           # W/m2K
    u_roof: float = 0.2             # W/m2K
    u_internal_floor: float = 0.5   # W/m2K
    u_window: float = 0.85          # W/m2K
    g_value: float = 0.45           # solar heat gain coefficient, [0, 1]
    slab_heat_capacity: float = 900.0       # J/m3K
    internal_mass_capacity: float = 90.0    # kJ/m2K
    permeability: float = 7.5       # m3/m2h at envelope
    wwr_north: float = 0.3          # window-to-wall ratio per facade, [0, 1)
    wwr_east: float = 0.3
    wwr_south: float = 0.3
    wwr_west: float = 0.3
    boiler_efficiency: float = 0.95
    cop_heating: float = 3.5
    cop_cooling: float = 3.5
    operating_hours: float = 11.0   # h/day
    light_gain: float = 8.0         # W/m2
    equipment_gain: float = 12.0    # W/m2
    occupancy_density: float = 20.0  # m2 per person
    heating_setpoint: float = DEFAULT_HEATING_SETPOINT  # degC
    cooling_setpoint: float = DEFAULT_COOLING_SETPOINT  # degC

    def __post_init__(self):
        if self.num_floors < 1:
            raise ValueError(f"num_floors must be >= 1, got {self.num_floors}")
        if not self.heating_setpoint < self.cooling_setpoint:
            raise ValueError(
                "heating_setpoint must be below cooling_setpoint "
                f"({self.heating_setpoint} >= {self.cooling_setpoint})"
            )

    def with_values(self, **kwargs) -> "DesignConfig":
        return replace(self, **kwargs)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "DesignConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown design fields: {sorted(unknown)}")
        vals = dict(d)
        if "num_floors" in vals:
            vals["num_floors"] = int(round(float(vals["num_floors"])))
        return cls(**vals)


@dataclass(frozen=True)
class ParameterRange:
    name: str
    unit: str
    low: float
    high: float
    integer: bool = False

    def __post_init__(self):
        if not self.low < self.high:
            raise ValueError(f"{self.name}: low must be < high ({self.low}, {self.high})")


class ParameterSpace:
    """Ordered set of sampled design variables with engineering bounds."""

    def __init__(self, ranges: Sequence[ParameterRange]):
        names = [r.name for r in ranges]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names in space")
        self.ranges: tuple[ParameterRange, ...] = tuple(ranges)
        self._by_name = {r.name: r for r in self.ranges}

    def __len__(self) -> int:
        return len(self.ranges)

    def __iter__(self):
        return iter(self.ranges)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    @property
    def names(self) -> list[str]:
        return [r.name for r in self.ranges]

    def range_of(self, name: str) -> ParameterRange:
        return self._by_name[name]

    def subspace(self, names: Iterable[str]) -> "ParameterSpace":
        return ParameterSpace([self._by_name[n] for n in names])

    def to_config(self, values: Sequence[float], **fixed) -> DesignConfig:
        """Map one point (engineering units, space order) onto a config."""
        if len(values) != len(self.ranges):
            raise ValueError(f"expected {len(self.ranges)} values, got {len(values)}")
        d = {}
        for r, v in zip(self.ranges, values):
            if r.integer:
                v = int(min(max(round(v), r.low), r.high))
            d[r.name] = v
        d.update(fixed)
        return DesignConfig(**d)


def design_space() -> ParameterSpace:
    """The sampled range of every design variable.

    Length and width share one range; the window-to-wall ratio varies
    independently per facade. Setpoints are fixed constants, see module
    docstring.
    """
    return ParameterSpace([
        ParameterRange("length", "m", 12.0, 30.0),
        ParameterRange("width", "m", 12.0, 30.0),
        ParameterRange("floor_height", "m", 3.0, 4.0),
        ParameterRange("orientation", "deg", 0.0, 90.0),
        ParameterRange("num_floors", "-", 2, 5, integer=True),
        ParameterRange("u_wall", "W/m2K", 0.15, 0.25),
        ParameterRange("u_ground", "W/m2K", 0.15, 0.25),
        ParameterRange("u_roof", "W/m2K", 0.15, 0.25),
        ParameterRange("u_internal_floor", "W/m2K", 0.4, 0.6),
        ParameterRange("u_window", "W/m2K", 0.7, 1.0),
        ParameterRange("g_value", "-", 0.3, 0.6),
        ParameterRange("slab_heat_capacity", "J/m3K", 800.0, 1000.0),
        ParameterRange("internal_mass_capacity", "kJ/m2K", 60.0, 120.0),
        ParameterRange("permeability", "m3/m2h", 6.0, 9.0),
        ParameterRange("wwr_north", "-", 0.1, 0.5),
        ParameterRange("wwr_east", "-", 0.1, 0.5),
        ParameterRange("wwr_south", "-", 0.1, 0.5),
        ParameterRange("wwr_west", "-", 0.1, 0.5),
        ParameterRange("boiler_efficiency", "-", 0.92, 0.98),
        ParameterRange("cop_heating", "-", 2.5, 4.5),
        ParameterRange("cop_cooling", "-", 2.5, 4.5),
        ParameterRange("operating_hours", "h", 10.0, 12.0),
        ParameterRange("light_gain", "W/m2", 6.0, 10.0),
        ParameterRange("equipment_gain", "W/m2", 10.0, 14.0),
        ParameterRange("occupancy_density", "m2/person", 16.0, 24.0),
    ])


def representative_config() -> DesignConfig:
    """The manually designed mid-range case used for local exploration."""
    return DesignConfig(
        length=27.5,
        width=27.5,
        floor_height=3.5,
        orientation=22.5,
        num_floors=4,
        u_wall=0.2,
        u_ground=0.2,
        u_roof=0.2,
        u_internal_floor=0.5,
        u_window=0.85,
        g_value=0.45,
        slab_heat_capacity=900.0,
        internal_mass_capacity=90.0,
        permeability=7.5,
        wwr_north=0.3,
        wwr_east=0.3,
        wwr_south=0.3,
        wwr_west=0.3,
        boiler_efficiency=0.95,
        cop_heating=3.5,
        cop_cooling=3.5,
        operating_hours=11.0,
        light_gain=8.0,
        equipment_gain=12.0,
        occupancy_density=20.0,
    )


@dataclass(frozen=True)
class Violation:
    field: str
    value: float
    low: float
    high: float

    def message(self) -> str:
        return (f"{self.field} = {self.value:g} outside "
                f"[{self.low:g}, {self.high:g}]")


def validate_config(config: DesignConfig, space: ParameterSpace) -> list[Violation]:
    """Check every spaced field against its declared bounds.

    Returns violations as data; an empty list means all fields in range.
    """
    out = []
    for r in space:
        v = float(getattr(config, r.name))
        if not (r.low <= v <= r.high):
            out.append(Violation(r.name, v, float(r.low), float(r.high)))
    return out


# ---------------------------------------------------------------------------
# persistence

def configs_to_csv(configs: Sequence[DesignConfig], path: str | Path,
                   space: ParameterSpace | None = None) -> None:
    """Write configs as CSV, one row per variant, unit-annotated header."""
    space = space or design_space()
    extra = [f.name for f in fields(DesignConfig) if f.name not in space]
    header = [f"{r.name} [{r.unit}]" for r in space] + [f"{n} [-]" for n in extra]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for c in configs:
            row = [repr(getattr(c, r.name)) for r in space]
            row += [repr(getattr(c, n)) for n in extra]
            w.writerow(row)


def configs_from_csv(path: str | Path) -> list[DesignConfig]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = [h.split(" [")[0] for h in rows[0]]
    out = []
    for row in rows[1:]:
        d = {name: float(v) for name, v in zip(header, row)}
        out.append(DesignConfig.from_dict(d))
    return out


def config_to_json(config: DesignConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.as_dict(), indent=2, sort_keys=True) + "\n")


def config_from_json(path: str | Path) -> DesignConfig:
    return DesignConfig.from_dict(json.loads(Path(path).read_text()))
