"""Building geometry: footprints, facade orientation and derived areas.

A footprint is a stack of rectilinear plates, one per level, in unrotated
plan coordinates (x east, y north, meters, counter-clockwise). The design's
``orientation`` rotates the whole stack clockwise; facade areas are binned
to the nearest cardinal direction after rotation. All downstream quantities
(wall/window areas per orientation, roof segments including intermediate
setback roofs, volume, envelope area, compactness) derive from here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from shapely.geometry import Polygon

from .design import DesignConfig

ORIENTATIONS = ("N", "E", "S", "W")
_CARDINAL_AZIMUTH = {"N": 0.0, "E": 90.0, "S": 180.0, "W": 270.0}
_AREA_EPS = 1e-9


class GeometryValidationError(ValueError):
    """A plate polygon violates the footprint preconditions."""


class FootprintStructureError(ValueError):
    """Plate stack inconsistent with the design (for example plate count)."""


@dataclass(frozen=True)
class Plate:
    level: int
    vertices: tuple[tuple[float, float], ...]

    def polygon(self) -> Polygon:
        return Polygon(self.vertices)


@dataclass(frozen=True)
class Footprint:
    """Per-level rectilinear plates, level 0 on the ground."""

    plates: tuple[Plate, ...]

    def plate_at(self, level: int) -> Plate:
        for p in self.plates:
            if p.level == level:
                return p
        raise FootprintStructureError(f"no plate for level {level}")

    @property
    def levels(self) -> list[int]:
        return sorted(p.level for p in self.plates)


def _validate_plate(plate: Plate) -> Polygon:
    if len(plate.vertices) < 3:
        raise GeometryValidationError(
            f"plate level {plate.level}: needs at least 3 vertices")
    poly = plate.polygon()
    if not poly.is_valid:
        raise GeometryValidationError(
            f"plate level {plate.level}: polygon is not simple/valid")
    if poly.area <= _AREA_EPS:
        raise GeometryValidationError(
            f"plate level {plate.level}: degenerate polygon (area 0)")
    if not poly.exterior.is_ccw:
        raise GeometryValidationError(
            f"plate level {plate.level}: vertices must be counter-clockwise")
    verts = list(plate.vertices)
    for (x0, y0), (x1, y1) in zip(verts, verts[1:] + verts[:1]):
        if abs(x1 - x0) > 1e-12 and abs(y1 - y0) > 1e-12:
            raise GeometryValidationError(
                f"plate level {plate.level}: edge ({x0},{y0})-({x1},{y1}) "
                "is not axis-aligned")
    return poly


def validate_footprint(footprint: Footprint, num_floors: int) -> None:
    levels = footprint.levels
    if levels != list(range(num_floors)):
        raise FootprintStructureError(
            f"footprint has plates for levels {levels}, "
            f"design has {num_floors} floors")
    for p in footprint.plates:
        _validate_plate(p)


# ---------------------------------------------------------------------------
# footprint construction

def box_footprint(length: float, width: float, num_floors: int) -> Footprint:
    """Identical rectangular plates on every level."""
    verts = ((0.0, 0.0), (length, 0.0), (length, width), (0.0, width))
    return Footprint(tuple(Plate(k, verts) for k in range(num_floors)))


def setback_footprint(length: float, width: float, num_floors: int,
                      top_fraction: float = 0.5) -> Footprint:
    """Full plates except the top level, which keeps only the southern
    ``top_fraction`` of the depth. The uncovered part of the level below
    becomes an intermediate roof."""
    if num_floors < 2:
        raise FootprintStructureError("setback footprint needs >= 2 floors")
    full = ((0.0, 0.0), (length, 0.0), (length, width), (0.0, width))
    top = ((0.0, 0.0), (length, 0.0),
           (length, width * top_fraction), (0.0, width * top_fraction))
    plates = [Plate(k, full) for k in range(num_floors - 1)]
    plates.append(Plate(num_floors - 1, top))
    return Footprint(tuple(plates))


def footprint_for(config: DesignConfig, spec: dict | None = None) -> Footprint:
    """Realize a footprint from a small descriptor.

    ``{"kind": "box"}`` (default), ``{"kind": "setback", "top_fraction": f}``
    or ``{"kind": "plates", "plates": [...]}`` with explicit vertex lists.
    """
    spec = spec or {"kind": "box"}
    kind = spec.get("kind", "box")
    if kind == "box":
        return box_footprint(config.length, config.width, config.num_floors)
    if kind == "setback":
        return setback_footprint(config.length, config.width, config.num_floors,
                                 top_fraction=float(spec.get("top_fraction", 0.5)))
    if kind == "plates":
        return footprint_from_dict(spec)
    raise FootprintStructureError(f"unknown footprint kind {kind!r}")


def footprint_from_dict(d: dict) -> Footprint:
    plates = tuple(
        Plate(int(p["level"]), tuple((float(x), float(y)) for x, y in p["vertices"]))
        for p in d["plates"])
    return Footprint(plates)


def footprint_to_dict(fp: Footprint) -> dict:
    return {"kind": "plates",
            "plates": [{"level": p.level, "vertices": [[x, y] for x, y in p.vertices]}
                       for p in fp.plates]}


def load_footprint(path: str | Path) -> Footprint:
    return footprint_from_dict(json.loads(Path(path).read_text()))


def save_footprint(fp: Footprint, path: str | Path) -> None:
    Path(path).write_text(json.dumps(footprint_to_dict(fp), indent=2) + "\n")


def rotate_footprint(fp: Footprint, degrees: float) -> Footprint:
    """Rotate all plates clockwise by ``degrees`` about the origin.

    The angle is normalized modulo 360 first, so full turns are exact
    identities (no trigonometric round-off).
    """
    a = math.fmod(degrees, 360.0)
    if a == 0.0:
        return fp
    rad = math.radians(a)
    c, s = math.cos(rad), math.sin(rad)
    plates = tuple(
        Plate(p.level, tuple((x * c + y * s, -x * s + y * c) for x, y in p.vertices))
        for p in fp.plates)
    return Footprint(plates)


# ---------------------------------------------------------------------------
# derived quantities

@dataclass(frozen=True)
class GeometrySummary:
    """All geometric quantities a component model or the oracle needs."""

    wall_area_by_orientation: dict[str, float]       # m2, net of windows
    window_area_by_orientation: dict[str, float]     # m2
    gross_wall_area_by_orientation: dict[str, float]  # m2
    azimuth_by_orientation: dict[str, float]         # deg, actual facade normal
    roof_segments: tuple[tuple[int, float], ...]      # (level of top surface, m2)
    ground_area: float            # m2
    internal_floor_area: float    # m2, contact area between stacked plates
    total_floor_area: float       # m2, sum over levels
    volume: float                 # m3
    envelope_area: float          # m2, gross walls + roofs + ground
    compactness: float            # m2/m3, envelope / volume
    height: float                 # m, num_floors * floor_height

    @property
    def total_window_area(self) -> float:
        return sum(self.window_area_by_orientation.values())


def nearest_cardinal(azimuth: float) -> str:
    """Closest of N/E/S/W to an azimuth in degrees; ties prefer N, then E, S, W."""
    azimuth = math.fmod(azimuth, 360.0)
    if azimuth < 0.0:
        azimuth += 360.0
    best, best_d = None, None
    for name in ORIENTATIONS:
        ref = _CARDINAL_AZIMUTH[name]
        d = abs(azimuth - ref)
        d = min(d, 360.0 - d)
        if best_d is None or d < best_d:
            best, best_d = name, d
    return best


def _edge_azimuth(p0: tuple[float, float], p1: tuple[float, float]) -> float:
    # CCW polygon: outward normal of edge (dx, dy) is (dy, -dx);
    # azimuth measured clockwise from North = atan2(east, north).
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    az = math.degrees(math.atan2(dy, -dx))
    return az + 360.0 if az < 0.0 else az


def derive_geometry(config: DesignConfig, footprint: Footprint) -> GeometrySummary:
    """Compute the geometry summary for one design variant.

    Every facade segment is assigned to the nearest cardinal orientation
    after rotating its outward normal by ``config.orientation``. Window area
    per orientation is gross wall area times that orientation's
    window-to-wall ratio. A roof segment appears wherever the plate above
    does not cover a plate (intermediate roofs), plus the top plate itself.
    Plates larger than the one below them (overhangs) contribute walls and
    roofs only; exposed undersides are not modeled.
    """
    validate_footprint(footprint, config.num_floors)
    n = config.num_floors
    h = config.floor_height
    rot = math.fmod(config.orientation, 360.0)
    if rot < 0.0:
        rot += 360.0

    polys = [footprint.plate_at(k).polygon() for k in range(n)]
    areas = [p.area for p in polys]

    gross = {o: 0.0 for o in ORIENTATIONS}
    az_sin = {o: 0.0 for o in ORIENTATIONS}
    az_cos = {o: 0.0 for o in ORIENTATIONS}
    for k in range(n):
        verts = list(footprint.plate_at(k).vertices)
        for p0, p1 in zip(verts, verts[1:] + verts[:1]):
            seg_len = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
            if seg_len <= 0.0:
                continue
            az = math.fmod(_edge_azimuth(p0, p1) + rot, 360.0)
            o = nearest_cardinal(az)
            area = seg_len * h
            gross[o] += area
            az_sin[o] += area * math.sin(math.radians(az))
            az_cos[o] += area * math.cos(math.radians(az))

    azimuth = {}
    for o in ORIENTATIONS:
        if gross[o] > 0.0:
            a = math.degrees(math.atan2(az_sin[o], az_cos[o]))
            azimuth[o] = a + 360.0 if a < 0.0 else a
        else:
            azimuth[o] = _CARDINAL_AZIMUTH[o] + (rot if rot < 45.0 else 0.0)

    wwr = {"N": config.wwr_north, "E": config.wwr_east,
           "S": config.wwr_south, "W": config.wwr_west}
    window = {o: gross[o] * wwr[o] for o in ORIENTATIONS}
    net = {o: gross[o] - window[o] for o in ORIENTATIONS}

    roof_segments: list[tuple[int, float]] = []
    for k in range(n - 1):
        uncovered = polys[k].difference(polys[k + 1]).area
        if uncovered > _AREA_EPS:
            roof_segments.append((k + 1, uncovered))
    roof_segments.append((n, areas[n - 1]))

    internal_floor = sum(polys[k].intersection(polys[k + 1]).area
                         for k in range(n - 1))

    total_floor = sum(areas)
    volume = total_floor * h
    envelope = sum(gross.values()) + sum(a for _, a in roof_segments) + areas[0]

    return GeometrySummary(
        wall_area_by_orientation=net,
        window_area_by_orientation=window,
        gross_wall_area_by_orientation=gross,
        azimuth_by_orientation=azimuth,
        roof_segments=tuple(roof_segments),
        ground_area=areas[0],
        internal_floor_area=internal_floor,
        total_floor_area=total_floor,
        volume=volume,
        envelope_area=envelope,
        compactness=envelope / volume,
        height=n * h,
    )
