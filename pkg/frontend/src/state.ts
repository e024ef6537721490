// Client session state: the editable design, clamping against the
// service-provided parameter ranges, the pinned baseline and the last
// responses. No physics here; just bookkeeping over service data.

import {
  DesignConfig,
  FootprintSpec,
  ParameterRange,
  PredictResponse,
  SensitivityResponse,
  TreeResponse,
} from "./types.js";

export const DEFAULT_CONFIG: DesignConfig = {
  length: 27.5,
  width: 27.5,
  floor_height: 3.5,
  orientation: 22.5,
  num_floors: 4,
  u_wall: 0.2,
  u_ground: 0.2,
  u_roof: 0.2,
  u_internal_floor: 0.5,
  u_window: 0.85,
  g_value: 0.45,
  slab_heat_capacity: 900,
  internal_mass_capacity: 90,
  permeability: 7.5,
  wwr_north: 0.3,
  wwr_east: 0.3,
  wwr_south: 0.3,
  wwr_west: 0.3,
  boiler_efficiency: 0.95,
  cop_heating: 3.5,
  cop_cooling: 3.5,
  operating_hours: 11,
  light_gain: 8,
  equipment_gain: 12,
  occupancy_density: 20,
  heating_setpoint: 20,
  cooling_setpoint: 26,
};

export const DEFAULT_FOOTPRINT: FootprintSpec = { kind: "setback", top_fraction: 0.5 };

export interface EditResult {
  value: number;
  clamped: boolean;
  outOfRange: boolean;
}

export class SessionState {
  config: DesignConfig = { ...DEFAULT_CONFIG };
  footprint: FootprintSpec = { ...DEFAULT_FOOTPRINT };
  ranges: Map<string, ParameterRange> = new Map();
  clampEdits = true;
  lastPrediction: PredictResponse | null = null;
  lastPredictionOutOfRange = false;
  pinnedBaseline: PredictResponse | null = null;
  sensitivity: SensitivityResponse | null = null;
  sensitivityTarget: string | null = null; // clicked variable, filters /tree
  tree: TreeResponse | null = null;
  treeTarget = "window";

  setRanges(ranges: ParameterRange[]): void {
    this.ranges = new Map(ranges.map((r) => [r.name, r]));
  }

  /** Apply one field edit. Clamps into the declared range when clamping is
   * on; otherwise lets the value through and reports it as out of range
   * (the service will answer 422 and still predict). */
  edit(field: keyof DesignConfig, raw: number): EditResult {
    const range = this.ranges.get(field);
    let value = raw;
    let clamped = false;
    if (range && this.clampEdits) {
      const lo = range.low;
      const hi = range.high;
      if (value < lo) {
        value = lo;
        clamped = true;
      } else if (value > hi) {
        value = hi;
        clamped = true;
      }
    }
    if (range?.integer) value = Math.round(value);
    this.config = { ...this.config, [field]: value };
    return { value, clamped, outOfRange: this.isOutOfRange(field) };
  }

  isOutOfRange(field: keyof DesignConfig): boolean {
    const range = this.ranges.get(field);
    if (!range) return false;
    const v = this.config[field];
    return v < range.low || v > range.high;
  }

  outOfRangeFields(): string[] {
    return [...this.ranges.keys()].filter((f) =>
      this.isOutOfRange(f as keyof DesignConfig),
    );
  }

  pinBaseline(): void {
    this.pinnedBaseline = this.lastPrediction;
  }

  /** Signed EUI difference against the pinned baseline (display arithmetic,
   * both terms straight from service responses). */
  euiDelta(): number | null {
    if (!this.lastPrediction || !this.pinnedBaseline) return null;
    return this.lastPrediction.eui - this.pinnedBaseline.eui;
  }
}
