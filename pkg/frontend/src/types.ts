// Shared request/response shapes of the prediction service.

export interface DesignConfig {
  length: number;
  width: number;
  floor_height: number;
  orientation: number;
  num_floors: number;
  u_wall: number;
  u_ground: number;
  u_roof: number;
  u_internal_floor: number;
  u_window: number;
  g_value: number;
  slab_heat_capacity: number;
  internal_mass_capacity: number;
  permeability: number;
  wwr_north: number;
  wwr_east: number;
  wwr_south: number;
  wwr_west: number;
  boiler_efficiency: number;
  cop_heating: number;
  cop_cooling: number;
  operating_hours: number;
  light_gain: number;
  equipment_gain: number;
  occupancy_density: number;
  heating_setpoint: number;
  cooling_setpoint: number;
}

export interface FootprintSpec {
  kind: string;
  top_fraction?: number;
  plates?: { level: number; vertices: [number, number][] }[];
}

export interface Activation {
  node: string;
  output: string;
  value: number;
  unit: string;
}

export interface Warning {
  field: string;
  message: string;
}

export interface PredictResponse {
  eui: number;
  annual_energy: number;
  activations: Activation[];
  model_version: string;
  warnings: Warning[];
}

export interface ParameterRange {
  name: string;
  unit: string;
  low: number;
  high: number;
  integer: boolean;
}

export interface SchemaResponse {
  parameter_space: ParameterRange[];
}

export interface SensitivityOutput {
  node: string;
  quantity: string;
  unit: string;
}

export interface SensitivityResponse {
  variables: string[];
  outputs: SensitivityOutput[];
  base_values: number[];
  delta: number;
  s: (number | null)[][];
  s_standardized: (number | null)[][];
  activity: number[];
  passivity: number[];
  warnings: string[];
}

export interface TreeNodeJson {
  prediction: number;
  count: number;
  depth: number;
  feature?: string;
  unit?: string;
  threshold?: number;
  dependence_flag?: boolean;
  left?: TreeNodeJson;
  right?: TreeNodeJson;
}

export interface RuleCondition {
  feature: string;
  unit: string;
  comparator: string;
  threshold: number;
}

export interface RuleJson {
  text: string;
  prediction: number;
  unit: string;
  count: number;
  under_dependence: boolean;
  conditions: RuleCondition[];
}

export interface LeafModelTerm {
  feature: string;
  unit: string;
  coefficient: number;
}

export interface LeafModelJson {
  leaf: number;
  count: number;
  intercept: number;
  target_unit: string;
  terms: LeafModelTerm[];
}

export interface TreeResponse {
  tree: {
    target: { name: string; unit: string };
    features: { name: string; unit: string }[];
    max_depth: number;
    min_leaf: number;
    root: TreeNodeJson;
  };
  rules: RuleJson[];
  leaf_models: LeafModelJson[];
  n_samples: number;
}

export interface ModelInfoResponse {
  model_version: string;
  provenance: Record<string, unknown>;
  validation_r2: Record<string, number>;
  slots: string[];
}

export interface SchemaErrorDetail {
  field: string;
  message: string;
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    message: string,
    public details: SchemaErrorDetail[] = [],
  ) {
    super(message);
  }
}
