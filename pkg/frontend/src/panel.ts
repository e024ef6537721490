// Parameter panel: one numeric input per design variable, grouped, with
// range hints from the service schema, clamping, and out-of-range badges.

import { SessionState } from "./state.js";
import { DesignConfig } from "./types.js";

const GROUPS: { title: string; fields: (keyof DesignConfig)[] }[] = [
  { title: "Geometry", fields: ["length", "width", "floor_height", "num_floors", "orientation"] },
  {
    title: "Envelope",
    fields: ["u_wall", "u_ground", "u_roof", "u_internal_floor", "u_window",
      "g_value", "permeability", "slab_heat_capacity", "internal_mass_capacity"],
  },
  { title: "Windows", fields: ["wwr_north", "wwr_east", "wwr_south", "wwr_west"] },
  {
    title: "Operation",
    fields: ["operating_hours", "light_gain", "equipment_gain", "occupancy_density"],
  },
  { title: "Systems", fields: ["boiler_efficiency", "cop_heating", "cop_cooling"] },
];

export interface PanelCallbacks {
  onEdit: () => void;
}

export function renderPanel(
  container: HTMLElement,
  state: SessionState,
  callbacks: PanelCallbacks,
): void {
  container.innerHTML = "";

  const clampRow = document.createElement("label");
  clampRow.className = "clamp-toggle";
  const clampBox = document.createElement("input");
  clampBox.type = "checkbox";
  clampBox.checked = state.clampEdits;
  clampBox.id = "clamp-toggle";
  clampBox.addEventListener("change", () => {
    state.clampEdits = clampBox.checked;
  });
  clampRow.append(clampBox, document.createTextNode(" clamp edits to sampled ranges"));
  container.appendChild(clampRow);

  for (const group of GROUPS) {
    const fs = document.createElement("fieldset");
    const legend = document.createElement("legend");
    legend.textContent = group.title;
    fs.appendChild(legend);
    for (const field of group.fields) {
      fs.appendChild(renderField(state, field, callbacks));
    }
    container.appendChild(fs);
  }
}

function renderField(
  state: SessionState,
  field: keyof DesignConfig,
  callbacks: PanelCallbacks,
): HTMLElement {
  const range = state.ranges.get(field);
  const row = document.createElement("div");
  row.className = "param-row";
  row.id = `row-${field}`;

  const label = document.createElement("label");
  label.htmlFor = `param-${field}`;
  label.textContent = range && range.unit !== "-" ? `${field} [${range.unit}]` : field;

  const input = document.createElement("input");
  input.type = "number";
  input.id = `param-${field}`;
  input.value = String(state.config[field]);
  if (range) {
    input.min = String(range.low);
    input.max = String(range.high);
    input.step = range.integer ? "1" : "any";
    input.title = `sampled range ${range.low} .. ${range.high}`;
  }

  const badge = document.createElement("span");
  badge.className = "badge range-badge hidden";
  badge.id = `badge-${field}`;
  badge.textContent = "outside range";

  input.addEventListener("input", () => {
    const raw = Number(input.value);
    if (!Number.isFinite(raw)) return;
    const result = state.edit(field, raw);
    if (result.clamped) input.value = String(result.value);
    badge.classList.toggle("hidden", !result.outOfRange);
    row.classList.toggle("out-of-range", result.outOfRange);
    callbacks.onEdit();
  });

  row.append(label, input, badge);
  return row;
}

/** Reflect server-confirmed warnings: the 422 badge on affected fields. */
export function showRangeWarnings(
  container: HTMLElement,
  fields: string[],
): void {
  container.querySelectorAll(".range-badge").forEach((el) => {
    el.classList.add("hidden");
  });
  container.querySelectorAll(".param-row").forEach((el) => {
    el.classList.remove("out-of-range");
  });
  for (const f of fields) {
    const badge = container.querySelector(`#badge-${f}`);
    badge?.classList.remove("hidden");
    container.querySelector(`#row-${f}`)?.classList.add("out-of-range");
  }
}
