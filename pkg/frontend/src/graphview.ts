// Component diagram: the activation trace laid out by pipeline stage,
// every node labelled with its engineering value and unit.

import { formatWithUnit } from "./format.js";
import { bindValue, clearValues } from "./provenance.js";
import { PredictResponse } from "./types.js";

const STAGE_ORDER: { match: (node: string) => boolean; column: number }[] = [
  { match: (n) => n.startsWith("wall_") && !n.endsWith("flow"), column: 0 },
  { match: (n) => n.startsWith("window_") && !n.endsWith("flow"), column: 0 },
  { match: (n) => n.startsWith("roof_") && !n.endsWith("flow"), column: 0 },
  { match: (n) => n === "floor" || n === "infiltration", column: 0 },
  { match: (n) => n.endsWith("_flow"), column: 1 },
  { match: (n) => n.startsWith("zone_"), column: 2 },
  { match: (n) => n.endsWith("_per_area"), column: 3 },
  { match: (n) => n === "building_energy", column: 4 },
  { match: (n) => n === "annual_energy", column: 5 },
];

function columnOf(node: string): number {
  for (const s of STAGE_ORDER) {
    if (s.match(node)) return s.column;
  }
  return 5;
}

export function renderGraph(container: HTMLElement, prediction: PredictResponse): void {
  clearValues("graph.");
  container.innerHTML = "";
  const columns: Map<number, typeof prediction.activations> = new Map();
  for (const act of prediction.activations) {
    const col = columnOf(act.node);
    if (!columns.has(col)) columns.set(col, []);
    columns.get(col)!.push(act);
  }
  const titles = ["envelope models", "flow sums", "zone models",
    "per-area loads", "building model", "annual"];
  const wrap = document.createElement("div");
  wrap.className = "graph-columns";
  for (const col of [...columns.keys()].sort((a, b) => a - b)) {
    const colDiv = document.createElement("div");
    colDiv.className = "graph-column";
    const h = document.createElement("h4");
    h.textContent = titles[col] ?? "";
    colDiv.appendChild(h);
    for (const act of columns.get(col)!) {
      const idx = prediction.activations.indexOf(act);
      const card = document.createElement("div");
      card.className = "node-card";
      card.id = `node-${act.node}`;
      const name = document.createElement("div");
      name.className = "node-name";
      name.textContent = act.node;
      const value = document.createElement("div");
      value.className = "node-value";
      value.textContent = formatWithUnit(act.value, act.unit);
      bindValue(card, `graph.${act.node}`, {
        label: `${act.node} (${act.output})`,
        value: act.value,
        source: `POST /predict -> .activations[${idx}].value`,
      });
      card.append(name, value);
      colDiv.appendChild(card);
    }
    wrap.appendChild(colDiv);
  }
  container.appendChild(wrap);
}
