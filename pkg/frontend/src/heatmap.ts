// Sensitivity heatmap: color-coded standardized matrix with activity and
// passivity bars; cell hover shows the raw sensitivity with its unit.
// Undefined entries (rank-deficient or frozen parameters) render hatched.

import { divergingColor, formatValue, formatWithUnit } from "./format.js";
import { bindValue, clearValues } from "./provenance.js";
import { SensitivityResponse } from "./types.js";

export interface HeatmapCallbacks {
  onVariableClick?: (variable: string) => void;
}

export function renderHeatmap(
  container: HTMLElement,
  matrix: SensitivityResponse,
  callbacks: HeatmapCallbacks = {},
): void {
  clearValues("heatmap.");
  container.innerHTML = "";
  const maxActivity = Math.max(...matrix.activity, 1e-12);
  const maxPassivity = Math.max(...matrix.passivity, 1e-12);

  const table = document.createElement("table");
  table.className = "heatmap";

  const head = document.createElement("tr");
  head.appendChild(document.createElement("th"));
  matrix.variables.forEach((v, j) => {
    const th = document.createElement("th");
    th.className = "variable-header";
    th.id = `var-${v}`;
    const span = document.createElement("span");
    span.textContent = v;
    th.title = `activity ${formatValue(matrix.activity[j], 3)} (click to target the rule tree)`;
    th.appendChild(span);
    th.addEventListener("click", () => callbacks.onVariableClick?.(v));
    head.appendChild(th);
  });
  const cornerTh = document.createElement("th");
  cornerTh.textContent = "passivity";
  head.appendChild(cornerTh);
  table.appendChild(head);

  matrix.outputs.forEach((out, i) => {
    const tr = document.createElement("tr");
    const label = document.createElement("th");
    label.className = "output-label";
    label.textContent = `${out.node} [${out.unit}]`;
    tr.appendChild(label);
    matrix.variables.forEach((v, j) => {
      const td = document.createElement("td");
      td.className = "cell";
      td.id = `cell-${out.node}-${v}`;
      const std = matrix.s_standardized[i][j];
      const raw = matrix.s[i][j];
      if (std === null || raw === null) {
        td.classList.add("undefined-cell");
        td.title = `${out.node} / ${v}: undefined`;
      } else {
        td.style.backgroundColor = divergingColor(std);
        td.title = `${out.node} / ${v}: S = ${formatWithUnit(raw, out.unit, 3)} (standardized ${formatValue(std, 3)})`;
        bindValue(td, `heatmap.${out.node}.${v}`, {
          label: `S[${out.node}, ${v}]`,
          value: raw,
          source: `POST /sensitivity -> .s[${i}][${j}]`,
        });
      }
      tr.appendChild(td);
    });
    const pas = document.createElement("td");
    pas.className = "bar-cell";
    const bar = document.createElement("div");
    bar.className = "bar passivity-bar";
    bar.style.width = `${(100 * matrix.passivity[i]) / maxPassivity}%`;
    bindValue(pas, `heatmap.passivity.${out.node}`, {
      label: `passivity(${out.node})`,
      value: matrix.passivity[i],
      source: `POST /sensitivity -> .passivity[${i}]`,
    });
    pas.title = `passivity ${formatValue(matrix.passivity[i], 3)}`;
    pas.appendChild(bar);
    tr.appendChild(pas);
    table.appendChild(tr);
  });

  // bottom row: activity bars (column sums)
  const foot = document.createElement("tr");
  const footLabel = document.createElement("th");
  footLabel.textContent = "activity";
  foot.appendChild(footLabel);
  matrix.variables.forEach((v, j) => {
    const td = document.createElement("td");
    td.className = "bar-cell";
    td.id = `activity-${v}`;
    const bar = document.createElement("div");
    bar.className = "bar activity-bar";
    bar.style.height = `${(100 * matrix.activity[j]) / maxActivity}%`;
    bindValue(td, `heatmap.activity.${v}`, {
      label: `activity(${v})`,
      value: matrix.activity[j],
      source: `POST /sensitivity -> .activity[${j}]`,
    });
    td.title = `activity ${formatValue(matrix.activity[j], 3)}`;
    td.appendChild(bar);
    foot.appendChild(td);
  });
  foot.appendChild(document.createElement("td"));
  table.appendChild(foot);

  container.appendChild(table);

  if (matrix.warnings.length) {
    const warn = document.createElement("p");
    warn.className = "matrix-warnings";
    warn.textContent = matrix.warnings.join("; ");
    container.appendChild(warn);
  }
}
