// Application wiring: parameter edits debounce into live predictions;
// sensitivity and tree analyses run on demand against the same session
// configuration.

import { ApiClient, PredictOutcome } from "./api.js";
import { LatestWins } from "./debounce.js";
import { formatSigned, formatValue } from "./format.js";
import { renderGraph } from "./graphview.js";
import { renderHeatmap } from "./heatmap.js";
import { renderPanel, showRangeWarnings } from "./panel.js";
import { bindValue, renderInspector } from "./provenance.js";
import { SessionState } from "./state.js";
import { renderTree } from "./treeview.js";
import { ServiceError } from "./types.js";

export const DEBOUNCE_MS = 300;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export async function startApp(client: ApiClient): Promise<SessionState> {
  const state = new SessionState();
  const schema = await client.schema();
  state.setRanges(schema.parameter_space);

  const info = await client.modelInfo();
  el("model-version").textContent = `model ${info.model_version}`;

  const errorBar = el("error-bar");

  const showError = (err: unknown) => {
    errorBar.classList.remove("hidden");
    errorBar.textContent =
      err instanceof ServiceError
        ? `service error ${err.status}: ${err.details.map((d) => d.field).join(", ") || err.message}`
        : `request failed: ${String(err)}`;
  };

  const predictRunner = new LatestWins<PredictOutcome>(
    DEBOUNCE_MS,
    (outcome) => applyPrediction(state, outcome),
    showError,
  );

  const requestPredict = (immediate = false) => {
    errorBar.classList.add("hidden");
    const task = (signal: AbortSignal) =>
      client.predict(state.config, state.footprint, signal);
    if (immediate) predictRunner.fire(task);
    else predictRunner.schedule(task);
  };

  renderPanel(el("panel"), state, { onEdit: () => requestPredict() });

  el("pin-baseline").addEventListener("click", () => {
    state.pinBaseline();
    renderDelta(state);
  });

  el("run-sensitivity").addEventListener("click", async () => {
    errorBar.classList.add("hidden");
    try {
      const matrix = await client.sensitivity(state.config, state.footprint, {
        n: 500,
        seed: 1,
      });
      state.sensitivity = matrix;
      renderHeatmap(el("heatmap"), matrix, {
        onVariableClick: (variable) => {
          state.sensitivityTarget = variable;
          el("tree-target-note").textContent =
            `tree over varied parameters, inspecting ${variable} (target eui)`;
          runTree("eui");
        },
      });
    } catch (err) {
      showError(err);
    }
  });

  const runTree = async (target?: string) => {
    errorBar.classList.add("hidden");
    const t = target ?? (el<HTMLSelectElement>("tree-target").value || "window");
    state.treeTarget = t;
    try {
      const res = await client.tree(state.config, state.footprint, t, {
        n: 600,
        seed: 2,
      });
      state.tree = res;
      renderTree(el("treeview"), res);
    } catch (err) {
      showError(err);
    }
  };
  el("run-tree").addEventListener("click", () => runTree());

  requestPredict(true);
  el("inspector-toggle").addEventListener("click", () => {
    const panel = el("inspector");
    panel.classList.toggle("hidden");
    if (!panel.classList.contains("hidden")) renderInspector(panel);
  });

  return state;
}

export function applyPrediction(state: SessionState, outcome: PredictOutcome): void {
  state.lastPrediction = outcome.response;
  state.lastPredictionOutOfRange = outcome.outOfRange;

  const euiEl = el("eui-value");
  euiEl.textContent = formatValue(outcome.response.eui, 2);
  bindValue(euiEl, "headline.eui", {
    label: "EUI",
    value: outcome.response.eui,
    source: "POST /predict -> .eui",
  });

  const annualEl = el("annual-value");
  annualEl.textContent = formatValue(outcome.response.annual_energy, 0);
  bindValue(annualEl, "headline.annual", {
    label: "annual energy",
    value: outcome.response.annual_energy,
    source: "POST /predict -> .annual_energy",
  });

  const badge = el("extrapolation-badge");
  badge.classList.toggle("hidden", !outcome.outOfRange);
  if (outcome.outOfRange) {
    badge.textContent =
      `422: outside sampled ranges (${outcome.response.warnings.map((w) => w.field).join(", ")})`;
  }
  showRangeWarnings(el("panel"), outcome.response.warnings.map((w) => w.field));

  renderGraph(el("graph"), outcome.response);
  renderDelta(state);
}

function renderDelta(state: SessionState): void {
  const deltaEl = el("eui-delta");
  const delta = state.euiDelta();
  if (delta === null) {
    deltaEl.textContent = "";
    deltaEl.classList.add("hidden");
    return;
  }
  deltaEl.classList.remove("hidden");
  deltaEl.textContent = `${formatSigned(delta, 2)} vs pinned baseline`;
  deltaEl.classList.toggle("delta-up", delta > 0);
  deltaEl.classList.toggle("delta-down", delta < 0);
}

// Entry point for the browser build; tests import the functions instead.
if (typeof document !== "undefined" && document.getElementById("app-root")) {
  const base = (window as unknown as { ENERCOMP_API?: string }).ENERCOMP_API ?? "";
  startApp(new ApiClient(base)).catch((err) => {
    const bar = document.getElementById("error-bar");
    if (bar) {
      bar.classList.remove("hidden");
      bar.textContent = `failed to start: ${String(err)}`;
    }
  });
}
