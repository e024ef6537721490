// End-to-end: a real service process over a small trained bundle, driven
// through the actual DOM wiring. Covers the parameter panel with live
// prediction, the extrapolation badge on out-of-range edits, the
// sensitivity heatmap, the rule tree, and UI/CLI agreement on the EUI.

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { existsSync, mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { applyPrediction, startApp } from "../src/main.js";
import { DEFAULT_CONFIG, DEFAULT_FOOTPRINT, SessionState } from "../src/state.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;
const E2E_DIR = join(__dirname, "..", ".e2e");
const WS = join(E2E_DIR, "ws");
const RUN_CONFIG = join(E2E_DIR, "run_config.json");
const PY = process.env.ENERCOMP_PYTHON ?? "python3";

let server: ChildProcess | null = null;
let state: SessionState;

function runCli(args: string[]): { status: number; stdout: string; stderr: string } {
  const res = spawnSync(PY, ["-m", "enercomp.cli", ...args], {
    encoding: "utf-8",
    timeout: 600000,
  });
  return { status: res.status ?? -1, stdout: res.stdout, stderr: res.stderr };
}

function prepareWorkspace(): void {
  mkdirSync(E2E_DIR, { recursive: true });
  writeFileSync(
    RUN_CONFIG,
    JSON.stringify({
      workspace: WS,
      n_train: 60,
      n_random: 12,
      n_setback: 12,
      n_heldout: 12,
      max_epochs: 60,
      patience: 15,
      dse_count: 400,
      service_port: PORT,
    }),
  );
  if (existsSync(join(WS, "models", "manifest.json"))) return; // cached
  let res = runCli(["gen-data", "--config", RUN_CONFIG]);
  if (res.status !== 0) throw new Error(`gen-data failed: ${res.stderr}`);
  res = runCli(["train", "--config", RUN_CONFIG]);
  if (res.status !== 0) throw new Error(`train failed: ${res.stderr}`);
}

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 120; i++) {
    try {
      const res = await fetch(`${BASE}/model/info`);
      if (res.status === 200) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 500));
  }
  throw new Error("service did not come up");
}

function buildDom(): void {
  const html = readFileSync(join(__dirname, "..", "index.html"), "utf-8");
  const body = html.split(/<body>/)[1].split(/<\/body>/)[0]
    .replace(/<script[\s\S]*?<\/script>/g, "");
  document.body.innerHTML = body;
}

function waitFor(cond: () => boolean, ms = 15000, step = 50): Promise<void> {
  const deadline = Date.now() + ms;
  return new Promise((resolve, reject) => {
    const tick = () => {
      if (cond()) return resolve();
      if (Date.now() > deadline) return reject(new Error("condition not met in time"));
      setTimeout(tick, step);
    };
    tick();
  });
}

function euiShown(): number {
  const el = document.getElementById("eui-value")!;
  return Number(el.getAttribute("data-value"));
}

beforeAll(async () => {
  prepareWorkspace();
  server = spawn(PY, ["-m", "enercomp.cli", "serve", "--config", RUN_CONFIG], {
    stdio: "ignore",
  });
  await waitForServer();
  buildDom();
  state = await startApp(new ApiClient(BASE));
  await waitFor(() => Number.isFinite(euiShown()));
}, 600000);

afterAll(() => {
  server?.kill();
});

describe("parameter panel with live prediction", () => {
  it("renders the EUI, annual energy and one card per graph node", async () => {
    const eui = euiShown();
    expect(eui).toBeGreaterThan(10);
    expect(eui).toBeLessThan(200);
    const cards = document.querySelectorAll(".node-card");
    expect(cards.length).toBe(state.lastPrediction!.activations.length);
    expect(cards.length).toBeGreaterThanOrEqual(20);
    const values = [...cards].map((c) => c.querySelector(".node-value")!.textContent);
    expect(values.some((v) => v!.includes("W_avg"))).toBe(true);
    expect(values.some((v) => v!.includes("kWh/m2a"))).toBe(true);
  });

  it("debounce-triggers a new prediction on an edit", async () => {
    const before = euiShown();
    const input = document.getElementById("param-g_value") as HTMLInputElement;
    input.value = "0.6";
    input.dispatchEvent(new Event("input"));
    await waitFor(() => euiShown() !== before, 20000);
    expect(state.config.g_value).toBe(0.6);
  });

  it("shows a signed delta after pinning a baseline", async () => {
    (document.getElementById("pin-baseline") as HTMLButtonElement).click();
    const before = euiShown();
    const input = document.getElementById("param-g_value") as HTMLInputElement;
    input.value = "0.33";
    input.dispatchEvent(new Event("input"));
    await waitFor(() => euiShown() !== before, 20000);
    const delta = document.getElementById("eui-delta")!;
    expect(delta.classList.contains("hidden")).toBe(false);
    expect(delta.textContent).toMatch(/^[+-]/);
  });

  it("flags an out-of-range edit, still shows the 422 prediction", async () => {
    (document.getElementById("clamp-toggle") as HTMLInputElement).click();
    expect(state.clampEdits).toBe(false);
    const input = document.getElementById("param-u_wall") as HTMLInputElement;
    input.value = "0.9";
    input.dispatchEvent(new Event("input"));
    await waitFor(() => state.lastPredictionOutOfRange, 20000);
    const badge = document.getElementById("extrapolation-badge")!;
    expect(badge.classList.contains("hidden")).toBe(false);
    expect(badge.textContent).toContain("u_wall");
    expect(Number.isFinite(euiShown())).toBe(true);
    const rowBadge = document.getElementById("badge-u_wall")!;
    expect(rowBadge.classList.contains("hidden")).toBe(false);
    // restore an in-range configuration for the remaining tests
    input.value = "0.2";
    input.dispatchEvent(new Event("input"));
    await waitFor(() => !state.lastPredictionOutOfRange, 20000);
  });
});

describe("UI/CLI consistency", () => {
  it("shows the same EUI the CLI prints for the same design", async () => {
    const designPath = join(E2E_DIR, "design.json");
    const fpPath = join(E2E_DIR, "footprint.json");
    writeFileSync(designPath, JSON.stringify(state.config));
    writeFileSync(fpPath, JSON.stringify(state.footprint));
    const res = runCli([
      "predict", "--config", RUN_CONFIG,
      "--design", designPath, "--footprint", fpPath,
    ]);
    expect(res.status).toBe(0);
    const match = res.stdout.match(/EUI: ([-\d.]+) kWh\/m2a/);
    expect(match).not.toBeNull();
    const cliEui = Number(match![1]);
    expect(Math.abs(cliEui - euiShown())).toBeLessThanOrEqual(1e-6);
  });
});

describe("sensitivity heatmap", () => {
  it("renders the standardized matrix bounded to [-1, 1] with bars", async () => {
    (document.getElementById("run-sensitivity") as HTMLButtonElement).click();
    await waitFor(() => state.sensitivity !== null, 120000);
    const matrix = state.sensitivity!;
    for (const row of matrix.s_standardized) {
      for (const v of row) {
        if (v !== null) expect(Math.abs(v)).toBeLessThanOrEqual(1.0 + 1e-12);
      }
    }
    expect(document.querySelectorAll("#heatmap td.cell").length).toBe(
      matrix.variables.length * matrix.outputs.length,
    );
    expect(document.querySelectorAll("#heatmap .activity-bar").length).toBe(
      matrix.variables.length,
    );
  });

  it("clicking a variable column retargets the rule tree", async () => {
    const variable = state.sensitivity!.variables[0];
    (document.getElementById(`var-${variable}`) as HTMLElement).click();
    await waitFor(() => state.tree !== null, 120000);
    expect(state.treeTarget).toBe("eui");
    expect(document.getElementById("tree-target-note")!.textContent).toContain(variable);
  });
});

describe("rule tree view", () => {
  it("lists readable rules with engineering units for the window component", async () => {
    state.tree = null;
    (document.getElementById("tree-target") as HTMLSelectElement).value = "window";
    (document.getElementById("run-tree") as HTMLButtonElement).click();
    await waitFor(() => state.tree !== null, 120000);
    const rules = document.querySelectorAll("#treeview .rule");
    expect(rules.length).toBeGreaterThanOrEqual(2);
    expect(rules.length).toBeLessThanOrEqual(2 ** state.tree!.tree.max_depth);
    expect(document.querySelector("#treeview")!.textContent).toContain("m2");
    expect(document.querySelectorAll("#treeview details.tree-split").length)
      .toBeGreaterThanOrEqual(1);
  });
});

describe("auditability", () => {
  it("traces every displayed headline number to a response field", () => {
    applyPrediction(state, {
      response: state.lastPrediction!,
      outOfRange: false,
    });
    const eui = document.getElementById("eui-value")!;
    expect(eui.getAttribute("data-source")).toBe("POST /predict -> .eui");
    const annual = document.getElementById("annual-value")!;
    expect(annual.getAttribute("data-source")).toBe("POST /predict -> .annual_energy");
  });
});
