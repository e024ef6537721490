import { beforeEach, describe, expect, it } from "vitest";
import { renderTree } from "../src/treeview.js";
import { TreeResponse } from "../src/types.js";

function depth2Tree(): TreeResponse {
  return {
    tree: {
      target: { name: "heat_flow", unit: "W_avg" },
      features: [
        { name: "area", unit: "m2" },
        { name: "g_value", unit: "-" },
        { name: "u_value", unit: "W/m2K" },
      ],
      max_depth: 2,
      min_leaf: 5,
      root: {
        prediction: 1500,
        count: 100,
        depth: 0,
        feature: "area",
        unit: "m2",
        threshold: 110.5,
        dependence_flag: true,
        left: {
          prediction: 900,
          count: 60,
          depth: 1,
          feature: "g_value",
          unit: "-",
          threshold: 0.44,
          dependence_flag: false,
          left: { prediction: 700, count: 30, depth: 2 },
          right: { prediction: 1100, count: 30, depth: 2 },
        },
        right: {
          prediction: 2400,
          count: 40,
          depth: 1,
          feature: "u_value",
          unit: "W/m2K",
          threshold: 0.85,
          dependence_flag: false,
          left: { prediction: 2200, count: 20, depth: 2 },
          right: { prediction: 2600, count: 20, depth: 2 },
        },
      },
    },
    rules: [
      {
        text: "if area <= 110.5 m2 and g_value <= 0.44 then 700 W_avg (n=30)",
        prediction: 700,
        unit: "W_avg",
        count: 30,
        under_dependence: true,
        conditions: [
          { feature: "area", unit: "m2", comparator: "<=", threshold: 110.5 },
          { feature: "g_value", unit: "-", comparator: "<=", threshold: 0.44 },
        ],
      },
    ],
    leaf_models: [
      {
        leaf: 3,
        count: 20,
        intercept: 5.0,
        target_unit: "W_avg",
        terms: [
          { feature: "area", unit: "m2", coefficient: 3.0 },
          { feature: "g_value", unit: "-", coefficient: 100.0 },
        ],
      },
    ],
    n_samples: 600,
  };
}

describe("renderTree", () => {
  let container: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "<div id='tv'></div>";
    container = document.getElementById("tv")!;
  });

  it("renders thresholds with engineering units", () => {
    renderTree(container, depth2Tree());
    expect(container.textContent).toContain("area ≤ 110.5 m2");
    expect(container.textContent).toContain("u_value ≤ 0.85 W/m2K");
  });

  it("lists one rule per provided path with its leaf prediction bound", () => {
    renderTree(container, depth2Tree());
    const rules = container.querySelectorAll(".rule");
    expect(rules.length).toBe(1);
    expect(rules[0].getAttribute("data-value")).toBe("700");
  });

  it("highlights dependence-flagged splits and rules", () => {
    renderTree(container, depth2Tree());
    expect(container.querySelectorAll(".tree-split.dependence").length).toBe(1);
    expect(container.querySelectorAll(".rule.dependence").length).toBe(1);
  });

  it("shows leaf linear models with coefficients", () => {
    renderTree(container, depth2Tree());
    expect(container.textContent).toContain("3·area");
    expect(container.textContent).toContain("100·g_value");
  });

  it("handles a depth-0 tree with a single-leaf message", () => {
    const res = depth2Tree();
    res.tree.root = { prediction: 1234, count: 100, depth: 0 };
    res.rules = [];
    res.leaf_models = [];
    renderTree(container, res);
    expect(container.querySelector(".single-leaf")!.textContent).toContain("1,234");
  });
});
