import { beforeEach, describe, expect, it, vi } from "vitest";
import { renderHeatmap } from "../src/heatmap.js";
import { SensitivityResponse } from "../src/types.js";

function matrix(): SensitivityResponse {
  return {
    variables: ["u_wall", "g_value", "u_internal_floor"],
    outputs: [
      { node: "building_energy", quantity: "energy_use_intensity", unit: "kWh/m2a" },
      { node: "window_S", quantity: "heat_flow", unit: "W_avg" },
    ],
    base_values: [0.2, 0.45, 0.5],
    delta: 0.05,
    s: [
      [1.2, -0.8, 0.0],
      [0.0, 420.0, null],
    ],
    s_standardized: [
      [1.0, -0.0019, 0.0],
      [0.0, 1.0, null],
    ],
    activity: [1.0, 1.0019, 0.0],
    passivity: [1.0019, 1.0],
    warnings: ["no variation in: u_internal_floor"],
  };
}

describe("renderHeatmap", () => {
  let container: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "<div id='hm'></div>";
    container = document.getElementById("hm")!;
  });

  it("renders one cell per output/variable with raw hover titles", () => {
    renderHeatmap(container, matrix());
    const cells = container.querySelectorAll("td.cell");
    expect(cells.length).toBe(6);
    const cell = container.querySelector("#cell-window_S-g_value")!;
    expect(cell.getAttribute("title")).toContain("420");
    expect(cell.getAttribute("title")).toContain("W_avg");
  });

  it("keeps zero entries neutral and renders undefined entries hatched", () => {
    renderHeatmap(container, matrix());
    const zero = container.querySelector("#cell-window_S-u_wall") as HTMLElement;
    expect(zero.style.backgroundColor).toContain("97%");
    const undef = container.querySelector("#cell-window_S-u_internal_floor")!;
    expect(undef.classList.contains("undefined-cell")).toBe(true);
  });

  it("scales activity bars and exposes raw values for auditing", () => {
    renderHeatmap(container, matrix());
    const bar = container.querySelector("#activity-g_value") as HTMLElement;
    expect(bar.getAttribute("data-value")).toBe("1.0019");
    expect(bar.getAttribute("data-source")).toContain("/sensitivity");
    const zeroBar = container.querySelector("#activity-u_internal_floor") as HTMLElement;
    expect((zeroBar.querySelector(".bar") as HTMLElement).style.height).toBe("0%");
  });

  it("surfaces matrix warnings and forwards variable clicks", () => {
    const onClick = vi.fn();
    renderHeatmap(container, matrix(), { onVariableClick: onClick });
    expect(container.textContent).toContain("no variation in");
    (container.querySelector("#var-g_value") as HTMLElement).click();
    expect(onClick).toHaveBeenCalledWith("g_value");
  });
});
