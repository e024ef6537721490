import { beforeEach, describe, expect, it } from "vitest";
import { DEFAULT_CONFIG, SessionState } from "../src/state.js";
import { PredictResponse } from "../src/types.js";

const RANGES = [
  { name: "u_wall", unit: "W/m2K", low: 0.15, high: 0.25, integer: false },
  { name: "num_floors", unit: "-", low: 2, high: 5, integer: true },
];

function prediction(eui: number): PredictResponse {
  return {
    eui,
    annual_energy: eui * 3025,
    activations: [],
    model_version: "t",
    warnings: [],
  };
}

describe("SessionState", () => {
  let state: SessionState;

  beforeEach(() => {
    state = new SessionState();
    state.setRanges(RANGES);
  });

  it("starts from the representative defaults", () => {
    expect(state.config).toEqual(DEFAULT_CONFIG);
    expect(state.footprint.kind).toBe("setback");
  });

  it("clamps edits into the declared range when clamping is on", () => {
    const res = state.edit("u_wall", 0.9);
    expect(res.value).toBe(0.25);
    expect(res.clamped).toBe(true);
    expect(res.outOfRange).toBe(false);
    expect(state.config.u_wall).toBe(0.25);
  });

  it("lets out-of-range values through when clamping is off, flagged", () => {
    state.clampEdits = false;
    const res = state.edit("u_wall", 0.9);
    expect(res.value).toBe(0.9);
    expect(res.clamped).toBe(false);
    expect(res.outOfRange).toBe(true);
    expect(state.outOfRangeFields()).toEqual(["u_wall"]);
  });

  it("rounds integer parameters", () => {
    const res = state.edit("num_floors", 3.6);
    expect(res.value).toBe(4);
  });

  it("leaves unknown-range fields unclamped", () => {
    const res = state.edit("length", 500);
    expect(res.value).toBe(500);
    expect(res.outOfRange).toBe(false);
  });

  it("computes the signed EUI delta against the pinned baseline", () => {
    state.lastPrediction = prediction(50);
    state.pinBaseline();
    state.lastPrediction = prediction(47.5);
    expect(state.euiDelta()).toBeCloseTo(-2.5, 12);
  });

  it("has no delta without a pinned baseline", () => {
    state.lastPrediction = prediction(50);
    expect(state.euiDelta()).toBeNull();
  });
});
