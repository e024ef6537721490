import { describe, expect, it } from "vitest";
import { divergingColor, formatSigned, formatValue, formatWithUnit } from "../src/format.js";

describe("formatValue", () => {
  it("renders plain numbers with limited digits", () => {
    expect(formatValue(47.274914, 2)).toBe("47.27");
    expect(formatValue(0, 2)).toBe("0");
  });

  it("switches to scientific for extreme magnitudes", () => {
    expect(formatValue(1.5e7, 2)).toBe("1.50e+7");
    expect(formatValue(2.5e-4, 2)).toBe("2.50e-4");
  });

  it("handles non-finite values", () => {
    expect(formatValue(Number.NaN)).toBe("–");
  });
});

describe("formatWithUnit", () => {
  it("appends the unit unless dimensionless", () => {
    expect(formatWithUnit(120.5, "W_avg")).toBe("120.5 W_avg");
    expect(formatWithUnit(0.45, "-")).toBe("0.45");
  });
});

describe("formatSigned", () => {
  it("prefixes positive deltas", () => {
    expect(formatSigned(1.2)).toBe("+1.2");
    expect(formatSigned(-3.4)).toBe("-3.4");
  });
});

describe("divergingColor", () => {
  it("is neutral near zero and saturated at the bounds", () => {
    expect(divergingColor(0)).toContain("97%");
    expect(divergingColor(1)).toContain("hsl(8");
    expect(divergingColor(-1)).toContain("hsl(215");
  });

  it("renders undefined entries transparent", () => {
    expect(divergingColor(null)).toBe("transparent");
  });

  it("clamps standardized values into [-1, 1]", () => {
    expect(divergingColor(4)).toBe(divergingColor(1));
  });
});
