// Display formatting. Raw values stay attached to elements as data
// attributes so the inspector (and tests) can trace what is rendered.

export function formatValue(value: number, digits = 2): string {
  if (!Number.isFinite(value)) return "–";
  const abs = Math.abs(value);
  if (abs !== 0 && (abs >= 1e6 || abs < 1e-3)) {
    return value.toExponential(digits);
  }
  return value.toLocaleString("en-US", {
    minimumFractionDigits: 0,
    maximumFractionDigits: digits,
  });
}

export function formatWithUnit(value: number, unit: string, digits = 2): string {
  const u = unit === "-" || unit === "" ? "" : ` ${unit}`;
  return `${formatValue(value, digits)}${u}`;
}

export function formatSigned(value: number, digits = 2): string {
  const s = formatValue(value, digits);
  return value > 0 ? `+${s}` : s;
}

/** Diverging palette for standardized sensitivities in [-1, 1]:
 * blue (negative) through near-white (zero) to red (positive). */
export function divergingColor(v: number | null): string {
  if (v === null || !Number.isFinite(v)) return "transparent";
  const t = Math.max(-1, Math.min(1, v));
  const mag = Math.abs(t);
  const light = 97 - 47 * mag;
  const hue = t < 0 ? 215 : 8;
  const sat = 15 + 70 * mag;
  return `hsl(${hue}, ${sat.toFixed(0)}%, ${light.toFixed(0)}%)`;
}
