// Debug inspector: every rendered number registers the JSON path of the
// service response field it came from, so what is on screen is auditable.

export interface ProvenanceEntry {
  label: string;
  value: number;
  source: string; // e.g. "POST /predict -> .activations[3].value"
}

const entries = new Map<string, ProvenanceEntry>();

export function recordValue(key: string, entry: ProvenanceEntry): void {
  entries.set(key, entry);
}

export function clearValues(prefix: string): void {
  for (const key of [...entries.keys()]) {
    if (key.startsWith(prefix)) entries.delete(key);
  }
}

export function allEntries(): ProvenanceEntry[] {
  return [...entries.values()];
}

export function lookup(key: string): ProvenanceEntry | undefined {
  return entries.get(key);
}

/** Attach the raw value and its source to an element and register it. */
export function bindValue(
  el: HTMLElement | SVGElement,
  key: string,
  entry: ProvenanceEntry,
): void {
  el.setAttribute("data-value", String(entry.value));
  el.setAttribute("data-source", entry.source);
  recordValue(key, entry);
}

export function renderInspector(container: HTMLElement): void {
  container.innerHTML = "";
  const table = document.createElement("table");
  table.className = "inspector-table";
  const head = document.createElement("tr");
  head.innerHTML = "<th>shown value</th><th>raw</th><th>response field</th>";
  table.appendChild(head);
  for (const e of allEntries()) {
    const tr = document.createElement("tr");
    const label = document.createElement("td");
    label.textContent = e.label;
    const raw = document.createElement("td");
    raw.textContent = String(e.value);
    const src = document.createElement("td");
    src.textContent = e.source;
    tr.append(label, raw, src);
    table.appendChild(tr);
  }
  container.appendChild(table);
}
