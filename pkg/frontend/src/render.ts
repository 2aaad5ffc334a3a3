import { COLOR_HEX } from "./colors.js";
import { Grid, gridToText, isValidGrid } from "./grid.js";

/** Colored cell table for the visual IO panels. */
export function renderGridElement(grid: Grid): HTMLElement {
  const table = document.createElement("table");
  table.className = "grid-view";
  for (const row of grid) {
    const tr = document.createElement("tr");
    for (const cell of row) {
      const td = document.createElement("td");
      td.className = "grid-cell";
      td.dataset.color = String(cell);
      td.style.backgroundColor = COLOR_HEX[cell] ?? "#ffffff";
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  return table;
}

/** Visual rendering when the value is a grid, array text otherwise. */
export function renderValue(value: unknown): HTMLElement {
  if (isValidGrid(value)) {
    return renderGridElement(value);
  }
  const pre = document.createElement("pre");
  pre.className = "value-view";
  pre.textContent = formatValueText(value);
  return pre;
}

/** Array-style text for the textual IO panel. */
export function formatValueText(value: unknown): string {
  if (isValidGrid(value)) return gridToText(value);
  if (value !== null && typeof value === "object" && !Array.isArray(value)) {
    const record = value as Record<string, unknown>;
    if (Array.isArray(record.t)) {
      return "(" + record.t.map(formatValueText).join(", ") + ")";
    }
    if (typeof record.r === "string") return record.r;
  }
  if (Array.isArray(value)) {
    return "[" + value.map(formatValueText).join(", ") + "]";
  }
  return JSON.stringify(value);
}
