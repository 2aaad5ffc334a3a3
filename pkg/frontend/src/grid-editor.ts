import { COLOR_HEX, N_COLORS } from "./colors.js";
import {
  Grid,
  Selection,
  cloneGrid,
  floodFill,
  gridToText,
  makeGrid,
  normalizeSelection,
  paintSelection,
  parseGridText,
  resizeGrid,
} from "./grid.js";

export type Tool = "paint" | "select" | "fill";

/**
 * Grid editor: resize, generate-from-text, reset, copy-as-text, and a
 * graphical area with paint, rectangular select, and 4-connected flood
 * fill over the ten colors.
 */
export class GridEditor {
  color = 0;
  tool: Tool = "paint";
  selection: Selection | null = null;
  lastCopied: string | null = null;
  onChange: ((grid: Grid) => void) | null = null;

  private current: Grid;
  private initial: Grid;
  private anchor: [number, number] | null = null;
  private table: HTMLElement;
  private message: HTMLElement;

  constructor(
    private container: HTMLElement,
    initial?: Grid,
  ) {
    this.current = initial ? cloneGrid(initial) : makeGrid(3, 3);
    this.initial = cloneGrid(this.current);
    this.table = document.createElement("div");
    this.message = document.createElement("div");
    this.message.className = "editor-message";
    this.buildToolbar();
    this.container.appendChild(this.table);
    this.container.appendChild(this.message);
    this.redraw();
  }

  get grid(): Grid {
    return cloneGrid(this.current);
  }

  setGrid(grid: Grid): void {
    this.current = cloneGrid(grid);
    this.initial = cloneGrid(grid);
    this.selection = null;
    this.redraw();
    this.onChange?.(this.grid);
  }

  resize(height: number, width: number): void {
    this.current = resizeGrid(this.current, height, width);
    this.selection = null;
    this.redraw();
    this.onChange?.(this.grid);
  }

  /** Build the grid from pasted array text; bad input shows a message. */
  generate(text: string): boolean {
    try {
      this.setGrid(parseGridText(text));
      this.message.textContent = "";
      return true;
    } catch (error) {
      this.message.textContent = String((error as Error).message);
      return false;
    }
  }

  reset(): void {
    this.current = cloneGrid(this.initial);
    this.selection = null;
    this.redraw();
    this.onChange?.(this.grid);
  }

  /** Array text of the current grid; also placed on the clipboard. */
  copy(): string {
    const text = gridToText(this.current);
    this.lastCopied = text;
    const clipboard = (globalThis.navigator as Navigator | undefined)?.clipboard;
    clipboard?.writeText?.(text);
    return text;
  }

  fillSelection(): void {
    if (!this.selection) return;
    this.current = paintSelection(this.current, this.selection, this.color);
    this.selection = null;
    this.redraw();
    this.onChange?.(this.grid);
  }

  cellAt(row: number, col: number): HTMLElement {
    return this.table.querySelector(
      `td[data-row="${row}"][data-col="${col}"]`,
    ) as HTMLElement;
  }

  private handleDown(row: number, col: number): void {
    if (this.tool === "paint") {
      this.current[row][col] = this.color;
      this.redraw();
      this.onChange?.(this.grid);
    } else if (this.tool === "fill") {
      this.current = floodFill(this.current, row, col, this.color);
      this.redraw();
      this.onChange?.(this.grid);
    } else {
      this.anchor = [row, col];
    }
  }

  private handleUp(row: number, col: number): void {
    if (this.tool === "select" && this.anchor) {
      this.selection = normalizeSelection({
        r0: this.anchor[0],
        c0: this.anchor[1],
        r1: row,
        c1: col,
      });
      this.anchor = null;
      this.redraw();
    }
  }

  private buildToolbar(): void {
    const toolbar = document.createElement("div");
    toolbar.className = "editor-toolbar";
    for (let color = 0; color < N_COLORS; color++) {
      const swatch = document.createElement("button");
      swatch.className = "swatch";
      swatch.dataset.color = String(color);
      swatch.style.backgroundColor = COLOR_HEX[color];
      swatch.addEventListener("click", () => {
        this.color = color;
      });
      toolbar.appendChild(swatch);
    }
    for (const tool of ["paint", "select", "fill"] as Tool[]) {
      const button = document.createElement("button");
      button.className = "tool";
      button.dataset.tool = tool;
      button.textContent = tool;
      button.addEventListener("click", () => {
        this.tool = tool;
      });
      toolbar.appendChild(button);
    }
    this.container.appendChild(toolbar);
  }

  private redraw(): void {
    this.table.innerHTML = "";
    const table = document.createElement("table");
    table.className = "grid-editor";
    const selected = this.selection ? normalizeSelection(this.selection) : null;
    this.current.forEach((cells, row) => {
      const tr = document.createElement("tr");
      cells.forEach((cell, col) => {
        const td = document.createElement("td");
        td.dataset.row = String(row);
        td.dataset.col = String(col);
        td.dataset.color = String(cell);
        td.style.backgroundColor = COLOR_HEX[cell];
        if (
          selected &&
          row >= selected.r0 && row <= selected.r1 &&
          col >= selected.c0 && col <= selected.c1
        ) {
          td.classList.add("selected");
        }
        td.addEventListener("mousedown", () => this.handleDown(row, col));
        td.addEventListener("mouseup", () => this.handleUp(row, col));
        tr.appendChild(td);
      });
      table.appendChild(tr);
    });
    this.table.appendChild(table);
  }
}
