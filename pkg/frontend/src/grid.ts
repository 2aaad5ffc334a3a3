import { N_COLORS } from "./colors.js";

export type Grid = number[][];

export const MAX_DIM = 30;

export class GridParseError extends Error {}

export function isValidGrid(value: unknown): value is Grid {
  if (!Array.isArray(value) || value.length === 0 || value.length > MAX_DIM) {
    return false;
  }
  const width = Array.isArray(value[0]) ? (value[0] as unknown[]).length : 0;
  if (width === 0 || width > MAX_DIM) return false;
  return value.every(
    (row) =>
      Array.isArray(row) &&
      row.length === width &&
      row.every(
        (cell) =>
          typeof cell === "number" &&
          Number.isInteger(cell) &&
          cell >= 0 &&
          cell < N_COLORS,
      ),
  );
}

export function cloneGrid(grid: Grid): Grid {
  return grid.map((row) => row.slice());
}

export function makeGrid(height: number, width: number, fill = 0): Grid {
  return Array.from({ length: height }, () => Array(width).fill(fill));
}

/** New dimensions; cells in the overlapping region carry over. */
export function resizeGrid(grid: Grid, height: number, width: number, fill = 0): Grid {
  const out = makeGrid(height, width, fill);
  for (let r = 0; r < Math.min(height, grid.length); r++) {
    for (let c = 0; c < Math.min(width, grid[0].length); c++) {
      out[r][c] = grid[r][c];
    }
  }
  return out;
}

/** Array-literal text for the clipboard, e.g. "[[1, 2], [3, 4]]". */
export function gridToText(grid: Grid): string {
  return "[" + grid.map((row) => "[" + row.join(", ") + "]").join(", ") + "]";
}

/**
 * Parse pasted array text. Accepts the clipboard format above, an
 * np.array(...) wrapper, and whitespace-separated print style like
 * "[[1 2] [3 4]]". Rejects ragged or out-of-range input.
 */
export function parseGridText(text: string): Grid {
  let body = text.trim();
  const wrapper = body.match(/^(?:np\.)?array\s*\(([\s\S]*)\)\s*$/);
  if (wrapper) body = wrapper[1].trim();
  if (!body.startsWith("[") || !body.endsWith("]")) {
    throw new GridParseError("expected a nested array like [[1, 2], [3, 4]]");
  }
  const rows: number[][] = [];
  const rowPattern = /\[([^\[\]]*)\]/g;
  let match: RegExpExecArray | null;
  while ((match = rowPattern.exec(body.slice(1, -1))) !== null) {
    const cells = match[1]
      .split(/[\s,]+/)
      .filter((part) => part.length > 0)
      .map((part) => {
        const value = Number(part);
        if (!Number.isInteger(value)) {
          throw new GridParseError(`not an integer: ${part}`);
        }
        return value;
      });
    if (cells.length === 0) {
      throw new GridParseError("empty row");
    }
    rows.push(cells);
  }
  if (rows.length === 0) throw new GridParseError("no rows found");
  const width = rows[0].length;
  if (rows.some((row) => row.length !== width)) {
    throw new GridParseError("rows have unequal lengths");
  }
  if (rows.length > MAX_DIM || width > MAX_DIM) {
    throw new GridParseError(`grids are limited to ${MAX_DIM}x${MAX_DIM}`);
  }
  for (const row of rows) {
    for (const cell of row) {
      if (cell < 0 || cell >= N_COLORS) {
        throw new GridParseError(`cell value out of range: ${cell}`);
      }
    }
  }
  return rows;
}

/** 4-connected flood fill; returns a new grid, input untouched. */
export function floodFill(grid: Grid, row: number, col: number, color: number): Grid {
  const out = cloneGrid(grid);
  const height = out.length;
  const width = out[0].length;
  if (row < 0 || row >= height || col < 0 || col >= width) return out;
  const target = out[row][col];
  if (target === color) return out;
  const stack: Array<[number, number]> = [[row, col]];
  while (stack.length > 0) {
    const [r, c] = stack.pop()!;
    if (r < 0 || r >= height || c < 0 || c >= width) continue;
    if (out[r][c] !== target) continue;
    out[r][c] = color;
    stack.push([r + 1, c], [r - 1, c], [r, c + 1], [r, c - 1]);
  }
  return out;
}

export interface Selection {
  r0: number;
  c0: number;
  r1: number;
  c1: number;
}

export function normalizeSelection(sel: Selection): Selection {
  return {
    r0: Math.min(sel.r0, sel.r1),
    c0: Math.min(sel.c0, sel.c1),
    r1: Math.max(sel.r0, sel.r1),
    c1: Math.max(sel.c0, sel.c1),
  };
}

/** Paint the (inclusive) rectangular selection; returns a new grid. */
export function paintSelection(grid: Grid, sel: Selection, color: number): Grid {
  const { r0, c0, r1, c1 } = normalizeSelection(sel);
  const out = cloneGrid(grid);
  for (let r = Math.max(0, r0); r <= Math.min(out.length - 1, r1); r++) {
    for (let c = Math.max(0, c0); c <= Math.min(out[0].length - 1, c1); c++) {
      out[r][c] = color;
    }
  }
  return out;
}
