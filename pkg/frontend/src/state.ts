import { CandidateReport, Snapshot, TraceEvent } from "./api.js";
import { Grid, isValidGrid, makeGrid } from "./grid.js";

/** Shared panel state; the grid buffer is always a valid grid. */
export interface PanelState {
  snapshot: Snapshot | null;
  selectedFunction: string;
  anplDraft: string;
  traceEvents: TraceEvent[];
  candidateReport: CandidateReport | null;
  gridBuffer: Grid;
}

export function createPanelState(): PanelState {
  return {
    snapshot: null,
    selectedFunction: "main",
    anplDraft: "",
    traceEvents: [],
    candidateReport: null,
    gridBuffer: makeGrid(3, 3),
  };
}

export function setGridBuffer(state: PanelState, grid: Grid): void {
  if (!isValidGrid(grid)) {
    throw new Error("grid buffer must stay a valid grid");
  }
  state.gridBuffer = grid;
}

/** Functions eligible for tracing: every fill plus main. */
export function traceableFunctions(snapshot: Snapshot | null): string[] {
  if (!snapshot?.compiled) return ["main"];
  const fills = Object.values(snapshot.compiled.fill_map);
  return [...fills, "main"];
}
