import { SessionApi, Snapshot } from "../api.js";
import { GridEditor } from "../grid-editor.js";
import { PanelState } from "../state.js";

/**
 * Resynthesis: collect IO constraint pairs with two grid editors, post
 * them, trigger a candidate batch, and show the per-candidate
 * per-constraint outcome matrix.
 */
export class ResynthPanel {
  readonly holeSelect: HTMLSelectElement;
  readonly inputEditor: GridEditor;
  readonly expectedEditor: GridEditor;
  readonly status: HTMLElement;
  readonly matrix: HTMLElement;

  constructor(
    private container: HTMLElement,
    private api: SessionApi,
    private state: PanelState,
  ) {
    this.holeSelect = document.createElement("select");
    this.holeSelect.className = "hole-select";
    const inputHost = document.createElement("div");
    inputHost.className = "constraint-input";
    const expectedHost = document.createElement("div");
    expectedHost.className = "constraint-expected";
    this.inputEditor = new GridEditor(inputHost);
    this.expectedEditor = new GridEditor(expectedHost);
    this.status = document.createElement("div");
    this.status.className = "resynth-status";
    this.matrix = document.createElement("div");
    this.matrix.className = "candidate-matrix";
    container.append(this.holeSelect, inputHost, expectedHost,
                     this.status, this.matrix);
  }

  refresh(snapshot: Snapshot): void {
    this.state.snapshot = snapshot;
    this.holeSelect.innerHTML = "";
    for (const hole of snapshot.holes) {
      const option = document.createElement("option");
      option.value = hole.id;
      option.textContent = hole.id;
      this.holeSelect.appendChild(option);
    }
  }

  async addConstraint(): Promise<void> {
    const snapshot = this.state.snapshot;
    if (!snapshot) throw new Error("no session loaded");
    const result = await this.api.addConstraint(
      snapshot.session_id,
      this.holeSelect.value,
      [this.inputEditor.grid],
      this.expectedEditor.grid,
    );
    this.status.textContent =
      `${result.count} constraint(s) stored for ${result.hole_id}`;
  }

  busy = false;

  async run(): Promise<void> {
    const snapshot = this.state.snapshot;
    if (!snapshot) throw new Error("no session loaded");
    if (this.busy) return; // one in-flight mutation per session
    this.busy = true;
    this.matrix.innerHTML = "";
    this.status.textContent = "resynthesizing...";
    try {
      const outcome = await this.api.resynthesize(snapshot.session_id,
                                                  this.holeSelect.value);
      this.state.candidateReport = outcome.report;
      if (outcome.ok && outcome.snapshot) {
        this.state.snapshot = outcome.snapshot;
        this.status.textContent =
          `candidate ${outcome.report.selected} selected`;
      } else {
        this.status.textContent = "no candidate satisfied the constraints";
      }
      this.renderMatrix();
    } finally {
      this.busy = false;
    }
  }

  private renderMatrix(): void {
    const report = this.state.candidateReport;
    if (!report) return;
    const byCandidate = new Map<number, Map<number, string>>();
    let constraintCount = 0;
    for (const row of report.results) {
      if (!byCandidate.has(row.candidate_index)) {
        byCandidate.set(row.candidate_index, new Map());
      }
      byCandidate.get(row.candidate_index)!.set(row.constraint_index, row.status);
      constraintCount = Math.max(constraintCount, row.constraint_index + 1);
    }
    const table = document.createElement("table");
    for (const [candidate, statuses] of
         [...byCandidate.entries()].sort((a, b) => a[0] - b[0])) {
      const tr = document.createElement("tr");
      tr.dataset.candidate = String(candidate);
      if (candidate === report.selected) tr.classList.add("selected");
      for (let i = 0; i < constraintCount; i++) {
        const td = document.createElement("td");
        td.className = `status-${statuses.get(i) ?? "skipped"}`;
        td.textContent = statuses.get(i) ?? "-";
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    this.matrix.appendChild(table);
  }
}
