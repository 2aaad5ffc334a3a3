import { ApiError, EditOp, SessionApi, Snapshot } from "../api.js";
import { PanelState } from "../state.js";

/**
 * Hole/function editor: pick an item, rewrite its text, submit, and
 * watch compile progress. Validation failures render as inline
 * diagnostics anchored to source lines.
 */
export class EditPanel {
  readonly select: HTMLSelectElement;
  readonly draft: HTMLTextAreaElement;
  readonly progress: HTMLElement;
  readonly result: HTMLElement;
  readonly diagnostics: HTMLElement;

  constructor(
    private container: HTMLElement,
    private api: SessionApi,
    private state: PanelState,
  ) {
    this.select = document.createElement("select");
    this.select.className = "item-select";
    this.select.addEventListener("change", () => this.seedDraft());
    this.draft = document.createElement("textarea");
    this.draft.className = "draft";
    this.progress = document.createElement("div");
    this.progress.className = "compile-progress";
    this.result = document.createElement("pre");
    this.result.className = "compile-result";
    this.diagnostics = document.createElement("div");
    this.diagnostics.className = "diagnostics";
    container.append(this.select, this.draft, this.diagnostics,
                     this.progress, this.result);
  }

  refresh(snapshot: Snapshot): void {
    this.state.snapshot = snapshot;
    this.select.innerHTML = "";
    for (const hole of snapshot.holes) {
      const option = document.createElement("option");
      option.value = `hole:${hole.id}`;
      option.textContent = `${hole.id} (hole)`;
      this.select.appendChild(option);
    }
    for (const chunk of functionChunks(snapshot.anpl_source)) {
      const option = document.createElement("option");
      option.value = `fn:${chunk.name}`;
      option.textContent = `${chunk.name} (sketch)`;
      this.select.appendChild(option);
    }
    this.seedDraft();
  }

  seedDraft(): void {
    const snapshot = this.state.snapshot;
    if (!snapshot) return;
    const [kind, name] = this.select.value.split(":", 2);
    if (kind === "hole") {
      const hole = snapshot.holes.find((h) => h.id === name);
      this.draft.value = hole?.description ?? "";
    } else {
      const chunk = functionChunks(snapshot.anpl_source)
        .find((c) => c.name === name);
      this.draft.value = chunk?.source ?? "";
    }
    this.state.anplDraft = this.draft.value;
  }

  currentOp(): EditOp {
    const [kind, name] = this.select.value.split(":", 2);
    if (kind === "hole") {
      return { kind: "edit_description", hole_id: name, text: this.draft.value };
    }
    return { kind: "edit_sketch", function: name, source: this.draft.value };
  }

  busy = false;

  async submit(): Promise<void> {
    const snapshot = this.state.snapshot;
    if (!snapshot) throw new Error("no session loaded");
    if (this.busy) return; // one in-flight mutation per session
    this.busy = true;
    this.diagnostics.innerHTML = "";
    this.result.textContent = "";
    this.progress.textContent = "compiling...";
    this.state.anplDraft = this.draft.value;
    try {
      const outcome = await this.api.edit(snapshot.session_id, this.currentOp());
      if (!outcome.ok) {
        this.progress.textContent = `compile failed: ${outcome.error}`;
        return;
      }
      this.state.snapshot = outcome.snapshot;
      const delta = outcome.delta;
      this.progress.textContent =
        `recompiled ${delta?.changed.length ?? 0} changed, ` +
        `${delta?.new.length ?? 0} new`;
      this.result.textContent =
        outcome.snapshot.compiled?.target_source ?? "";
    } catch (error) {
      if (error instanceof ApiError && error.diagnostics.length > 0) {
        this.progress.textContent = "rejected";
        for (const diagnostic of error.diagnostics) {
          const row = document.createElement("div");
          row.className = `diagnostic ${diagnostic.severity}`;
          row.dataset.line = String(diagnostic.line);
          row.textContent =
            `${diagnostic.line}:${diagnostic.col} ${diagnostic.message}`;
          this.diagnostics.appendChild(row);
        }
        return;
      }
      throw error;
    } finally {
      this.busy = false;
    }
  }
}

export function functionChunks(
  source: string,
): Array<{ name: string; source: string }> {
  const chunks: Array<{ name: string; source: string }> = [];
  const parts = source.split(/\n(?=def )/);
  for (const part of parts) {
    const match = part.match(/^def\s+(\w+)/);
    if (match) chunks.push({ name: match[1], source: part.trimEnd() + "\n" });
  }
  return chunks;
}
