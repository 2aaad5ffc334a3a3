import { SessionApi, Snapshot } from "../api.js";
import { Grid } from "../grid.js";
import { formatValueText, renderValue } from "../render.js";
import { PanelState, traceableFunctions } from "../state.js";

/**
 * Trace viewer: pick a function, run the program on an input grid, and
 * see every recorded call as colored grids (visual IO) and array text
 * (textual IO). Faults surface the interpreter traceback verbatim.
 */
export class TracePanel {
  readonly select: HTMLSelectElement;
  readonly events: HTMLElement;
  readonly banner: HTMLElement;
  readonly output: HTMLElement;

  constructor(
    private container: HTMLElement,
    private api: SessionApi,
    private state: PanelState,
  ) {
    this.select = document.createElement("select");
    this.select.className = "function-select";
    this.select.addEventListener("change", () => {
      this.state.selectedFunction = this.select.value;
    });
    this.banner = document.createElement("div");
    this.banner.className = "fault-banner";
    this.banner.hidden = true;
    this.events = document.createElement("div");
    this.events.className = "trace-events";
    this.output = document.createElement("div");
    this.output.className = "trace-output";
    container.append(this.select, this.banner, this.output, this.events);
  }

  refresh(snapshot: Snapshot): void {
    this.state.snapshot = snapshot;
    this.select.innerHTML = "";
    for (const name of traceableFunctions(snapshot)) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      this.select.appendChild(option);
    }
    this.select.value = this.state.selectedFunction =
      this.select.options[0]?.value ?? "main";
  }

  async run(input: Grid): Promise<void> {
    if (!this.state.snapshot) throw new Error("no session loaded");
    this.banner.hidden = true;
    this.events.innerHTML = "";
    this.output.innerHTML = "";
    const result = await this.api.trace(
      this.state.snapshot.session_id,
      [this.state.selectedFunction],
      input,
    );
    if (result.status !== "ok") {
      this.banner.hidden = false;
      this.banner.textContent =
        result.status === "timeout"
          ? "execution timed out"
          : result.traceback ?? "fault";
      return;
    }
    this.state.traceEvents = result.events ?? [];
    this.output.appendChild(renderValue(result.output));
    for (const event of this.state.traceEvents) {
      const block = document.createElement("div");
      block.className = "trace-event";
      block.dataset.function = event.function;
      block.dataset.index = String(event.invocation_index);

      const visual = document.createElement("div");
      visual.className = "visual-io";
      for (const arg of event.args) visual.appendChild(renderValue(arg));
      visual.appendChild(renderValue(event.returned));

      const textual = document.createElement("pre");
      textual.className = "textual-io";
      textual.textContent =
        event.args.map(formatValueText).join("\n") +
        "\n-> " +
        formatValueText(event.returned);

      block.append(visual, textual);
      this.events.appendChild(block);
    }
  }
}
