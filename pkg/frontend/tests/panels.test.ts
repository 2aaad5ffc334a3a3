// Panel integration: each panel drives the mock-backed service end to
// end, and every request it makes must hit a documented endpoint.

import { beforeEach, describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { EditPanel, functionChunks } from "../src/panels/edit.js";
import { ResynthPanel } from "../src/panels/resynth.js";
import { TracePanel } from "../src/panels/trace.js";
import { createPanelState, setGridBuffer, traceableFunctions } from "../src/state.js";
import { mountWorkbench } from "../src/main.js";
import { ANPL_SOURCE, DOCUMENTED, baseSnapshot, buildMockService } from "./mock_service.js";

function host(): HTMLElement {
  const element = document.createElement("div");
  document.body.appendChild(element);
  return element;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("TracePanel", () => {
  it("lists fills plus main and renders visual and textual IO", async () => {
    const service = buildMockService();
    const panel = new TracePanel(host(), new SessionApi("", service.fetchImpl),
                                 createPanelState());
    panel.refresh(baseSnapshot());
    const options = [...panel.select.options].map((o) => o.value);
    expect(options).toEqual(["_hole0", "main"]);

    await panel.run([[1, 2], [3, 4]]);
    const block = panel.events.querySelector(".trace-event") as HTMLElement;
    expect(block.dataset.function).toBe("_hole0");
    const cells = block.querySelectorAll(".visual-io .grid-cell");
    expect(cells.length).toBe(8); // one 2x2 argument, one 2x2 return
    expect(block.querySelector(".textual-io")!.textContent)
      .toContain("[[2, 4], [6, 8]]");
  });

  it("hole-free programs offer only main", () => {
    const snapshot = baseSnapshot();
    snapshot.holes = [];
    snapshot.compiled!.fill_map = {};
    const panel = new TracePanel(host(), new SessionApi("", buildMockService().fetchImpl),
                                 createPanelState());
    panel.refresh(snapshot);
    expect([...panel.select.options].map((o) => o.value)).toEqual(["main"]);
    expect(traceableFunctions(snapshot)).toEqual(["main"]);
  });

  it("shows a fault banner with the traceback verbatim", async () => {
    const service = buildMockService();
    service.traceResult = {
      status: "fault",
      traceback: "Traceback (most recent call last):\nIndexError: boom",
    };
    const panel = new TracePanel(host(), new SessionApi("", service.fetchImpl),
                                 createPanelState());
    panel.refresh(baseSnapshot());
    await panel.run([[1]]);
    expect(panel.banner.hidden).toBe(false);
    expect(panel.banner.textContent).toContain("IndexError: boom");
  });
});

describe("EditPanel", () => {
  it("submitting a description edit shows progress then the new fill", async () => {
    const service = buildMockService();
    const panel = new EditPanel(host(), new SessionApi("", service.fetchImpl),
                                createPanelState());
    panel.refresh(baseSnapshot());
    panel.select.value = "hole:_hole0";
    panel.seedDraft();
    expect(panel.draft.value).toBe("double every cell");

    panel.draft.value = "triple every cell";
    await panel.submit();
    expect(panel.progress.textContent).toContain("recompiled 1 changed");
    expect(panel.result.textContent).toContain("return input * 3");
    const edits = service.log.filter((c) => c.path.endsWith("/edit"));
    expect(edits.length).toBe(1);
    expect(edits[0].body).toEqual({
      op: { kind: "edit_description", hole_id: "_hole0",
            text: "triple every cell" },
    });
  });

  it("renders inline diagnostics at their source lines on 400", async () => {
    const service = buildMockService();
    service.editResult = {
      status: 400,
      detail: {
        diagnostics: [
          { severity: "error", message: "UndefinedVariable: ghost",
            line: 2, col: 11 },
        ],
      },
    };
    const panel = new EditPanel(host(), new SessionApi("", service.fetchImpl),
                                createPanelState());
    panel.refresh(baseSnapshot());
    panel.select.value = "fn:main";
    panel.draft.value = "def main(input):\n    return ghost\n";
    await panel.submit();
    const diagnostic = panel.diagnostics.querySelector(".diagnostic") as HTMLElement;
    expect(diagnostic.dataset.line).toBe("2");
    expect(diagnostic.textContent).toContain("UndefinedVariable");
  });

  it("splits sketch source into selectable functions", () => {
    const chunks = functionChunks(ANPL_SOURCE);
    expect(chunks.map((c) => c.name)).toEqual(["main"]);
    expect(chunks[0].source).toContain("double every cell");
  });

  it("allows only one in-flight edit at a time", async () => {
    const service = buildMockService();
    let release!: () => void;
    const gate = new Promise<void>((resolve) => (release = resolve));
    const slowFetch = async (url: string, init?: RequestInit) => {
      if (url.endsWith("/edit")) await gate;
      return service.fetchImpl(url, init);
    };
    const panel = new EditPanel(host(), new SessionApi("", slowFetch),
                                createPanelState());
    panel.refresh(baseSnapshot());
    panel.draft.value = "first";
    const pending = panel.submit();
    panel.draft.value = "second";
    await panel.submit(); // dropped: a mutation is already in flight
    release();
    await pending;
    expect(service.log.filter((c) => c.path.endsWith("/edit")).length).toBe(1);
  });
});

describe("ResynthPanel", () => {
  it("collects constraints and renders the candidate matrix", async () => {
    const service = buildMockService();
    const panel = new ResynthPanel(host(), new SessionApi("", service.fetchImpl),
                                   createPanelState());
    panel.refresh(baseSnapshot());

    panel.inputEditor.generate("[[1, 1], [1, 1]]");
    panel.expectedEditor.generate("[[2, 2], [2, 2]]");
    await panel.addConstraint();
    expect(panel.status.textContent).toContain("1 constraint(s)");
    const constraintCall = service.log.find((c) => c.path.endsWith("/constraints"))!;
    expect(constraintCall.body).toEqual({
      hole_id: "_hole0",
      input: [[[1, 1], [1, 1]]],
      expected_output: [[2, 2], [2, 2]],
    });

    await panel.run();
    const rows = panel.matrix.querySelectorAll("tr");
    expect(rows.length).toBe(5); // evaluation stopped at the passer
    const winner = panel.matrix.querySelector('tr[data-candidate="4"]')!;
    expect(winner.classList.contains("selected")).toBe(true);
    expect(winner.querySelectorAll(".status-pass").length).toBe(1);
    expect(panel.status.textContent).toContain("candidate 4 selected");
  });
});

describe("workbench integration", () => {
  it("drives create/trace/edit/resynthesize against only documented endpoints",
     async () => {
    const service = buildMockService();
    const bench = mountWorkbench(host(), "", service.fetchImpl);
    await bench.open("t1", ANPL_SOURCE);
    await bench.trace.run([[1, 2], [3, 4]]);
    bench.edit.draft.value = "triple every cell";
    await bench.edit.submit();
    bench.resynth.inputEditor.generate("[[1]]");
    bench.resynth.expectedEditor.generate("[[2]]");
    await bench.resynth.addConstraint();
    await bench.resynth.run();

    expect(service.log.length).toBeGreaterThanOrEqual(5);
    for (const call of service.log) {
      const key = `${call.method} ${call.path}`;
      expect(DOCUMENTED.some((pattern) => pattern.test(key)), key).toBe(true);
    }
  });
});

describe("panel state", () => {
  it("guards the grid buffer invariant", () => {
    const state = createPanelState();
    setGridBuffer(state, [[1, 2]]);
    expect(state.gridBuffer).toEqual([[1, 2]]);
    expect(() => setGridBuffer(state, [[42]])).toThrow();
  });
});
