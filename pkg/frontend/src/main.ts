import { FetchLike, SessionApi } from "./api.js";
import { EditPanel } from "./panels/edit.js";
import { ResynthPanel } from "./panels/resynth.js";
import { TracePanel } from "./panels/trace.js";
import { createPanelState } from "./state.js";

/** Mount the whole workbench into a host element. */
export function mountWorkbench(
  host: HTMLElement,
  apiBase = "",
  fetchImpl?: FetchLike,
): {
  trace: TracePanel;
  edit: EditPanel;
  resynth: ResynthPanel;
  open(taskId: string, anpl: string): Promise<void>;
} {
  const api = fetchImpl
    ? new SessionApi(apiBase, fetchImpl)
    : new SessionApi(apiBase);
  const state = createPanelState();

  const traceHost = section(host, "trace");
  const editHost = section(host, "edit");
  const resynthHost = section(host, "resynth");

  const trace = new TracePanel(traceHost, api, state);
  const edit = new EditPanel(editHost, api, state);
  const resynth = new ResynthPanel(resynthHost, api, state);

  async function open(taskId: string, anpl: string): Promise<void> {
    const snapshot = await api.createSession({ task_id: taskId, anpl });
    trace.refresh(snapshot);
    edit.refresh(snapshot);
    resynth.refresh(snapshot);
  }

  return { trace, edit, resynth, open };
}

function section(host: HTMLElement, name: string): HTMLElement {
  const element = document.createElement("section");
  element.className = `panel panel-${name}`;
  host.appendChild(element);
  return element;
}
