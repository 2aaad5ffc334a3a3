// Typed client for the session service. Every session mutation the UI
// performs goes through these methods and nothing else.

export interface Diagnostic {
  severity: string;
  message: string;
  line: number;
  col: number;
}

export interface HoleInfo {
  id: string;
  description: string;
  named: boolean;
}

export interface CompiledInfo {
  target_source: string;
  fill_map: Record<string, string>;
  fill_order: string[];
  functions: string[];
}

export interface Snapshot {
  session_id: string;
  task_id: string;
  anpl_source: string;
  holes: HoleInfo[];
  compiled: CompiledInfo | null;
  constraints: Record<string, unknown[]>;
  log_length: number;
}

export interface TraceEvent {
  function: string;
  invocation_index: number;
  args: unknown[];
  returned: unknown;
}

export interface TraceResult {
  status: "ok" | "fault" | "timeout";
  output?: unknown;
  events?: TraceEvent[];
  stdout?: string;
  traceback?: string;
}

export interface EditResult {
  ok: boolean;
  error?: string;
  delta?: { changed: string[]; new: string[]; removed: string[] };
  snapshot: Snapshot;
}

export interface CandidateRow {
  candidate_index: number;
  constraint_index: number;
  status: "pass" | "fail" | "error";
  detail: string;
}

export interface CandidateReport {
  n_candidates: number;
  selected: number | null;
  results: CandidateRow[];
}

export interface ResynthesizeResult {
  ok: boolean;
  report: CandidateReport;
  snapshot?: Snapshot;
}

export interface Verdict {
  train_pass: boolean;
  test_pass: boolean;
  pairs: Array<{ kind: string; index: number; passed: boolean; detail: string }>;
}

export type EditOp =
  | { kind: "edit_description"; hole_id: string; text: string }
  | { kind: "edit_sketch"; function: string; source: string }
  | { kind: "decompose"; hole_id: string; source: string }
  | { kind: "abstract"; function: string; start: number; end: number; description: string };

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public diagnostics: Diagnostic[] = [],
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class SessionApi {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let message = `${response.status}`;
      let diagnostics: Diagnostic[] = [];
      try {
        const body = await response.json();
        const detail = body.detail;
        if (typeof detail === "string") message = detail;
        else if (detail?.diagnostics) {
          diagnostics = detail.diagnostics;
          message = diagnostics.map((d) => d.message).join("; ");
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, message, diagnostics);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(body: {
    anpl: string;
    task_id?: string;
    task?: unknown;
  }): Promise<Snapshot> {
    return this.post("/sessions", body);
  }

  getSession(id: string): Promise<Snapshot> {
    return this.request(`/sessions/${id}`);
  }

  edit(id: string, op: EditOp): Promise<EditResult> {
    return this.post(`/sessions/${id}/edit`, { op });
  }

  trace(id: string, functions: string[], input: unknown): Promise<TraceResult> {
    return this.post(`/sessions/${id}/trace`, { functions, input });
  }

  addConstraint(
    id: string,
    holeId: string,
    input: unknown[],
    expectedOutput: unknown,
  ): Promise<{ hole_id: string; count: number }> {
    return this.post(`/sessions/${id}/constraints`, {
      hole_id: holeId,
      input,
      expected_output: expectedOutput,
    });
  }

  resynthesize(id: string, holeId: string): Promise<ResynthesizeResult> {
    return this.post(`/sessions/${id}/resynthesize`, { hole_id: holeId });
  }

  check(id: string): Promise<Verdict> {
    return this.post(`/sessions/${id}/check`, {});
  }

  async logCsv(id: string): Promise<string> {
    const response = await this.fetchImpl(`${this.base}/sessions/${id}/log.csv`);
    if (!response.ok) throw new ApiError(response.status, "cannot fetch log");
    return response.text();
  }

  getTask(id: string): Promise<unknown> {
    return this.request(`/tasks/${id}`);
  }
}
