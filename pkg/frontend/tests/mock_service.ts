// A canned session service behind a fetch-compatible function. Every
// request is appended to `log` so tests can assert the UI talks only to
// documented endpoints.

import type { CandidateReport, Snapshot } from "../src/api.js";

export const DOCUMENTED = [
  /^POST \/sessions$/,
  /^GET \/sessions\/[\w-]+$/,
  /^POST \/sessions\/[\w-]+\/edit$/,
  /^POST \/sessions\/[\w-]+\/trace$/,
  /^POST \/sessions\/[\w-]+\/constraints$/,
  /^POST \/sessions\/[\w-]+\/resynthesize$/,
  /^POST \/sessions\/[\w-]+\/check$/,
  /^GET \/sessions\/[\w-]+\/log\.csv$/,
  /^GET \/tasks\/[\w-]+$/,
];

export const ANPL_SOURCE =
  'def main(input):\n    out = "double every cell"(input)\n    return out\n';

export function baseSnapshot(): Snapshot {
  return {
    session_id: "s1",
    task_id: "t1",
    anpl_source: ANPL_SOURCE,
    holes: [{ id: "_hole0", description: "double every cell", named: false }],
    compiled: {
      target_source:
        "def main(input):\n    out = _hole0(input)\n    return out\n\n" +
        "# fill for _hole0\ndef _hole0(input):\n    return input * 2\n",
      fill_map: { _hole0: "_hole0" },
      fill_order: ["_hole0"],
      functions: ["main", "_hole0"],
    },
    constraints: {},
    log_length: 3,
  };
}

export interface MockCall {
  method: string;
  path: string;
  body: unknown;
}

export interface MockService {
  fetchImpl: (url: string, init?: RequestInit) => Promise<Response>;
  log: MockCall[];
  traceResult: Record<string, unknown>;
  editResult: Record<string, unknown> | { status: number; detail: unknown };
  resynthReport: CandidateReport;
  constraintCount: number;
}

export function buildMockService(): MockService {
  const service: MockService = {
    log: [],
    traceResult: {
      status: "ok",
      output: [[2, 4], [6, 8]],
      stdout: "",
      events: [
        {
          function: "_hole0",
          invocation_index: 0,
          args: [[[1, 2], [3, 4]]],
          returned: [[2, 4], [6, 8]],
        },
      ],
    },
    editResult: {
      ok: true,
      delta: { changed: ["_hole0"], new: [], removed: [] },
      snapshot: {
        ...baseSnapshot(),
        compiled: {
          ...baseSnapshot().compiled!,
          target_source:
            "def main(input):\n    out = _hole0(input)\n    return out\n\n" +
            "# fill for _hole0\ndef _hole0(input):\n    return input * 3\n",
        },
      },
    },
    resynthReport: {
      n_candidates: 10,
      selected: 4,
      results: [
        ...[0, 1, 2, 3].map((candidate) => ({
          candidate_index: candidate,
          constraint_index: 0,
          status: "fail" as const,
          detail: "wrong value",
        })),
        { candidate_index: 4, constraint_index: 0, status: "pass" as const, detail: "" },
      ],
    },
    constraintCount: 0,
    fetchImpl: async (url: string, init?: RequestInit) => {
      const method = init?.method ?? "GET";
      const path = url.replace(/^https?:\/\/[^/]+/, "");
      const body = init?.body ? JSON.parse(String(init.body)) : null;
      service.log.push({ method, path, body });

      const json = (payload: unknown, status = 200) =>
        new Response(JSON.stringify(payload), {
          status,
          headers: { "Content-Type": "application/json" },
        });

      if (method === "POST" && path === "/sessions") {
        return json(baseSnapshot());
      }
      if (method === "GET" && /^\/sessions\/[\w-]+$/.test(path)) {
        return json(baseSnapshot());
      }
      if (method === "POST" && path.endsWith("/trace")) {
        return json(service.traceResult);
      }
      if (method === "POST" && path.endsWith("/edit")) {
        const result = service.editResult as { status?: number; detail?: unknown };
        if (typeof result.status === "number") {
          return json({ detail: result.detail }, result.status);
        }
        return json(service.editResult);
      }
      if (method === "POST" && path.endsWith("/constraints")) {
        service.constraintCount += 1;
        return json({ hole_id: body.hole_id, count: service.constraintCount });
      }
      if (method === "POST" && path.endsWith("/resynthesize")) {
        return json({
          ok: service.resynthReport.selected !== null,
          report: service.resynthReport,
          snapshot: baseSnapshot(),
        });
      }
      if (method === "POST" && path.endsWith("/check")) {
        return json({ train_pass: true, test_pass: true, pairs: [] });
      }
      if (method === "GET" && path.endsWith("/log.csv")) {
        return new Response("role,action,content,timestamp\r\n", {
          status: 200,
          headers: { "Content-Type": "text/csv" },
        });
      }
      if (method === "GET" && /^\/tasks\/[\w-]+$/.test(path)) {
        return json({ train: [{ input: [[0]], output: [[0]] }],
                      test: [{ input: [[0]], output: [[0]] }] });
      }
      return json({ detail: "unknown endpoint" }, 404);
    },
  };
  return service;
}
