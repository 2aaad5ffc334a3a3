"""Interactive sessions: ordered edits over one task, logged for replay.

Every interaction lands in an append-only log with the columns
role,action,content,timestamp. The content field is JSON and contains
everything needed to re-execute the session: the initial source and task,
each edit operation, and every LLM exchange. Replaying a log against the
recorded exchanges reproduces the final compiled bytes exactly;
timestamps are the only field excluded from replay equality.
"""

from __future__ import annotations

import csv
import io
import json
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone

from . import arc
from .compiler import CompiledProgram, compile_program
from .diffcompile import EditDelta, compile_diff, diff
from .edits import EditOp, apply_edit_op, op_from_json, op_to_json
from .errors import (CsvSchema, ExecutionTimeout, ExhaustedAttempts,
                     HarnessUnavailable, NoCandidatePasses, RuntimeFault,
                     SketchInvalid)
from .gateway import (ChatRequest, ChatResponse, ExchangeRecord,
                      LlmGateway, ReplayGateway)
from .harness import DEFAULT_TIMEOUT_MS, ExecRequest, Harness, TraceEvent
from .resynth import ConstraintStore, IoConstraint, resynthesize
from .sketch import AnplProgram, parse, validation_errors
from .values import decode_value, encode_value

ACTIONS = frozenset({"parse", "compile", "compile_diff", "trace", "edit",
                     "resynthesize", "add_constraint", "check", "llm_exchange"})
ROLES = frozenset({"user", "system", "llm"})
CSV_HEADER = ["role", "action", "content", "timestamp"]


def default_clock() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class LogEntry:
    role: str
    action: str
    content: dict
    timestamp: str

    def replay_key(self) -> tuple:
        return (self.role, self.action,
                json.dumps(self.content, sort_keys=True))


class SessionLog:
    """Append-only; rows map 1:1 onto the CSV columns."""

    def __init__(self):
        self._entries: list[LogEntry] = []

    def append(self, role: str, action: str, content: dict, timestamp: str) -> None:
        assert role in ROLES and action in ACTIONS
        self._entries.append(LogEntry(role, action, content, timestamp))

    def extend(self, entries) -> None:
        self._entries.extend(entries)

    @property
    def entries(self) -> tuple[LogEntry, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)


@dataclass(frozen=True)
class TraceReport:
    output: object
    events: tuple[TraceEvent, ...]
    stdout: str = ""

    def to_json(self) -> dict:
        return {"status": "ok", "output": self.output,
                "events": [e.to_json() for e in self.events],
                "stdout": self.stdout}


class _LoggingGateway:
    """Mirrors every exchange into the session log (sans wall time)."""

    def __init__(self, inner: LlmGateway, session: "Session"):
        self._inner = inner
        self._session = session

    def complete(self, req: ChatRequest) -> ChatResponse:
        resp = self._inner.complete(req)
        self._session._log("llm", "llm_exchange", {
            "fingerprint": resp.request_fingerprint,
            "request": {"system_text": req.system_text,
                        "user_text": req.user_text,
                        "temperature": req.temperature,
                        "max_tokens": req.max_tokens,
                        "n_completions": req.n_completions},
            "completions": list(resp.completions),
        })
        return resp


class Session:
    """Single-writer interactive state over one task."""

    def __init__(self, task: arc.ArcTask, gateway: LlmGateway,
                 harness: Harness | None = None, clock=None,
                 session_id: str | None = None,
                 timeout_ms: int = DEFAULT_TIMEOUT_MS):
        self.session_id = session_id or uuid.uuid4().hex
        self.task = task
        self.gateway = gateway
        self.harness = harness
        self.clock = clock or default_clock
        self.timeout_ms = timeout_ms
        self.current_anpl: AnplProgram | None = None
        self.current_compiled: CompiledProgram | None = None
        self.constraints = ConstraintStore()
        self.log = SessionLog()
        self.lock = threading.Lock()

    # -- infrastructure --

    def _log(self, role: str, action: str, content: dict) -> None:
        self.log.append(role, action, content, self.clock().isoformat())

    def _llm(self) -> _LoggingGateway:
        return _LoggingGateway(self.gateway, self)

    def _require_compiled(self) -> CompiledProgram:
        if self.current_compiled is None:
            raise HarnessUnavailable("session has no compiled program yet")
        return self.current_compiled

    # -- lifecycle --

    def bootstrap(self, anpl_source: str) -> "Session":
        """Parse and compile the initial program. A failed compile leaves
        the session alive (log records the failure) so edits can fix it."""
        program = parse(anpl_source)
        errors = validation_errors(program)
        if errors:
            raise SketchInvalid(errors)
        self._log("user", "parse", {"source": anpl_source,
                                    "task_id": self.task.task_id,
                                    "task": self.task.to_json()})
        self.current_anpl = program
        try:
            compiled = compile_program(program, self._llm())
        except ExhaustedAttempts as exc:
            self._log("system", "compile",
                      {"error": "exhausted_attempts", "hole_id": exc.hole_id})
            return self
        self.current_compiled = compiled
        self._log("system", "compile", {
            "target_source": compiled.target_source,
            "fill_map": dict(compiled.fill_map),
            "fill_order": list(compiled.fill_order)})
        return self

    # -- operations --

    def apply_edit(self, op: EditOp) -> EditDelta:
        assert self.current_anpl is not None
        new_anpl = apply_edit_op(self.current_anpl, op)
        errors = validation_errors(new_anpl)
        if errors:
            raise SketchInvalid(errors)  # session untouched, nothing logged
        delta = diff(self.current_anpl, new_anpl)
        self._log("user", "edit", {"op": op_to_json(op)})
        try:
            if self.current_compiled is None:
                compiled = compile_program(new_anpl, self._llm())
            else:
                compiled = compile_diff(self.current_compiled, new_anpl,
                                        self._llm())
        except ExhaustedAttempts as exc:
            self._log("system", "compile_diff",
                      {"error": "exhausted_attempts", "hole_id": exc.hole_id,
                       "delta": delta.to_json()})
            raise
        self.current_anpl = new_anpl
        self.current_compiled = compiled
        self._remap_constraints(delta)
        self._log("system", "compile_diff", {
            "target_source": compiled.target_source,
            "fill_map": dict(compiled.fill_map),
            "delta": delta.to_json()})
        return delta

    def _remap_constraints(self, delta: EditDelta) -> None:
        # constraints follow their hole across label renumbering; a removed
        # hole's constraints die with it even if its old label was reissued
        old_to_new = {old: new for new, old in delta.matches.items()}
        store = ConstraintStore()
        assert self.current_anpl is not None
        holes = self.current_anpl.holes
        for hole_id, constraints in self.constraints.to_json().items():
            if hole_id in old_to_new:
                target = old_to_new[hole_id]
            elif hole_id in delta.removed_holes:
                continue
            else:
                target = hole_id
            if any(h.id == target for h in holes):
                for data in constraints:
                    data = dict(data, hole_id=target)
                    store.add(holes, IoConstraint.from_json(data))
        self.constraints = store

    def trace(self, function_names: list[str], input_value) -> TraceReport:
        compiled = self._require_compiled()
        if self.harness is None:
            raise HarnessUnavailable("no execution harness configured")
        self._log("user", "trace", {"functions": list(function_names),
                                    "input": encode_value(input_value)})
        req = ExecRequest(source=compiled.target_source, entry="main",
                          args=(encode_value(input_value),),
                          watch=tuple(function_names),
                          timeout_ms=self.timeout_ms)
        result = self.harness.run(req)
        if result.status == "timeout":
            self._log("system", "trace", {"status": "timeout"})
            raise ExecutionTimeout(f"trace exceeded {self.timeout_ms} ms")
        if result.status == "fault":
            self._log("system", "trace", {"status": "fault",
                                          "traceback": result.traceback_text})
            raise RuntimeFault(result.traceback_text)
        report = TraceReport(output=result.output, events=result.events,
                             stdout=result.stdout)
        self._log("system", "trace", report.to_json())
        return report

    def add_constraint(self, constraint: IoConstraint) -> int:
        assert self.current_anpl is not None
        self.constraints.add(self.current_anpl.holes, constraint)
        self._log("user", "add_constraint", constraint.to_json())
        return len(self.constraints.for_hole(constraint.hole_id))

    def resynthesize(self, hole_id: str):
        compiled = self._require_compiled()
        if self.harness is None:
            raise HarnessUnavailable("no execution harness configured")
        constraints = self.constraints.for_hole(hole_id)
        self._log("user", "resynthesize", {"hole_id": hole_id})
        try:
            new_compiled, report = resynthesize(
                compiled, hole_id, self._llm(), self.harness, constraints,
                timeout_ms=self.timeout_ms)
        except NoCandidatePasses as exc:
            self._log("system", "resynthesize",
                      {"error": "no_candidate_passes",
                       "report": exc.report.to_json()})
            raise
        self.current_compiled = new_compiled
        self._log("system", "resynthesize", {
            "report": report.to_json(),
            "target_source": new_compiled.target_source})
        return report

    def check(self) -> arc.Verdict:
        compiled = self._require_compiled()
        if self.harness is None:
            raise HarnessUnavailable("no execution harness configured")
        self._log("user", "check", {})
        verdict = arc.check(compiled, self.task, self.harness,
                            timeout_ms=self.timeout_ms)
        self._log("system", "check", verdict.to_json())
        return verdict

    # -- snapshots --

    def snapshot(self) -> dict:
        assert self.current_anpl is not None
        compiled = self.current_compiled
        return {
            "session_id": self.session_id,
            "task_id": self.task.task_id,
            "anpl_source": self.current_anpl.source,
            "holes": [{"id": h.id, "description": h.description,
                       "named": h.is_named} for h in self.current_anpl.holes],
            "compiled": compiled.to_json() if compiled else None,
            "constraints": self.constraints.to_json(),
            "log_length": len(self.log),
        }


# ---------------------------------------------------------------------------
# export / replay

def export_log(session: Session) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for entry in session.log.entries:
        writer.writerow([entry.role, entry.action,
                         json.dumps(entry.content, sort_keys=True,
                                    ensure_ascii=False),
                         entry.timestamp])
    return buffer.getvalue().encode("utf-8")


def _parse_log(csv_bytes: bytes) -> list[LogEntry]:
    text = csv_bytes.decode("utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise CsvSchema(f"expected header {','.join(CSV_HEADER)}", row=0)
    entries: list[LogEntry] = []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != 4:
            raise CsvSchema(f"expected 4 columns, found {len(row)}", row=i)
        role, action, content_text, timestamp = row
        if role not in ROLES:
            raise CsvSchema(f"unknown role: {role}", row=i)
        if action not in ACTIONS:
            raise CsvSchema(f"unknown action: {action}", row=i)
        try:
            content = json.loads(content_text)
        except json.JSONDecodeError as exc:
            raise CsvSchema(f"content is not JSON: {exc}", row=i) from None
        entries.append(LogEntry(role, action, content, timestamp))
    return entries


def replay(csv_bytes: bytes, gateway: LlmGateway | None = None,
           harness: Harness | None = None, clock=None) -> Session:
    """Re-execute a session log. Without an explicit gateway, the log's
    own recorded LLM exchanges answer every request."""
    entries = _parse_log(csv_bytes)
    if gateway is None:
        records = [ExchangeRecord(fingerprint=e.content["fingerprint"],
                                  request=ChatRequest(**e.content["request"]),
                                  completions=tuple(e.content["completions"]),
                                  wall_time=0.0)
                   for e in entries if e.action == "llm_exchange"]
        gateway = ReplayGateway(records)
    head = next((e for e in entries if e.action == "parse"), None)
    if head is None:
        raise CsvSchema("log has no parse action to start from")
    task = arc.load_task(head.content["task"],
                         task_id=head.content.get("task_id"))
    session = Session(task=task, gateway=gateway, harness=harness,
                      clock=clock)
    session.bootstrap(head.content["source"])
    for entry in entries:
        if entry.role != "user" or entry.action == "parse":
            continue
        try:
            if entry.action == "edit":
                session.apply_edit(op_from_json(entry.content["op"]))
            elif entry.action == "trace":
                session.trace(entry.content["functions"],
                              decode_value(entry.content["input"]))
            elif entry.action == "add_constraint":
                session.add_constraint(IoConstraint.from_json(entry.content))
            elif entry.action == "resynthesize":
                session.resynthesize(entry.content["hole_id"])
            elif entry.action == "check":
                session.check()
        except (ExhaustedAttempts, NoCandidatePasses, RuntimeFault,
                ExecutionTimeout):
            continue  # the failure itself was logged, as in the original run
    return session


def replay_equal(a: Session, b: Session) -> bool:
    """Log equality modulo timestamps."""
    ka = [e.replay_key() for e in a.log.entries]
    kb = [e.replay_key() for e in b.log.entries]
    return ka == kb
