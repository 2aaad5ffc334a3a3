"""HTTP face of the session service, consumed by the workbench.

Sessions are held in memory; each one is single-writer: concurrent
mutating requests to the same session yield 409 for the loser.
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from . import arc
from .edits import op_from_json
from .errors import (AnplError, AnplSyntaxError, ExecutionTimeout,
                     ExhaustedAttempts, HarnessUnavailable, NoCandidatePasses,
                     RuntimeFault, ScriptMiss, SketchInvalid, UnknownHole)
from .gateway import LlmGateway
from .harness import Harness
from .resynth import IoConstraint
from .session import Session
from .session import export_log as export_session_log
from .values import decode_value


class CreateSessionBody(BaseModel):
    anpl: str
    task_id: str | None = None
    task: dict | None = None


class EditBody(BaseModel):
    op: dict


class TraceBody(BaseModel):
    functions: list[str]
    input: Any


class ConstraintBody(BaseModel):
    hole_id: str
    input: list
    expected_output: Any


class ResynthesizeBody(BaseModel):
    hole_id: str


def _diagnostics_payload(exc: Exception) -> dict:
    if isinstance(exc, SketchInvalid):
        return {"diagnostics": [d.to_json() for d in exc.diagnostics]}
    if isinstance(exc, AnplSyntaxError):
        return {"diagnostics": [{"severity": "error", "message": exc.message,
                                 "line": exc.line, "col": exc.col}]}
    return {"diagnostics": [{"severity": "error", "message": str(exc),
                             "line": 0, "col": 0}]}


def create_app(gateway: LlmGateway, harness: Harness | None = None,
               tasks: dict[str, arc.ArcTask] | None = None,
               clock=None) -> FastAPI:
    app = FastAPI(title="anpl-session-service")
    sessions: dict[str, Session] = {}
    tasks = dict(tasks or {})
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def run_mutation(session: Session, fn):
        """Single-writer rule: busy sessions answer 409."""
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409,
                                detail="session is being modified")
        try:
            return fn()
        except (SketchInvalid, AnplSyntaxError, UnknownHole, ValueError) as exc:
            raise HTTPException(status_code=400,
                                detail=_diagnostics_payload(exc)) from exc
        except ScriptMiss as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except HarnessUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        finally:
            session.lock.release()

    @app.get("/tasks/{task_id}")
    def get_task(task_id: str):
        task = tasks.get(task_id)
        if task is None:
            raise HTTPException(status_code=404, detail="unknown task")
        return task.to_json()

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        if body.task is not None:
            try:
                task = arc.load_task(body.task, task_id=body.task_id)
            except AnplError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        elif body.task_id is not None and body.task_id in tasks:
            task = tasks[body.task_id]
        else:
            raise HTTPException(status_code=400,
                                detail="task or known task_id required")
        session = Session(task=task, gateway=gateway, harness=harness,
                          clock=clock)

        def boot():
            try:
                session.bootstrap(body.anpl)
            except ExhaustedAttempts:
                pass  # logged inside; session survives without a compile
            return session.snapshot()

        snapshot = run_mutation(session, boot)
        with registry_lock:
            sessions[session.session_id] = session
        return snapshot

    @app.get("/sessions/{session_id}")
    def get_snapshot(session_id: str):
        return get_session(session_id).snapshot()

    @app.post("/sessions/{session_id}/edit")
    def edit(session_id: str, body: EditBody):
        session = get_session(session_id)

        def go():
            try:
                delta = session.apply_edit(op_from_json(body.op))
            except ExhaustedAttempts as exc:
                return {"ok": False, "error": "exhausted_attempts",
                        "hole_id": exc.hole_id,
                        "snapshot": session.snapshot()}
            return {"ok": True, "delta": delta.to_json(),
                    "snapshot": session.snapshot()}

        return run_mutation(session, go)

    @app.post("/sessions/{session_id}/trace")
    def trace(session_id: str, body: TraceBody):
        session = get_session(session_id)

        def go():
            try:
                report = session.trace(body.functions,
                                       decode_value(body.input))
            except RuntimeFault as exc:
                return {"status": "fault", "traceback": exc.traceback_text}
            except ExecutionTimeout:
                return {"status": "timeout"}
            return report.to_json()

        return run_mutation(session, go)

    @app.post("/sessions/{session_id}/constraints")
    def add_constraint(session_id: str, body: ConstraintBody):
        session = get_session(session_id)

        def go():
            constraint = IoConstraint.from_json(body.model_dump())
            count = session.add_constraint(constraint)
            return {"hole_id": body.hole_id, "count": count}

        return run_mutation(session, go)

    @app.post("/sessions/{session_id}/resynthesize")
    def resynthesize(session_id: str, body: ResynthesizeBody):
        session = get_session(session_id)

        def go():
            try:
                report = session.resynthesize(body.hole_id)
            except NoCandidatePasses as exc:
                return {"ok": False, "report": exc.report.to_json()}
            return {"ok": True, "report": report.to_json(),
                    "snapshot": session.snapshot()}

        return run_mutation(session, go)

    @app.post("/sessions/{session_id}/check")
    def check(session_id: str):
        session = get_session(session_id)
        return run_mutation(session, lambda: session.check().to_json())

    @app.get("/sessions/{session_id}/log.csv")
    def log_csv(session_id: str):
        session = get_session(session_id)
        return Response(content=export_session_log(session),
                        media_type="text/csv")

    return app


def serve(app: FastAPI, port: int, host: str = "127.0.0.1") -> None:
    import uvicorn
    uvicorn.run(app, host=host, port=port, log_level="warning")
