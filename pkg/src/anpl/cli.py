"""Command-line entry points.

All verbs print machine-readable JSON on stdout and a short human summary
on stderr. Session state persists in a directory (--session) holding the
DARC-format log plus a snapshot for fast reload.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import arc, service
from .compiler import PartialCompile, assemble
from .edits import op_from_json
from .errors import AnplError
from .gateway import (GatewayConfig, HttpGateway, RecordingGateway,
                      ReplayGateway)
from .harness import default_harness
from .resynth import IoConstraint
from .session import Session, _parse_log, export_log, replay as replay_log
from .sketch import parse
from .values import decode_value

STATE_FILE = "session.json"
LOG_FILE = "log.csv"


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, ensure_ascii=False, sort_keys=True))


def _summary(text: str) -> None:
    click.echo(text, err=True)


def _build_gateway(replay_path: str | None, record_path: str | None):
    if replay_path:
        gateway = ReplayGateway.from_jsonl(replay_path)
    else:
        config = GatewayConfig.from_env()
        if not config.endpoint:
            raise click.UsageError(
                "no gateway: set ANPL_LLM_ENDPOINT/ANPL_LLM_MODEL or pass "
                "--replay-log")
        gateway = HttpGateway(config)
    if record_path:
        gateway = RecordingGateway(gateway, record_path)
    return gateway


def _save_session(session: Session, state_dir: Path) -> None:
    state_dir.mkdir(parents=True, exist_ok=True)
    compiled = session.current_compiled
    state = {
        "task_id": session.task.task_id,
        "task": session.task.to_json(),
        "anpl_source": session.current_anpl.source if session.current_anpl else "",
        "compiled": None if compiled is None else {
            "fill_map": compiled.fill_map,
            "fill_sections": compiled.fill_sections,
            "fill_nodes": {k: list(v) for k, v in compiled.fill_nodes.items()},
            "fill_order": list(compiled.fill_order),
            "retained": [list(r) for r in compiled.retained],
            "target_source": compiled.target_source,
        },
        "constraints": session.constraints.to_json(),
    }
    (state_dir / STATE_FILE).write_text(
        json.dumps(state, ensure_ascii=False, sort_keys=True, indent=2),
        encoding="utf-8")
    (state_dir / LOG_FILE).write_bytes(export_log(session))


def _load_session(state_dir: Path, gateway, harness) -> Session:
    state = json.loads((state_dir / STATE_FILE).read_text(encoding="utf-8"))
    task = arc.load_task(state["task"], task_id=state["task_id"])
    session = Session(task=task, gateway=gateway, harness=harness)
    session.current_anpl = parse(state["anpl_source"])
    if state["compiled"] is not None:
        data = state["compiled"]
        partial = PartialCompile(
            anpl=session.current_anpl, fill_map=dict(data["fill_map"]),
            fill_sections=dict(data["fill_sections"]),
            fill_nodes={k: tuple(v) for k, v in data["fill_nodes"].items()},
            order=list(data["fill_order"]))
        compiled = assemble(partial,
                            retained=tuple((a, b) for a, b in data["retained"]))
        session.current_compiled = compiled
    for hole_id, items in state["constraints"].items():
        for item in items:
            session.constraints.add(session.current_anpl.holes,
                                    IoConstraint.from_json(item))
    log_path = state_dir / LOG_FILE
    if log_path.exists():
        session.log.extend(_parse_log(log_path.read_bytes()))
    return session


@click.group()
def main() -> None:
    """Sketch-programming compiler and interactive session tools."""


@main.command("compile")
@click.argument("anpl_file", type=click.Path(exists=True, path_type=Path))
@click.option("--task", "task_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--session", "state_dir", type=click.Path(path_type=Path),
              default=Path("anpl-session"))
@click.option("--replay-log", type=click.Path(exists=True), default=None,
              help="answer LLM requests from a recorded JSONL exchange log")
@click.option("--record", type=click.Path(), default=None,
              help="append LLM exchanges to this JSONL file")
def compile_cmd(anpl_file: Path, task_path: Path, state_dir: Path,
                replay_log: str | None, record: str | None) -> None:
    """Compile an .anpl file against a task and start a session."""
    gateway = _build_gateway(replay_log, record)
    task = arc.load_task(task_path)
    session = Session(task=task, gateway=gateway, harness=default_harness())
    try:
        session.bootstrap(anpl_file.read_text(encoding="utf-8"))
    except AnplError as exc:
        _summary(f"compile failed: {exc}")
        _echo_json({"ok": False, "error": str(exc)})
        sys.exit(1)
    _save_session(session, state_dir)
    compiled = session.current_compiled
    if compiled is None:
        _summary("compile exhausted its attempts; session saved for editing")
        _echo_json({"ok": False, "error": "exhausted_attempts"})
        sys.exit(1)
    _summary(f"compiled {len(compiled.fill_map)} holes -> {state_dir}")
    _echo_json({"ok": True, **compiled.to_json()})


@main.command("trace")
@click.argument("functions", nargs=-1, required=True)
@click.option("--input", "input_json", required=True)
@click.option("--session", "state_dir", type=click.Path(exists=True, path_type=Path),
              default=Path("anpl-session"))
@click.option("--replay-log", type=click.Path(exists=True), default=None)
def trace_cmd(functions, input_json: str, state_dir: Path,
              replay_log: str | None) -> None:
    """Run main and record IO snapshots of the selected functions."""
    session = _load_session(state_dir, _optional_gateway(replay_log),
                            default_harness())
    try:
        report = session.trace(list(functions),
                               decode_value(json.loads(input_json)))
    except AnplError as exc:
        _summary(f"trace failed: {exc}")
        _echo_json({"status": "error", "error": str(exc)})
        sys.exit(1)
    _save_session(session, state_dir)
    _summary(f"trace ok: {len(report.events)} events")
    _echo_json(report.to_json())


def _optional_gateway(replay_path: str | None):
    try:
        return _build_gateway(replay_path, None)
    except click.UsageError:
        class _NoGateway:
            def complete(self, req):
                raise AnplError("no gateway configured")
        return _NoGateway()


@main.command("edit")
@click.option("--op", "op_json", required=True,
              help='edit operation JSON, e.g. {"kind": "edit_description", ...}')
@click.option("--session", "state_dir", type=click.Path(exists=True, path_type=Path),
              default=Path("anpl-session"))
@click.option("--replay-log", type=click.Path(exists=True), default=None)
@click.option("--record", type=click.Path(), default=None)
def edit_cmd(op_json: str, state_dir: Path, replay_log: str | None,
             record: str | None) -> None:
    """Apply one edit operation and recompile differentially."""
    gateway = _build_gateway(replay_log, record)
    session = _load_session(state_dir, gateway, default_harness())
    try:
        delta = session.apply_edit(op_from_json(json.loads(op_json)))
    except AnplError as exc:
        _save_session(session, state_dir)
        _summary(f"edit failed: {exc}")
        _echo_json({"ok": False, "error": str(exc)})
        sys.exit(1)
    _save_session(session, state_dir)
    _summary(f"edit applied: {delta.to_json()}")
    _echo_json({"ok": True, "delta": delta.to_json(),
                **session.current_compiled.to_json()})


@main.command("resynth")
@click.argument("hole_id")
@click.option("--session", "state_dir", type=click.Path(exists=True, path_type=Path),
              default=Path("anpl-session"))
@click.option("--replay-log", type=click.Path(exists=True), default=None)
@click.option("--record", type=click.Path(), default=None)
@click.option("--constraint", "constraints", multiple=True,
              help='extra constraint JSON {"input": [...], "expected_output": ...}')
def resynth_cmd(hole_id: str, state_dir: Path, replay_log: str | None,
                record: str | None, constraints) -> None:
    """Regenerate one hole as a candidate batch filtered by IO constraints."""
    gateway = _build_gateway(replay_log, record)
    session = _load_session(state_dir, gateway, default_harness())
    try:
        for text in constraints:
            data = dict(json.loads(text), hole_id=hole_id)
            session.add_constraint(IoConstraint.from_json(data))
        report = session.resynthesize(hole_id)
    except AnplError as exc:
        _save_session(session, state_dir)
        _summary(f"resynthesis failed: {exc}")
        _echo_json({"ok": False, "error": str(exc)})
        sys.exit(1)
    _save_session(session, state_dir)
    _summary(f"resynthesis selected candidate {report.selected}")
    _echo_json({"ok": True, "report": report.to_json()})


@main.command("check")
@click.option("--session", "state_dir", type=click.Path(exists=True, path_type=Path),
              default=Path("anpl-session"))
def check_cmd(state_dir: Path) -> None:
    """Check the compiled program against the task's train/test pairs."""
    session = _load_session(state_dir, _optional_gateway(None),
                            default_harness())
    try:
        verdict = session.check()
    except AnplError as exc:
        _summary(f"check failed: {exc}")
        _echo_json({"ok": False, "error": str(exc)})
        sys.exit(1)
    _save_session(session, state_dir)
    _summary(f"train={'pass' if verdict.train_pass else 'fail'} "
             f"test={'pass' if verdict.test_pass else 'fail'}")
    _echo_json(verdict.to_json())


@main.command("replay")
@click.argument("log_file", type=click.Path(exists=True, path_type=Path))
@click.option("--session", "state_dir", type=click.Path(path_type=Path),
              default=None, help="save the replayed session here")
def replay_cmd(log_file: Path, state_dir: Path | None) -> None:
    """Deterministically re-execute a session from its exported log."""
    session = replay_log(log_file.read_bytes(), harness=default_harness())
    if state_dir is not None:
        _save_session(session, state_dir)
    compiled = session.current_compiled
    _summary(f"replayed {len(session.log)} log entries")
    _echo_json({"ok": True,
                "target_source": compiled.target_source if compiled else None,
                "log_length": len(session.log)})


@main.command("serve")
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--tasks", "tasks_dir", type=click.Path(path_type=Path),
              default=None, help="directory of ARC task JSON files")
@click.option("--replay-log", type=click.Path(exists=True), default=None)
def serve_cmd(port: int, host: str, tasks_dir: Path | None,
              replay_log: str | None) -> None:
    """Serve the session HTTP API for the workbench."""
    gateway = _build_gateway(replay_log, None)
    tasks = {}
    if tasks_dir is not None:
        for path in sorted(tasks_dir.glob("*.json")):
            tasks[path.stem] = arc.load_task(path)
    app = service.create_app(gateway=gateway, harness=default_harness(),
                             tasks=tasks)
    _summary(f"serving on {host}:{port} with {len(tasks)} tasks")
    service.serve(app, port=port, host=host)


if __name__ == "__main__":
    main()
