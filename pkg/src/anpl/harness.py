"""Client side of the execution-harness protocol.

Generated code runs in a separate single-use process that speaks
newline-delimited JSON on stdio: one request in, one result out. The
parent enforces the wall-clock timeout by killing the child. For unit
runs without the harness program, TranscriptHarness replays recorded
request/result pairs.
"""

from __future__ import annotations

import hashlib
import json
import os
import shlex
import subprocess
import sys
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .errors import HarnessUnavailable, ScriptMiss

DEFAULT_TIMEOUT_MS = 10_000
_KILL_GRACE_S = 0.5


@dataclass(frozen=True)
class TraceEvent:
    function: str
    invocation_index: int
    args: tuple
    returned: object = None

    def to_json(self) -> dict:
        return {"function": self.function,
                "invocation_index": self.invocation_index,
                "args": list(self.args), "returned": self.returned}

    @classmethod
    def from_json(cls, data: dict) -> "TraceEvent":
        return cls(function=data["function"],
                   invocation_index=data["invocation_index"],
                   args=tuple(data["args"]), returned=data.get("returned"))


@dataclass(frozen=True)
class ExecRequest:
    source: str
    entry: str
    args: tuple = ()
    watch: tuple[str, ...] = ()
    timeout_ms: int = DEFAULT_TIMEOUT_MS

    def to_json(self) -> dict:
        return {"source": self.source, "entry": self.entry,
                "args": list(self.args), "watch": list(self.watch),
                "timeout_ms": self.timeout_ms}

    def fingerprint(self) -> str:
        body = dict(self.to_json())
        body["source"] = body["source"].replace("\r\n", "\n")
        payload = json.dumps(body, sort_keys=True, separators=(",", ":"),
                             ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ExecResult:
    status: str  # "ok" | "fault" | "timeout"
    output: object = None
    traceback_text: str = ""
    events: tuple[TraceEvent, ...] = ()
    stdout: str = ""

    def to_json(self) -> dict:
        return {"status": self.status, "output": self.output,
                "traceback": self.traceback_text,
                "events": [e.to_json() for e in self.events],
                "stdout": self.stdout}

    @classmethod
    def from_json(cls, data: dict) -> "ExecResult":
        return cls(status=data["status"], output=data.get("output"),
                   traceback_text=data.get("traceback", ""),
                   events=tuple(TraceEvent.from_json(e)
                                for e in data.get("events", [])),
                   stdout=data.get("stdout", ""))


class Harness(Protocol):
    def run(self, req: ExecRequest) -> ExecResult: ...


class SubprocessHarness:
    """One process per request; no state crosses runs."""

    def __init__(self, cmd: list[str]):
        if not cmd:
            raise HarnessUnavailable("empty harness command")
        self._cmd = list(cmd)

    def run(self, req: ExecRequest) -> ExecResult:
        try:
            proc = subprocess.Popen(self._cmd, stdin=subprocess.PIPE,
                                    stdout=subprocess.PIPE,
                                    stderr=subprocess.PIPE, text=True)
        except OSError as exc:
            raise HarnessUnavailable(f"cannot start harness: {exc}") from exc
        try:
            out, err = proc.communicate(json.dumps(req.to_json()) + "\n",
                                        timeout=req.timeout_ms / 1000 + _KILL_GRACE_S)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            return ExecResult(status="timeout")
        line = out.strip().splitlines()
        if not line:
            return ExecResult(status="fault",
                              traceback_text=f"harness produced no response; "
                                             f"stderr: {err.strip()}")
        try:
            return ExecResult.from_json(json.loads(line[-1]))
        except (json.JSONDecodeError, KeyError) as exc:
            return ExecResult(status="fault",
                              traceback_text=f"bad harness response: {exc}")


class TranscriptHarness:
    """Replays recorded request/result pairs, keyed by request fingerprint."""

    def __init__(self, entries: dict[str, dict]):
        self._entries = dict(entries)
        self.calls: list[ExecRequest] = []

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "TranscriptHarness":
        entries: dict[str, dict] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                record = json.loads(line)
                entries[record["fingerprint"]] = record["result"]
        return cls(entries)

    def run(self, req: ExecRequest) -> ExecResult:
        self.calls.append(req)
        fp = req.fingerprint()
        if fp not in self._entries:
            raise ScriptMiss(fp)
        return ExecResult.from_json(self._entries[fp])


class RecordingHarness:
    """Wraps a harness and writes every exchange to a JSON-lines file."""

    def __init__(self, inner: Harness, path: str | Path):
        self._inner = inner
        self._path = Path(path)
        self._lock = threading.Lock()

    def run(self, req: ExecRequest) -> ExecResult:
        result = self._inner.run(req)
        record = {"fingerprint": req.fingerprint(), "request": req.to_json(),
                  "result": result.to_json()}
        with self._lock:
            with self._path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        return result


def default_harness(env=os.environ) -> Harness | None:
    """Harness from ANPL_HARNESS_CMD, or the runner package if installed."""
    cmd = env.get("ANPL_HARNESS_CMD")
    if cmd:
        return SubprocessHarness(shlex.split(cmd))
    try:
        import anpl_harness  # noqa: F401
    except ImportError:
        return None
    return SubprocessHarness([sys.executable, "-m", "anpl_harness"])
