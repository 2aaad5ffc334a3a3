"""ARC task loading and compiled-program checking.

Tasks are color grids (cells 0-9, up to 30x30) with train and held-out
test pairs; a program passes a pair when main maps the input grid to an
exactly equal output grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import CellRange, DimRange, HarnessUnavailable, SchemaError
from .harness import DEFAULT_TIMEOUT_MS, ExecRequest, Harness
from .values import encode_value

MAX_DIM = 30
N_COLORS = 10


@dataclass(frozen=True)
class Grid:
    cells: tuple[tuple[int, ...], ...]

    @property
    def height(self) -> int:
        return len(self.cells)

    @property
    def width(self) -> int:
        return len(self.cells[0])

    @classmethod
    def from_lists(cls, data) -> "Grid":
        if not isinstance(data, list) or not data or \
                not all(isinstance(row, list) for row in data):
            raise SchemaError("grid must be a non-empty list of rows")
        height = len(data)
        width = len(data[0])
        if any(len(row) != width for row in data):
            raise SchemaError("grid rows have unequal lengths")
        if not (1 <= height <= MAX_DIM and 1 <= width <= MAX_DIM):
            raise DimRange(height, width)
        for r, row in enumerate(data):
            for c, cell in enumerate(row):
                if not isinstance(cell, int) or isinstance(cell, bool):
                    raise SchemaError(f"cell at ({r}, {c}) is not an integer")
                if not 0 <= cell < N_COLORS:
                    raise CellRange(cell, r, c)
        return cls(cells=tuple(tuple(row) for row in data))

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.cells]


@dataclass(frozen=True)
class ArcTask:
    task_id: str
    train: tuple[tuple[Grid, Grid], ...]
    test: tuple[tuple[Grid, Grid], ...]

    def to_json(self) -> dict:
        def pairs(items):
            return [{"input": a.to_lists(), "output": b.to_lists()}
                    for a, b in items]
        return {"train": pairs(self.train), "test": pairs(self.test)}


def _load_pairs(items, where: str) -> tuple[tuple[Grid, Grid], ...]:
    if not isinstance(items, list) or not items:
        raise SchemaError(f"{where} must be a non-empty list of pairs")
    out = []
    for i, item in enumerate(items):
        if not isinstance(item, dict) or "input" not in item or "output" not in item:
            raise SchemaError(f"{where}[{i}] must have input and output grids")
        out.append((Grid.from_lists(item["input"]),
                    Grid.from_lists(item["output"])))
    return tuple(out)


def load_task(source, task_id: str | None = None) -> ArcTask:
    """Load a task from a path, raw bytes/str JSON, or an already-parsed dict."""
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        path = Path(source)
        data = json.loads(path.read_text(encoding="utf-8"))
        task_id = task_id or path.stem
    elif isinstance(source, (bytes, str)):
        data = json.loads(source)
    elif isinstance(source, dict):
        data = source
    else:
        raise SchemaError(f"cannot load a task from {type(source).__name__}")
    if not isinstance(data, dict):
        raise SchemaError("task JSON must be an object")
    return ArcTask(task_id=task_id or "task",
                   train=_load_pairs(data.get("train"), "train"),
                   test=_load_pairs(data.get("test"), "test"))


def grids_equal(a, b) -> bool:
    """Exact shape-and-cells equality over nested lists or Grids."""
    if isinstance(a, Grid):
        a = a.to_lists()
    if isinstance(b, Grid):
        b = b.to_lists()
    return a == b


@dataclass(frozen=True)
class PairResult:
    kind: str  # "train" | "test"
    index: int
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "index": self.index,
                "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class Verdict:
    train_pass: bool
    test_pass: bool
    pairs: tuple[PairResult, ...]

    def to_json(self) -> dict:
        return {"train_pass": self.train_pass, "test_pass": self.test_pass,
                "pairs": [p.to_json() for p in self.pairs]}


def _first_mismatch(got, want) -> str:
    if not isinstance(got, list) or not got or \
            not all(isinstance(row, list) for row in got):
        return f"output is not a grid: {type(got).__name__}"
    gh, gw = len(got), len(got[0])
    wh, ww = len(want), len(want[0])
    if (gh, gw) != (wh, ww):
        return f"shape mismatch: got {gh}x{gw}, want {wh}x{ww}"
    for r in range(wh):
        for c in range(ww):
            if got[r][c] != want[r][c]:
                return f"cell mismatch at ({r}, {c}): got {got[r][c]}, want {want[r][c]}"
    return "grids differ"


def check(program, task: ArcTask, harness: Harness,
          timeout_ms: int = DEFAULT_TIMEOUT_MS) -> Verdict:
    """Run main on every pair; exact grid equality decides each pair."""
    if harness is None:
        raise HarnessUnavailable("no execution harness configured")
    results: list[PairResult] = []
    for kind, pairs in (("train", task.train), ("test", task.test)):
        for i, (inp, want) in enumerate(pairs):
            req = ExecRequest(source=program.target_source, entry="main",
                              args=(encode_value(inp.to_lists()),),
                              timeout_ms=timeout_ms)
            result = harness.run(req)
            if result.status == "timeout":
                results.append(PairResult(kind, i, False, "Timeout"))
            elif result.status == "fault":
                first = result.traceback_text.strip().splitlines()
                results.append(PairResult(kind, i, False,
                                          f"fault: {first[-1] if first else 'unknown'}"))
            else:
                want_lists = want.to_lists()
                if grids_equal(result.output, want_lists):
                    results.append(PairResult(kind, i, True))
                else:
                    results.append(PairResult(
                        kind, i, False, _first_mismatch(result.output, want_lists)))
    train_pass = all(r.passed for r in results if r.kind == "train")
    test_pass = all(r.passed for r in results if r.kind == "test")
    return Verdict(train_pass=train_pass, test_pass=test_pass,
                   pairs=tuple(results))
