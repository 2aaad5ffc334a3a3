"""Execute one request: load the module, wrap watched functions, call the
entry on private copies of the arguments, report JSON.

Wire values: grids are nested int lists (revived to numpy arrays on the
way in, flattened back on the way out), tuples are {"t": [...]}, anything
unencodable degrades to {"r": repr(...)}.
"""

from __future__ import annotations

import copy
import io
import json
import sys
import traceback
from contextlib import redirect_stdout

import numpy as np

# Matches the preamble the compiler puts on every generated module; applied
# here too so bare snippets run under the same bindings.
PREAMBLE = (
    "import numpy as np\n"
    "from typing import *\n"
    "(black, blue, red, green, yellow, grey, pink, orange, teal, maroon) = range(10)"
)


def encode_value(value):
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return encode_value(value.tolist())
    if isinstance(value, tuple):
        return {"t": [encode_value(v) for v in value]}
    if isinstance(value, list):
        return [encode_value(v) for v in value]
    return {"r": repr(value)}


def _is_grid(value) -> bool:
    if not isinstance(value, list) or not value:
        return False
    if not all(isinstance(row, list) and row for row in value):
        return False
    width = len(value[0])
    return all(len(row) == width and all(type(c) is int for c in row)
               for row in value)


def decode_value(value):
    """Wire value to Python value; rectangular int matrices become arrays."""
    if isinstance(value, dict) and set(value) == {"t"}:
        return tuple(decode_value(v) for v in value["t"])
    if isinstance(value, list):
        if _is_grid(value):
            return np.array(value, dtype=int)
        return [decode_value(v) for v in value]
    return value


def execute(request: dict) -> dict:
    source = request.get("source", "")
    entry = request.get("entry", "")
    args = [decode_value(a) for a in request.get("args", [])]
    watch = list(request.get("watch", []))

    events: list[dict] = []
    counter = {"next": 0}
    captured = io.StringIO()

    def wrap(name, fn):
        def wrapper(*call_args, **kwargs):
            index = counter["next"]
            counter["next"] += 1
            snapshot = [encode_value(copy.deepcopy(a)) for a in call_args]
            result = fn(*call_args, **kwargs)
            events.append({"function": name, "invocation_index": index,
                           "args": snapshot,
                           "returned": encode_value(copy.deepcopy(result))})
            return result
        wrapper.__name__ = name
        return wrapper

    env: dict = {}
    try:
        exec(PREAMBLE, env)
        exec(source, env)
        fn = env.get(entry)
        if not callable(fn):
            raise NameError(f"entry function {entry!r} is not defined")
        for name in watch:
            target = env.get(name)
            if callable(target):
                env[name] = wrap(name, target)
        if entry in watch and callable(env.get(entry)):
            fn = env[entry]
        with redirect_stdout(captured):
            output = fn(*args)
    except BaseException:
        events.sort(key=lambda e: e["invocation_index"])
        return {"status": "fault", "output": None,
                "traceback": traceback.format_exc(),
                "events": events, "stdout": captured.getvalue()}
    events.sort(key=lambda e: e["invocation_index"])
    return {"status": "ok", "output": encode_value(output), "traceback": "",
            "events": events, "stdout": captured.getvalue()}


def main() -> int:
    line = sys.stdin.readline()
    try:
        request = json.loads(line)
        if not isinstance(request, dict):
            raise ValueError("request must be a JSON object")
    except ValueError as exc:
        response = {"status": "fault", "output": None,
                    "traceback": f"protocol error: {exc}",
                    "events": [], "stdout": ""}
    else:
        response = execute(request)
    sys.stdout.write(json.dumps(response, ensure_ascii=False) + "\n")
    sys.stdout.flush()
    return 0
