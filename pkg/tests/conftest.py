"""Shared fixtures.

Harness-backed tests run against a recorded transcript by default, so the
suite passes without the runner package installed. Set ANPL_HARNESS_MODE
to "live" to execute for real, or "record" to refresh the transcript
(requires the runner package; scripts/record_harness_fixtures.py wraps
this).
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from anpl.arc import load_task
from anpl.compiler import compile_program
from anpl.gateway import RuleGateway, rule
from anpl.harness import RecordingHarness, SubprocessHarness, TranscriptHarness
from anpl.sketch import parse

from darc_example import DARC_ANPL, DARC_FILLS, DARC_TASK

FIXTURE_DIR = Path(__file__).parent / "fixtures"
CASSETTE = FIXTURE_DIR / "harness" / "cassette.jsonl"

IDENTITY_ANPL = "def main(input):\n    return input\n"

IDENTITY_TASK = {
    "train": [
        {"input": [[0, 1], [2, 3]], "output": [[0, 1], [2, 3]]},
        {"input": [[5]], "output": [[5]]},
    ],
    "test": [{"input": [[9, 9], [9, 9]], "output": [[9, 9], [9, 9]]}],
}


def _live_harness() -> SubprocessHarness:
    pytest.importorskip("anpl_harness",
                        reason="live harness mode needs the runner package")
    return SubprocessHarness([sys.executable, "-m", "anpl_harness"])


@pytest.fixture(scope="session")
def harness_mode() -> str:
    return os.environ.get("ANPL_HARNESS_MODE", "replay")


@pytest.fixture(scope="session")
def harness_backend(harness_mode):
    if harness_mode == "live":
        return _live_harness()
    if harness_mode == "record":
        CASSETTE.parent.mkdir(parents=True, exist_ok=True)
        CASSETTE.unlink(missing_ok=True)
        return RecordingHarness(_live_harness(), CASSETTE)
    if not CASSETTE.exists():
        pytest.skip("no recorded harness transcript; run "
                    "scripts/record_harness_fixtures.py")
    return TranscriptHarness.from_jsonl(CASSETTE)


@pytest.fixture()
def darc_gateway():
    return RuleGateway([rule(k, v) for k, v in DARC_FILLS.items()])


@pytest.fixture()
def darc_program():
    return parse(DARC_ANPL)


@pytest.fixture()
def darc_compiled(darc_program, darc_gateway):
    return compile_program(darc_program, darc_gateway)


@pytest.fixture()
def darc_task():
    return load_task(DARC_TASK, task_id="darc-example")


@pytest.fixture()
def identity_task():
    return load_task(IDENTITY_TASK, task_id="identity")


@pytest.fixture()
def identity_compiled():
    gateway = RuleGateway([])  # hole-free: no LLM traffic
    return compile_program(parse(IDENTITY_ANPL), gateway)


@pytest.fixture()
def fixed_clock():
    from datetime import datetime, timedelta, timezone
    state = {"now": datetime(2024, 1, 1, tzinfo=timezone.utc)}

    def clock():
        state["now"] += timedelta(seconds=1)
        return state["now"]

    return clock
