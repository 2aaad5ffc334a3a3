#!/usr/bin/env python3
"""Refresh the recorded execution transcript the test suite replays.

Runs the whole suite against the live runner package with recording on,
rewriting tests/fixtures/harness/cassette.jsonl. Rerun this whenever a
test changes what it executes (requests are matched by fingerprint).
"""

import os
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    try:
        import anpl_harness  # noqa: F401
    except ImportError:
        print("the runner package is not installed; run "
              "`pip install -e harness/ --no-build-isolation` first",
              file=sys.stderr)
        return 1
    env = dict(os.environ, ANPL_HARNESS_MODE="record")
    result = subprocess.run(
        [sys.executable, "-m", "pytest", str(ROOT / "tests"), "-q"], env=env)
    if result.returncode == 0:
        cassette = ROOT / "tests" / "fixtures" / "harness" / "cassette.jsonl"
        count = len(cassette.read_text().splitlines())
        print(f"recorded {count} exchanges into {cassette}")
    return result.returncode


if __name__ == "__main__":
    sys.exit(main())
