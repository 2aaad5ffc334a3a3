#!/usr/bin/env python3
"""Walk one full interactive session without any network access.

Compiles the five-hole worked example against scripted completions,
traces it, checks it against its task, exports the log, and replays the
log to show byte-identical reconstruction. Needs the runner package
(pip install -e harness/).
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from anpl.arc import load_task
from anpl.gateway import RuleGateway, rule
from anpl.harness import default_harness
from anpl.session import Session, export_log, replay, replay_equal

from darc_example import DARC_ANPL, DARC_FILLS, DARC_TASK, DARC_TRAIN_INPUT


def main() -> int:
    harness = default_harness()
    if harness is None:
        print("no execution harness available; install harness/ first",
              file=sys.stderr)
        return 1

    gateway = RuleGateway([rule(k, v) for k, v in DARC_FILLS.items()])
    task = load_task(DARC_TASK, task_id="demo")
    session = Session(task=task, gateway=gateway, harness=harness)
    session.bootstrap(DARC_ANPL)
    compiled = session.current_compiled
    print("== compiled ==")
    print(compiled.target_source)

    fills = list(compiled.fill_map.values())
    report = session.trace(fills, DARC_TRAIN_INPUT)
    print("== trace ==")
    for event in report.events:
        print(f"  {event.invocation_index}: {event.function} -> "
              f"{str(event.returned)[:70]}")

    verdict = session.check()
    print(f"== check == train={verdict.train_pass} test={verdict.test_pass}")

    exported = export_log(session)
    replayed = replay(exported, harness=harness)
    same_bytes = (replayed.current_compiled.target_source
                  == compiled.target_source)
    print(f"== replay == identical_bytes={same_bytes} "
          f"log_equal={replay_equal(session, replayed)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
