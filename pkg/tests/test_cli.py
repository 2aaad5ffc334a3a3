"""CLI verbs: JSON on stdout, state directory round trips, replay."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from anpl.cli import main
from anpl.compiler import compile_program
from anpl.gateway import RecordingGateway, RuleGateway, rule
from anpl.sketch import parse

ANPL_SOURCE = ('def main(input):\n'
               '    doubled = "double every cell value"(input)\n'
               '    return doubled\n')

RULES = [rule("double every cell value",
              "```python\ndef dbl(input):\n    return input * 2\n```")]

EDIT_RULES = RULES + [rule("triple every cell value",
                           "```python\ndef tpl(input):\n    return input * 3\n```")]

TASK = {"train": [{"input": [[1]], "output": [[2]]}],
        "test": [{"input": [[2]], "output": [[4]]}]}


@pytest.fixture()
def workdir(tmp_path):
    (tmp_path / "prog.anpl").write_text(ANPL_SOURCE)
    (tmp_path / "task.json").write_text(json.dumps(TASK))
    return tmp_path


def record_exchanges(path: Path, rules, sources):
    """Pre-record the LLM traffic the CLI will need."""
    gateway = RecordingGateway(RuleGateway(rules), path)
    compiled = None
    for source in sources:
        program = parse(source)
        if compiled is None:
            compiled = compile_program(program, gateway)
        else:
            from anpl.diffcompile import compile_diff
            compiled = compile_diff(compiled, program, gateway)
    return compiled


class TestCompileCommand:
    def test_compile_writes_state_and_json(self, workdir):
        exchanges = workdir / "exchanges.jsonl"
        record_exchanges(exchanges, RULES, [ANPL_SOURCE])
        runner = CliRunner()
        result = runner.invoke(main, [
            "compile", str(workdir / "prog.anpl"),
            "--task", str(workdir / "task.json"),
            "--session", str(workdir / "state"),
            "--replay-log", str(exchanges)])
        assert result.exit_code == 0, result.output + str(result.exception)
        payload = json.loads(result.stdout)
        assert payload["ok"] is True
        assert payload["fill_map"] == {"_hole0": "_hole0"}
        assert (workdir / "state" / "session.json").exists()
        assert (workdir / "state" / "log.csv").exists()
        assert "compiled 1 holes" in result.stderr

    def test_compile_without_gateway_fails(self, workdir, monkeypatch):
        for var in ("ANPL_LLM_ENDPOINT", "ANPL_LLM_MODEL"):
            monkeypatch.delenv(var, raising=False)
        runner = CliRunner()
        result = runner.invoke(main, [
            "compile", str(workdir / "prog.anpl"),
            "--task", str(workdir / "task.json")])
        assert result.exit_code != 0


class TestEditCommand:
    def test_edit_recompiles_differentially(self, workdir):
        exchanges = workdir / "exchanges.jsonl"
        edited = ANPL_SOURCE.replace("double every cell value",
                                     "triple every cell value")
        record_exchanges(exchanges, EDIT_RULES, [ANPL_SOURCE, edited])
        runner = CliRunner()
        compile_result = runner.invoke(main, [
            "compile", str(workdir / "prog.anpl"),
            "--task", str(workdir / "task.json"),
            "--session", str(workdir / "state"),
            "--replay-log", str(exchanges)])
        assert compile_result.exit_code == 0
        op = json.dumps({"kind": "edit_description", "hole_id": "_hole0",
                         "text": "triple every cell value"})
        edit_result = runner.invoke(main, [
            "edit", "--op", op,
            "--session", str(workdir / "state"),
            "--replay-log", str(exchanges)])
        assert edit_result.exit_code == 0, edit_result.output + str(edit_result.exception)
        payload = json.loads(edit_result.stdout)
        assert payload["delta"]["changed"] == ["_hole0"]
        state = json.loads((workdir / "state" / "session.json").read_text())
        assert "input * 3" in state["compiled"]["target_source"]


class TestReplayCommand:
    def test_replay_from_exported_log(self, workdir):
        exchanges = workdir / "exchanges.jsonl"
        record_exchanges(exchanges, RULES, [ANPL_SOURCE])
        runner = CliRunner()
        runner.invoke(main, [
            "compile", str(workdir / "prog.anpl"),
            "--task", str(workdir / "task.json"),
            "--session", str(workdir / "state"),
            "--replay-log", str(exchanges)])
        state = json.loads((workdir / "state" / "session.json").read_text())

        result = runner.invoke(main, [
            "replay", str(workdir / "state" / "log.csv"),
            "--session", str(workdir / "replayed")])
        assert result.exit_code == 0, result.output + str(result.exception)
        payload = json.loads(result.stdout)
        assert payload["target_source"] == state["compiled"]["target_source"]


class TestCheckCommand:
    def test_check_with_live_runner(self, workdir):
        pytest.importorskip("anpl_harness",
                            reason="check shells out to the runner package")
        exchanges = workdir / "exchanges.jsonl"
        record_exchanges(exchanges, RULES, [ANPL_SOURCE])
        runner = CliRunner()
        runner.invoke(main, [
            "compile", str(workdir / "prog.anpl"),
            "--task", str(workdir / "task.json"),
            "--session", str(workdir / "state"),
            "--replay-log", str(exchanges)])
        result = runner.invoke(main, ["check",
                                      "--session", str(workdir / "state")])
        assert result.exit_code == 0, result.output + str(result.exception)
        payload = json.loads(result.stdout)
        assert payload["train_pass"] is True and payload["test_pass"] is True
