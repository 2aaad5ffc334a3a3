"""The hole-compiling loop: prompts, retries, splicing, preservation."""

import pytest

from anpl.compiler import (MAX_ATTEMPTS, PREAMBLE, CompiledProgram, Filled,
                           PartialCompile, Rejected, build_prompt,
                           compile_program, extract_code, fill_one,
                           revert_to_sketch)
from anpl.callgraph import entry_nodes
from anpl.errors import ExhaustedAttempts, SketchInvalid
from anpl.gateway import RuleGateway, rule
from anpl.prompts import SYSTEM_PROMPT
from anpl.sketch import holes_in_order, parse, render

from darc_example import DARC_ANPL, DARC_FILLS
from sketchgen import generate_sketch

TASK64 = '''def seperate_input(input):
    "Change the input into four new arrays based on the central dividing line in the x and y directions"

def main(input):
    inputs = seperate_input(input)
    output = "Find an array that doesn't have just one color"(inputs)
    return output
'''

TASK64_RULES = [
    rule("Change the input into four",
         "```python\ndef seperate_input(input):\n    return [input]\n```"),
    rule("Find an array that doesn't",
         "```python\ndef pick(inputs):\n    return inputs[0]\n```"),
]


class TestBuildPrompt:
    def test_system_prompt_verbatim(self):
        assert SYSTEM_PROMPT == (
            "As a pythonGPT, your task is to complete the unimplemented "
            "functions in the given python code,\n"
            'which are referred to as "holes" and are labeled as _hole0, '
            "_hole1, _hole2, and so on.\n"
            "Your implementation should align with the code and "
            "documentation using Python.")

    def test_user_prompt_shape(self):
        program = parse(TASK64)
        hole = holes_in_order(program)[1]
        system, user = build_prompt("", hole)
        assert system == SYSTEM_PROMPT
        assert user == (
            "```python\n\n```\n"
            "The function needs to be given a new name. "
            "Markdown format should be used to return it.\n"
            "```python\n"
            "def _hole0(inputs):\n"
            "    \"Find an array that doesn't have just one color\"\n"
            "```")

    def test_named_hole_stub_uses_declared_params(self):
        program = parse(TASK64)
        hole = holes_in_order(program)[0]
        _, user = build_prompt("", hole)
        assert "def seperate_input(input):" in user

    def test_context_is_previously_spliced_code(self):
        program = parse(TASK64)
        gateway = RuleGateway(TASK64_RULES)
        partial = PartialCompile.start(program)
        first, second = holes_in_order(program)
        fill_one(partial, first, gateway)
        _, user = build_prompt(partial.context_code(), second)
        assert "def seperate_input(input):" in user
        assert user.startswith("```python\ndef seperate_input")

    def test_context_concatenates_every_prior_fill(self, darc_program,
                                                   darc_gateway):
        partial = PartialCompile.start(darc_program)
        holes = holes_in_order(darc_program)
        fill_one(partial, holes[0], darc_gateway)
        fill_one(partial, holes[1], darc_gateway)
        expected = (partial.fill_sections["_hole0"] + "\n\n"
                    + partial.fill_sections["_hole1"])
        assert partial.context_code() == expected
        _, user = build_prompt(partial.context_code(), holes[2])
        assert user.startswith("```python\n" + expected)

    def test_deterministic(self):
        program = parse(TASK64)
        hole = holes_in_order(program)[0]
        assert build_prompt("ctx", hole) == build_prompt("ctx", hole)


class TestExtractCode:
    def test_single_block(self):
        assert extract_code("text\n```python\nx = 1\n```\nmore") == "x = 1"

    def test_unfenced_falls_back_to_whole_text(self):
        assert extract_code("def f():\n    return 1") == "def f():\n    return 1"

    def test_blocks_joined_against_hand_split_oracle(self):
        # ten synthetic responses with a known manual split
        cases = []
        for i in range(10):
            blocks = [f"def f{i}_{j}():\n    return {j}" for j in range(1 + i % 3)]
            prose = [f"Thought {i}.\n"] + [f"\nAnd also:\n"] * (len(blocks) - 1)
            text = ""
            for p, b in zip(prose, blocks):
                text += p + "```python\n" + b + "\n```"
            cases.append((text, "\n".join(blocks)))
        for text, expected in cases:
            assert extract_code(text) == expected

    def test_language_tag_optional(self):
        assert extract_code("```\na = 2\n```") == "a = 2"


def scripted_by_temperature(desc, responses):
    """responses[i] answers attempt i (temperature 0.1 * i)."""
    return RuleGateway([rule(desc, resp, temperature=round(0.1 * i, 10))
                        for i, resp in enumerate(responses)])


AMBIGUOUS = "```python\ndef f(x):\n    return x\n\ndef h(x):\n    return x\n```"
GOOD = "```python\ndef solve(x):\n    return x\n```"
BROKEN = "```python\ndef broken(:\n```"


class TestFillOne:
    def program(self):
        return parse('def main(x):\n    y = "transmute the grid"(x)\n    return y\n')

    def test_success_first_attempt_temperature_zero(self):
        program = self.program()
        gateway = scripted_by_temperature("transmute", [GOOD])
        partial = PartialCompile.start(program)
        attempts = fill_one(partial, program.holes[0], gateway)
        assert len(attempts) == 1
        assert attempts[0].temperature == 0.0
        assert isinstance(attempts[0].outcome, Filled)
        assert partial.fill_map == {"_hole0": "_hole0"}

    def test_two_rejections_then_success(self):
        program = self.program()
        gateway = scripted_by_temperature(
            "transmute", [AMBIGUOUS, AMBIGUOUS, GOOD])
        partial = PartialCompile.start(program)
        attempts = fill_one(partial, program.holes[0], gateway)
        assert [a.temperature for a in attempts] == [0.0, 0.1, 0.2]
        assert [type(a.outcome) for a in attempts] == [Rejected, Rejected, Filled]

    def test_parse_failure_consumes_attempt(self):
        program = self.program()
        gateway = scripted_by_temperature("transmute", [BROKEN, GOOD])
        partial = PartialCompile.start(program)
        attempts = fill_one(partial, program.holes[0], gateway)
        assert len(attempts) == 2
        assert isinstance(attempts[0].outcome, Rejected)

    def test_exhausted_after_five(self):
        program = self.program()
        gateway = scripted_by_temperature("transmute", [AMBIGUOUS] * 5)
        partial = PartialCompile.start(program)
        with pytest.raises(ExhaustedAttempts) as exc:
            fill_one(partial, program.holes[0], gateway)
        temps = [a.temperature for a in exc.value.attempts]
        assert temps == [0.0, 0.1, 0.2, 0.3, 0.4]
        assert len(exc.value.attempts) == MAX_ATTEMPTS

    def test_all_requests_carry_token_cap(self):
        program = self.program()
        gateway = scripted_by_temperature("transmute", [AMBIGUOUS, GOOD])
        fill_one(PartialCompile.start(program), program.holes[0], gateway)
        assert all(r.max_tokens == 1024 for r in gateway.calls)
        assert all(r.n_completions == 1 for r in gateway.calls)


class TestCompile:
    def test_task64_sketch_lines_preserved(self):
        compiled = compile_program(parse(TASK64), RuleGateway(TASK64_RULES))
        assert ("def main(input):\n"
                "    inputs = seperate_input(input)\n"
                "    output = _hole0(inputs)\n"
                "    return output") in compiled.target_source
        assert compiled.target_source.startswith(PREAMBLE)
        assert revert_to_sketch(compiled) == render(compiled.anpl)

    def test_hole_free_zero_llm_calls(self):
        gateway = RuleGateway([])
        program = parse("def main(x):\n    return x\n")
        compiled = compile_program(program, gateway)
        assert gateway.calls == []
        assert compiled.target_source == PREAMBLE + "\n\n" + render(program)
        assert compiled.fill_map == {}

    def test_darc_example(self, darc_program, darc_gateway):
        compiled = compile_program(darc_program, darc_gateway)
        assert len(compiled.fill_map) == 5
        assert entry_nodes(compiled.graph) == {"main"}
        assert set(compiled.graph.nodes) == \
            {"main", "_hole0", "_hole1", "_hole2", "_hole3", "_hole4"}

    def test_rename_to_canonical_name(self):
        compiled = compile_program(parse(TASK64), RuleGateway(TASK64_RULES))
        # the second response defined `pick`; it must be bound to _hole0
        assert "def pick" not in compiled.target_source
        assert "def _hole0(inputs):" in compiled.target_source

    def test_helper_collision_gets_suffix(self):
        program = parse('def main(x):\n'
                        '    a = "first stage"(x)\n'
                        '    b = "second stage"(a)\n'
                        '    return b\n')
        gateway = RuleGateway([
            rule("first stage",
                 "```python\ndef one(x):\n    return util(x)\n\n"
                 "def util(x):\n    return x\n```"),
            rule("second stage",
                 "```python\ndef two(a):\n    return util(a)\n\n"
                 "def util(a):\n    return a + 1\n```"),
        ])
        compiled = compile_program(program, gateway)
        assert compiled.fill_nodes["_hole0"] == ("_hole0", "util")
        assert compiled.fill_nodes["_hole1"] == ("_hole1", "util__v2")
        # the second fill's internal reference follows the rename
        assert "return util__v2(a)" in compiled.fill_sections["_hole1"]
        # the first fill is untouched
        assert "return util(x)" in compiled.fill_sections["_hole0"]

    def test_recursion_sugar_compiles(self):
        source = (
            "def floodfill(grid, i, j):\n"
            '    if "is outside the valid grid area"(grid, i, j):\n'
            "        return grid\n"
            "    else:\n"
            '        return "apply floodfill to adjacent pixels"(grid, i, j, floodfill)\n'
            "\n"
            "def main(grid):\n"
            "    out = floodfill(grid, 0, 0)\n"
            "    return out\n")
        gateway = RuleGateway([
            rule("is outside the valid grid area",
                 "```python\ndef outside(grid, i, j):\n"
                 "    return i < 0 or j < 0 or i >= grid.shape[0] or j >= grid.shape[1]\n```"),
            rule("apply floodfill to adjacent pixels",
                 "```python\ndef spread(grid, i, j, floodfill):\n"
                 "    grid[i, j] = yellow\n"
                 "    floodfill(grid, i + 1, j)\n"
                 "    floodfill(grid, i - 1, j)\n"
                 "    floodfill(grid, i, j + 1)\n"
                 "    floodfill(grid, i, j - 1)\n"
                 "    return grid\n```"),
        ])
        compiled = compile_program(parse(source), gateway)
        assert revert_to_sketch(compiled) == render(compiled.anpl)
        assert "return _hole1(grid, i, j, floodfill)" in compiled.target_source
        # the fill's floodfill parameter shadows the sketch function: no edge
        assert ("_hole1", "floodfill") not in compiled.graph.edges
        assert ("floodfill", "floodfill") in compiled.graph.edges

    def test_request_count_equals_attempt_total(self, darc_program, darc_gateway):
        compiled = compile_program(darc_program, darc_gateway)
        total_attempts = sum(len(a) for a in compiled.attempt_log.values())
        assert len(darc_gateway.calls) == total_attempts == 5

    def test_compile_twice_is_byte_identical(self, darc_program, darc_gateway):
        first = compile_program(darc_program, darc_gateway)
        second = compile_program(parse(DARC_ANPL), RuleGateway(
            [rule(k, v) for k, v in DARC_FILLS.items()]))
        assert first.target_source == second.target_source

    def test_fill_map_injective(self, darc_compiled):
        values = list(darc_compiled.fill_map.values())
        assert len(values) == len(set(values))

    def test_invalid_sketch_refused(self):
        program = parse("def main(x):\n    return y\n")
        with pytest.raises(SketchInvalid):
            compile_program(program, RuleGateway([]))

    def test_exhausted_attaches_partial(self):
        program = parse('def main(x):\n'
                        '    a = "works fine"(x)\n'
                        '    b = "never resolves"(a)\n'
                        '    return b\n')
        gateway = RuleGateway([rule("works fine", GOOD)] + [
            rule("never resolves", AMBIGUOUS, temperature=round(0.1 * i, 10))
            for i in range(5)])
        with pytest.raises(ExhaustedAttempts) as exc:
            compile_program(program, gateway)
        partial = exc.value.partial
        assert isinstance(partial, CompiledProgram)
        assert partial.fill_map == {"_hole0": "_hole0"}
        # the unresolved hole call stays a hole call in the partial module
        assert '"never resolves"(a)' in partial.target_source

    @pytest.mark.parametrize("seed", range(0, 40, 7))
    def test_random_sketches_preserve_sketch(self, seed):
        source, rules = generate_sketch(seed)
        program = parse(source)
        compiled = compile_program(program, RuleGateway(rules))
        assert revert_to_sketch(compiled) == render(program)

    @pytest.mark.parametrize("seed", range(3, 60, 11))
    def test_random_sketches_compile_deterministically(self, seed):
        source, rules = generate_sketch(seed)
        first = compile_program(parse(source), RuleGateway(rules))
        second = compile_program(parse(source), RuleGateway(rules))
        assert first.target_source == second.target_source
        names = list(first.fill_map.values())
        assert len(names) == len(set(names))
        # the recorded graph never points at a function the module lacks
        for node in first.graph.nodes.values():
            for callee in node.calls:
                assert callee in first.graph.nodes

    def test_whole_program_hole(self):
        # the natural opening move: main itself is one big hole
        program = parse('def main(input):\n    "solve the whole task"\n')
        assert [h.id for h in program.holes] == ["main"]
        gateway = RuleGateway([
            rule("solve the whole task",
                 "```python\ndef solve(input):\n    return helper(input)\n\n"
                 "def helper(input):\n    return input\n```")])
        compiled = compile_program(program, gateway)
        assert compiled.fill_map == {"main": "main"}
        assert "def main(input):" in compiled.target_source
        assert entry_nodes(compiled.graph) == {"main"}
        assert revert_to_sketch(compiled) == render(program)
