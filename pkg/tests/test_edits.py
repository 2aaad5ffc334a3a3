"""The four edit operations as pure program transforms."""

import pytest

from anpl.edits import (Abstract, Decompose, EditDescription, EditSketch,
                        apply_edit_op, op_from_json, op_to_json)
from anpl.errors import AnplSyntaxError, UnknownHole
from anpl.sketch import parse, render, validation_errors

TASK64 = '''def seperate_input(input):
    "Change the input into four new arrays based on the central dividing line in the x and y directions"

def main(input):
    inputs = seperate_input(input)
    output = "Find an array that doesn't have just one color"(inputs)
    return output
'''


class TestEditDescription:
    def test_named_hole(self):
        program = parse(TASK64)
        edited = apply_edit_op(program,
                               EditDescription("seperate_input", "split on midlines"))
        assert edited.hole("seperate_input").description == "split on midlines"
        assert edited.hole("_hole0").description == \
            program.hole("_hole0").description

    def test_inline_hole(self):
        program = parse(TASK64)
        edited = apply_edit_op(program,
                               EditDescription("_hole0", "pick the odd one out"))
        assert edited.hole("_hole0").description == "pick the odd one out"
        assert edited.hole("seperate_input").description == \
            program.hole("seperate_input").description

    def test_unknown_hole(self):
        with pytest.raises(UnknownHole):
            apply_edit_op(parse(TASK64), EditDescription("_hole7", "x"))


class TestEditSketch:
    def test_replaces_function_body(self):
        program = parse(TASK64)
        edited = apply_edit_op(program, EditSketch(
            "main",
            "def main(input):\n"
            "    inputs = seperate_input(input)\n"
            '    output = "Find an array that doesn\'t have just one color"(inputs)\n'
            "    return output[0]\n"))
        assert "return output[0]" in render(edited)
        assert [h.id for h in edited.holes] == ["seperate_input", "_hole0"]

    def test_can_introduce_invalid_dataflow(self):
        program = parse(TASK64)
        edited = apply_edit_op(program, EditSketch(
            "main", "def main(input):\n    return mystery\n"))
        assert validation_errors(edited)  # caller decides to reject

    def test_name_mismatch_rejected(self):
        with pytest.raises(AnplSyntaxError):
            apply_edit_op(parse(TASK64),
                          EditSketch("main", "def other(x):\n    return x\n"))

    def test_unknown_function(self):
        with pytest.raises(UnknownHole):
            apply_edit_op(parse(TASK64),
                          EditSketch("nope", "def nope(x):\n    return x\n"))


class TestDecompose:
    def test_named_hole_becomes_sub_sketch(self):
        program = parse(TASK64)
        edited = apply_edit_op(program, Decompose(
            "seperate_input",
            "def seperate_input(input):\n"
            '    top = "take the top half"(input)\n'
            '    parts = "split into quadrant arrays"(top, input)\n'
            "    return parts\n"))
        assert "seperate_input" in edited.function_names
        ids = [h.id for h in edited.holes]
        assert ids == ["_hole0", "_hole1", "_hole2"]
        descriptions = {h.description for h in edited.holes}
        assert "take the top half" in descriptions

    def test_named_hole_with_extra_definitions(self):
        program = parse(TASK64)
        edited = apply_edit_op(program, Decompose(
            "seperate_input",
            "def seperate_input(input):\n"
            "    parts = quadrants(input)\n"
            "    return parts\n\n"
            'def quadrants(input):\n    "cut the grid into four quadrants"\n'))
        assert "quadrants" in {h.id for h in edited.holes}

    def test_inline_hole_rewired_to_new_function(self):
        program = parse(TASK64)
        edited = apply_edit_op(program, Decompose(
            "_hole0",
            'def choose(inputs):\n    "find the non-uniform quadrant"\n'))
        assert "choose(inputs)" in render(edited)
        assert "choose" in {h.id for h in edited.holes}

    def test_replacement_must_define_the_named_hole(self):
        with pytest.raises(AnplSyntaxError):
            apply_edit_op(parse(TASK64), Decompose(
                "seperate_input", "def unrelated(x):\n    return x\n"))


class TestAbstract:
    SOURCE = ("def main(x):\n"
              "    a = x + 1\n"
              "    b = a * 2\n"
              "    c = b - a\n"
              "    return c\n")

    def test_range_becomes_inline_hole(self):
        program = parse(self.SOURCE)
        edited = apply_edit_op(program,
                               Abstract("main", 1, 3, "combine a into c"))
        assert len(edited.holes) == 1
        hole = edited.holes[0]
        assert hole.description == "combine a into c"
        assert hole.calls[0].input_vars == ("a",)
        assert hole.calls[0].output_vars == ("c",)
        assert validation_errors(edited) == []

    def test_multiple_outputs(self):
        source = ("def main(x):\n"
                  "    a = x + 1\n"
                  "    b = a * 2\n"
                  "    c = a + b\n"
                  "    return c + b\n")
        edited = apply_edit_op(parse(source),
                               Abstract("main", 1, 3, "derive b and c"))
        call = edited.holes[0].calls[0]
        assert set(call.output_vars) == {"b", "c"}

    def test_range_bounds_checked(self):
        with pytest.raises(AnplSyntaxError):
            apply_edit_op(parse(self.SOURCE), Abstract("main", 2, 9, "x"))


class TestOpJson:
    @pytest.mark.parametrize("op", [
        EditDescription("_hole0", "new text"),
        EditSketch("main", "def main(x):\n    return x\n"),
        Decompose("stage", "def stage(x):\n    return x\n"),
        Abstract("main", 0, 2, "a step"),
    ])
    def test_round_trip(self, op):
        assert op_from_json(op_to_json(op)) == op

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            op_from_json({"kind": "rewrite_everything"})
