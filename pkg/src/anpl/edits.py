"""The four structured edit operations over a sketch program.

Each operation produces a whole new program (re-parsed from canonical
text), so hole labels, positions, and validation state are always
consistent with what the differential compiler will see.
"""

from __future__ import annotations

import ast
import copy
from dataclasses import dataclass

from .errors import AnplSyntaxError, UnknownHole
from .sketch import (AMBIENT_NAMES, AnplProgram, Hole, SketchFunction,
                     _iter_calls, _string_literal, parse, render_function,
                     render_hole_stub)


@dataclass(frozen=True)
class EditDescription:
    """Rewrite a hole's natural-language text."""
    hole_id: str
    text: str


@dataclass(frozen=True)
class EditSketch:
    """Replace a sketch function with a new definition (same name)."""
    function: str
    source: str


@dataclass(frozen=True)
class Decompose:
    """Replace a hole with a sub-sketch of one or more definitions."""
    hole_id: str
    source: str


@dataclass(frozen=True)
class Abstract:
    """Collapse a statement range of a function into a new inline hole."""
    function: str
    start: int
    end: int
    description: str


EditOp = EditDescription | EditSketch | Decompose | Abstract

_KINDS = {"edit_description": EditDescription, "edit_sketch": EditSketch,
          "decompose": Decompose, "abstract": Abstract}
_NAMES = {cls: kind for kind, cls in _KINDS.items()}


def op_to_json(op: EditOp) -> dict:
    data = {"kind": _NAMES[type(op)]}
    data.update(vars(op))
    return data


def op_from_json(data: dict) -> EditOp:
    kind = data.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"unknown edit kind: {kind}")
    fields = {k: v for k, v in data.items() if k != "kind"}
    return _KINDS[kind](**fields)


# ---------------------------------------------------------------------------

def _chunks(anpl: AnplProgram) -> list[tuple[str, str, str]]:
    out = []
    for kind, name in anpl.order:
        if kind == "fn":
            out.append((kind, name, render_function(anpl.function(name).node)))
        else:
            hole = anpl.hole(name)
            out.append((kind, name, render_hole_stub(
                hole.canonical_name, hole.declared_params or (), hole.description)))
    return out


def _rebuild(chunks: list[tuple[str, str, str]], appended: list[str] = ()) -> AnplProgram:
    text = "\n\n".join([c[2] for c in chunks] + list(appended)) + "\n"
    return parse(text)


def _owning_function(anpl: AnplProgram, hole: Hole) -> SketchFunction:
    line, col = hole.calls[0].line, hole.calls[0].col
    for fn in anpl.functions:
        for call in _iter_calls(fn.node):
            if (call.lineno, call.col_offset) == (line, col):
                return fn
    raise UnknownHole(f"cannot locate call site of {hole.id}")


def _replace_inline_call(fn: SketchFunction, site: tuple[int, int],
                         make_func: ast.expr) -> str:
    node = copy.deepcopy(fn.node)
    for call in _iter_calls(node):
        if (call.lineno, call.col_offset) == site and \
                isinstance(call.func, ast.Constant):
            call.func = make_func
    return render_function(node)


def _parse_defs(source: str) -> list[ast.FunctionDef]:
    try:
        module = ast.parse(source)
    except SyntaxError as exc:
        raise AnplSyntaxError(exc.msg or "invalid syntax", exc.lineno or 0,
                              (exc.offset or 1) - 1) from None
    defs = [n for n in module.body if isinstance(n, ast.FunctionDef)]
    if not defs or len(defs) != len(module.body):
        raise AnplSyntaxError("replacement must consist of function definitions", 1, 0)
    return defs


def apply_edit_op(anpl: AnplProgram, op: EditOp) -> AnplProgram:
    """Produce the edited program; raises UnknownHole / AnplSyntaxError."""
    if isinstance(op, EditDescription):
        return _edit_description(anpl, op)
    if isinstance(op, EditSketch):
        return _edit_sketch(anpl, op)
    if isinstance(op, Decompose):
        return _decompose(anpl, op)
    if isinstance(op, Abstract):
        return _abstract(anpl, op)
    raise TypeError(f"not an edit operation: {op!r}")


def _edit_description(anpl: AnplProgram, op: EditDescription) -> AnplProgram:
    if not anpl.has_hole(op.hole_id):
        raise UnknownHole(f"no hole named {op.hole_id}")
    hole = anpl.hole(op.hole_id)
    chunks = _chunks(anpl)
    if hole.is_named:
        stub = render_hole_stub(hole.canonical_name, hole.declared_params or (),
                                op.text)
        chunks = [(k, n, stub if (k, n) == ("hole", hole.id) else t)
                  for k, n, t in chunks]
        return _rebuild(chunks)
    fn = _owning_function(anpl, hole)
    site = (hole.calls[0].line, hole.calls[0].col)
    new_text = _replace_inline_call(fn, site, ast.Constant(value=op.text))
    chunks = [(k, n, new_text if (k, n) == ("fn", fn.name) else t)
              for k, n, t in chunks]
    return _rebuild(chunks)


def _edit_sketch(anpl: AnplProgram, op: EditSketch) -> AnplProgram:
    defs = _parse_defs(op.source)
    if len(defs) != 1 or defs[0].name != op.function:
        raise AnplSyntaxError(f"expected a single definition of {op.function}", 1, 0)
    if op.function not in anpl.function_names:
        raise UnknownHole(f"no sketch function named {op.function}")
    new_text = ast.unparse(defs[0])
    chunks = [(k, n, new_text if (k, n) == ("fn", op.function) else t)
              for k, n, t in _chunks(anpl)]
    return _rebuild(chunks)


def _decompose(anpl: AnplProgram, op: Decompose) -> AnplProgram:
    if not anpl.has_hole(op.hole_id):
        raise UnknownHole(f"no hole named {op.hole_id}")
    hole = anpl.hole(op.hole_id)
    defs = _parse_defs(op.source)
    chunks = _chunks(anpl)
    if hole.is_named:
        by_name = {d.name: d for d in defs}
        if hole.user_name not in by_name:
            raise AnplSyntaxError(
                f"decomposition must define {hole.user_name}", 1, 0)
        replacement = ast.unparse(by_name[hole.user_name])
        chunks = [(k, n, replacement if (k, n) == ("hole", hole.id) else t)
                  for k, n, t in chunks]
        extra = [ast.unparse(d) for d in defs if d.name != hole.user_name]
        return _rebuild(chunks, extra)
    fn = _owning_function(anpl, hole)
    site = (hole.calls[0].line, hole.calls[0].col)
    head = defs[0].name
    new_text = _replace_inline_call(fn, site, ast.Name(id=head, ctx=ast.Load()))
    chunks = [(k, n, new_text if (k, n) == ("fn", fn.name) else t)
              for k, n, t in chunks]
    return _rebuild(chunks, [ast.unparse(d) for d in defs])


# --- abstraction: statements -> hole ---------------------------------------

def _stmt_assigned(stmt: ast.stmt) -> list[str]:
    names: list[str] = []
    for node in ast.walk(stmt):
        if isinstance(node, ast.Assign):
            target = node.targets[0]
            if isinstance(target, ast.Name):
                names.append(target.id)
            elif isinstance(target, ast.Tuple):
                names.extend(e.id for e in target.elts if isinstance(e, ast.Name))
        elif isinstance(node, ast.For):
            if isinstance(node.target, ast.Name):
                names.append(node.target.id)
            elif isinstance(node.target, ast.Tuple):
                names.extend(e.id for e in node.target.elts
                             if isinstance(e, ast.Name))
    return names


def _stmt_reads(stmt: ast.stmt) -> list[str]:
    return [node.id for node in ast.walk(stmt)
            if isinstance(node, ast.Name) and isinstance(node.ctx, ast.Load)]


def _abstract(anpl: AnplProgram, op: Abstract) -> AnplProgram:
    if op.function not in anpl.function_names:
        raise UnknownHole(f"no sketch function named {op.function}")
    fn = anpl.function(op.function)
    body = fn.body
    if not (0 <= op.start < op.end <= len(body)):
        raise AnplSyntaxError(f"statement range {op.start}:{op.end} out of "
                              f"bounds for {op.function}", fn.node.lineno, 0)
    callables = anpl.function_names | anpl.named_hole_names | AMBIENT_NAMES
    defined_before = set(fn.params)
    for stmt in body[:op.start]:
        defined_before.update(_stmt_assigned(stmt))

    ins: list[str] = []
    assigned_in_range: set[str] = set()
    first_assigned: list[str] = []
    for stmt in body[op.start:op.end]:
        for name in _stmt_reads(stmt):
            if (name in defined_before and name not in assigned_in_range
                    and name not in callables and name not in ins):
                ins.append(name)
        for name in _stmt_assigned(stmt):
            if name not in assigned_in_range:
                assigned_in_range.add(name)
                first_assigned.append(name)

    after_reads = {name for stmt in body[op.end:] for name in _stmt_reads(stmt)}
    outs = [name for name in first_assigned if name in after_reads]

    call_text = f"{_string_literal(op.description)}({', '.join(ins)})"
    line = f"{', '.join(outs)} = {call_text}" if outs else call_text
    new_stmt = ast.parse(line).body[0]

    node = copy.deepcopy(fn.node)
    node.body[op.start:op.end] = [new_stmt]
    new_text = render_function(node)
    chunks = [(k, n, new_text if (k, n) == ("fn", op.function) else t)
              for k, n, t in _chunks(anpl)]
    return _rebuild(chunks)
