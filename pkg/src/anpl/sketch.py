"""Parsing, validation, and rendering of sketch programs.

A sketch program is Python-shaped source restricted to a small grammar:
top-level function definitions whose bodies use assignments, calls,
return, for/while/if, pass, literals, indexing, and attribute access.
Holes come in two forms:

* a named hole: a def whose entire body is one string literal (the
  natural-language description), later called by name;
* an inline hole: a string literal in call position,
  ``"description"(inputs)``, optionally assigned to output variables.

Unnamed holes get deterministic labels ``_hole0``, ``_hole1``, ... in
appearance order. Parsing is backed by the stdlib ``ast`` module; the
renderer emits a canonical text form so that parse(render(p)) == p.
"""

from __future__ import annotations

import ast
import copy
import json
from dataclasses import dataclass, field

from .errors import AnplSyntaxError, EmptyDescription, MissingMain

# Names usable in a sketch without local definition: the color constants
# bound by the compiled-module preamble, numpy's alias, and common builtins.
COLOR_NAMES = (
    "black", "blue", "red", "green", "yellow",
    "grey", "pink", "orange", "teal", "maroon",
)

BUILTIN_NAMES = frozenset({
    "range", "len", "enumerate", "zip", "min", "max", "abs", "sum",
    "sorted", "reversed", "list", "tuple", "set", "dict", "int", "float",
    "str", "bool", "print", "any", "all", "map", "filter", "isinstance",
    "round", "divmod", "pow", "True", "False", "None",
})

AMBIENT_NAMES = BUILTIN_NAMES | set(COLOR_NAMES) | {"np"}

AUTO_LABEL_PREFIX = "_hole"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str
    line: int
    col: int

    def to_json(self) -> dict:
        return {"severity": self.severity, "message": self.message,
                "line": self.line, "col": self.col}

    def __str__(self) -> str:
        return f"{self.severity} at {self.line}:{self.col}: {self.message}"


@dataclass(frozen=True)
class HoleCall:
    """One call site of a hole inside a sketch function."""

    hole_id: str
    input_vars: tuple[str, ...]
    output_vars: tuple[str, ...]
    passed_function_refs: tuple[str, ...]
    line: int
    col: int


@dataclass(frozen=True)
class Hole:
    """A function module specified only by natural-language text."""

    id: str
    description: str
    user_name: str | None = None
    declared_params: tuple[str, ...] | None = None
    auto_label: str | None = None
    calls: tuple[HoleCall, ...] = ()
    position: tuple[int, int] = (0, 0)

    @property
    def is_named(self) -> bool:
        return self.user_name is not None

    @property
    def canonical_name(self) -> str:
        """The symbol the compiled program will bind this hole to."""
        name = self.user_name or self.auto_label
        assert name is not None
        return name

    def signature_params(self) -> tuple[str, ...]:
        """Parameter names for the hole's stub: declared ones for named
        holes, the first call site's argument names otherwise."""
        if self.declared_params is not None:
            return self.declared_params
        if self.calls:
            return self.calls[0].input_vars
        return ()


@dataclass(eq=False)
class SketchFunction:
    """A user-authored function with a real body (not a hole)."""

    name: str
    params: tuple[str, ...]
    node: ast.FunctionDef = field(repr=False)

    @property
    def body(self) -> list[ast.stmt]:
        return self.node.body


@dataclass(eq=False)
class AnplProgram:
    """A parsed sketch: functions plus holes, in source order.

    ``order`` lists top-level items as ("fn", name) or ("hole", hole_id)
    pairs so rendering reproduces the author's layout.
    """

    functions: tuple[SketchFunction, ...]
    holes: tuple[Hole, ...]
    order: tuple[tuple[str, str], ...]
    source: str = field(repr=False, default="")
    entry_name: str = "main"

    def function(self, name: str) -> SketchFunction:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)

    def hole(self, hole_id: str) -> Hole:
        for h in self.holes:
            if h.id == hole_id:
                return h
        raise KeyError(hole_id)

    def has_hole(self, hole_id: str) -> bool:
        return any(h.id == hole_id for h in self.holes)

    @property
    def function_names(self) -> set[str]:
        return {fn.name for fn in self.functions}

    @property
    def named_hole_names(self) -> set[str]:
        return {h.user_name for h in self.holes if h.user_name}

    def __eq__(self, other) -> bool:
        # Canonical-text equality: whitespace and comments are insignificant.
        if not isinstance(other, AnplProgram):
            return NotImplemented
        return render(self) == render(other)

    def __hash__(self):
        return hash(render(self))


# ---------------------------------------------------------------------------
# grammar subset checks

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.FloorDiv,
                   ast.Mod, ast.Pow)
_ALLOWED_UNARY = (ast.USub, ast.UAdd, ast.Not)
_ALLOWED_CMPOPS = (ast.Eq, ast.NotEq, ast.Lt, ast.LtE, ast.Gt, ast.GtE,
                   ast.In, ast.NotIn, ast.Is, ast.IsNot)


def _reject(node: ast.AST, what: str) -> AnplSyntaxError:
    return AnplSyntaxError(f"{what} is outside the sketch grammar",
                           getattr(node, "lineno", 0),
                           getattr(node, "col_offset", 0))


def _check_expr(node: ast.expr) -> None:
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (str, int, float, bool)) and node.value is not None:
            raise _reject(node, f"literal of type {type(node.value).__name__}")
        return
    if isinstance(node, ast.Name):
        return
    if isinstance(node, ast.Call):
        if isinstance(node.func, ast.Constant):
            if not isinstance(node.func.value, str):
                raise _reject(node, "calling a non-string literal")
        elif not isinstance(node.func, (ast.Name, ast.Attribute)):
            raise _reject(node, "computed call target")
        else:
            _check_expr(node.func)
        for arg in node.args:
            if isinstance(arg, ast.Starred):
                raise _reject(arg, "star argument")
            _check_expr(arg)
        for kw in node.keywords:
            if kw.arg is None:
                raise _reject(node, "** argument")
            _check_expr(kw.value)
        return
    if isinstance(node, ast.Attribute):
        _check_expr(node.value)
        return
    if isinstance(node, ast.Subscript):
        _check_expr(node.value)
        _check_slice(node.slice)
        return
    if isinstance(node, (ast.Tuple, ast.List)):
        for elt in node.elts:
            _check_expr(elt)
        return
    if isinstance(node, ast.BinOp):
        if not isinstance(node.op, _ALLOWED_BINOPS):
            raise _reject(node, f"operator {type(node.op).__name__}")
        _check_expr(node.left)
        _check_expr(node.right)
        return
    if isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _ALLOWED_UNARY):
            raise _reject(node, f"operator {type(node.op).__name__}")
        _check_expr(node.operand)
        return
    if isinstance(node, ast.Compare):
        for op in node.ops:
            if not isinstance(op, _ALLOWED_CMPOPS):
                raise _reject(node, f"comparison {type(op).__name__}")
        _check_expr(node.left)
        for cmp in node.comparators:
            _check_expr(cmp)
        return
    if isinstance(node, ast.BoolOp):
        for value in node.values:
            _check_expr(value)
        return
    raise _reject(node, type(node).__name__)


def _check_slice(node: ast.expr) -> None:
    if isinstance(node, ast.Slice):
        for part in (node.lower, node.upper, node.step):
            if part is not None:
                _check_expr(part)
    elif isinstance(node, ast.Tuple):
        for elt in node.elts:
            _check_slice(elt)
    else:
        _check_expr(node)


def _check_target(node: ast.expr) -> None:
    if isinstance(node, ast.Name):
        return
    if isinstance(node, ast.Tuple):
        for elt in node.elts:
            if not isinstance(elt, ast.Name):
                raise _reject(elt, "nested assignment target")
        return
    if isinstance(node, ast.Subscript):
        _check_expr(node.value)
        _check_slice(node.slice)
        return
    raise _reject(node, f"assignment target {type(node).__name__}")


def _check_stmt(node: ast.stmt) -> None:
    if isinstance(node, ast.Assign):
        if len(node.targets) != 1:
            raise _reject(node, "chained assignment")
        _check_target(node.targets[0])
        _check_expr(node.value)
        return
    if isinstance(node, ast.Expr):
        if isinstance(node.value, ast.Call):
            _check_expr(node.value)
            return
        if isinstance(node.value, ast.Constant) and isinstance(node.value.value, str):
            return  # docstring-style literal statement
        raise _reject(node, "bare expression statement")
    if isinstance(node, ast.Return):
        if node.value is not None:
            _check_expr(node.value)
        return
    if isinstance(node, ast.Pass):
        return
    if isinstance(node, ast.For):
        if node.orelse:
            raise _reject(node, "for-else")
        _check_target(node.target)
        _check_expr(node.iter)
        for stmt in node.body:
            _check_stmt(stmt)
        return
    if isinstance(node, ast.While):
        if node.orelse:
            raise _reject(node, "while-else")
        _check_expr(node.test)
        for stmt in node.body:
            _check_stmt(stmt)
        return
    if isinstance(node, ast.If):
        _check_expr(node.test)
        for stmt in node.body:
            _check_stmt(stmt)
        for stmt in node.orelse:
            _check_stmt(stmt)
        return
    raise _reject(node, type(node).__name__)


def _signature_params(node: ast.FunctionDef) -> tuple[str, ...]:
    a = node.args
    if a.posonlyargs or a.vararg or a.kwonlyargs or a.kwarg or a.defaults or a.kw_defaults:
        raise _reject(node, "non-positional parameters")
    if node.decorator_list:
        raise _reject(node, "decorator")
    for arg in a.args:
        if arg.annotation is not None:
            raise _reject(node, "parameter annotation")
    if node.returns is not None:
        raise _reject(node, "return annotation")
    return tuple(arg.arg for arg in a.args)


def _is_hole_body(body: list[ast.stmt]) -> bool:
    if not body:
        return False
    first = body[0]
    if not (isinstance(first, ast.Expr) and isinstance(first.value, ast.Constant)
            and isinstance(first.value.value, str)):
        return False
    rest = body[1:]
    return not rest or (len(rest) == 1 and isinstance(rest[0], ast.Pass))


# ---------------------------------------------------------------------------
# parsing

def _iter_calls(node: ast.AST):
    """Yield Call nodes in pre-order, matching textual appearance order."""
    if isinstance(node, ast.Call):
        yield node
    for child in ast.iter_child_nodes(node):
        yield from _iter_calls(child)


def _call_site(call: ast.Call, hole_id: str, fn_names: set[str],
               parent_assign: ast.Assign | None) -> HoleCall:
    input_vars = tuple(a.id for a in call.args if isinstance(a, ast.Name))
    passed = tuple(a.id for a in call.args
                   if isinstance(a, ast.Name) and a.id in fn_names)
    output_vars: tuple[str, ...] = ()
    if parent_assign is not None and parent_assign.value is call:
        target = parent_assign.targets[0]
        if isinstance(target, ast.Name):
            output_vars = (target.id,)
        elif isinstance(target, ast.Tuple):
            output_vars = tuple(e.id for e in target.elts if isinstance(e, ast.Name))
    return HoleCall(hole_id=hole_id, input_vars=input_vars,
                    output_vars=output_vars, passed_function_refs=passed,
                    line=call.lineno, col=call.col_offset)


def _enclosing_assign(fn: ast.FunctionDef) -> dict[int, ast.Assign]:
    """Map id(call node) -> the Assign whose value it is."""
    out: dict[int, ast.Assign] = {}
    for stmt in ast.walk(fn):
        if isinstance(stmt, ast.Assign) and isinstance(stmt.value, ast.Call):
            out[id(stmt.value)] = stmt
    return out


def parse(text: str) -> AnplProgram:
    """Parse sketch source into a program, discovering holes in order.

    Raises AnplSyntaxError (with position) when the text is malformed or
    uses constructs outside the sketch grammar, EmptyDescription for a
    blank hole, and MissingMain when no ``main`` is defined.
    """
    try:
        module = ast.parse(text)
    except SyntaxError as exc:
        raise AnplSyntaxError(exc.msg or "invalid syntax",
                              exc.lineno or 0, (exc.offset or 1) - 1) from None

    functions: list[SketchFunction] = []
    named_holes: dict[str, Hole] = {}
    order: list[tuple[str, str]] = []
    seen: set[str] = set()

    for node in module.body:
        if not isinstance(node, ast.FunctionDef):
            raise _reject(node, "top-level statement")
        if node.name in seen:
            raise AnplSyntaxError(f"duplicate definition of {node.name}",
                                  node.lineno, node.col_offset)
        seen.add(node.name)
        params = _signature_params(node)
        if _is_hole_body(node.body):
            desc = node.body[0].value.value  # type: ignore[union-attr]
            if not desc.strip():
                raise EmptyDescription("hole has an empty description",
                                       node.lineno, node.col_offset)
            named_holes[node.name] = Hole(
                id=node.name, description=desc, user_name=node.name,
                declared_params=params,
                position=(node.lineno, node.col_offset))
            order.append(("hole", node.name))
        else:
            for stmt in node.body:
                _check_stmt(stmt)
            functions.append(SketchFunction(name=node.name, params=params, node=node))
            order.append(("fn", node.name))

    if "main" not in seen:
        raise MissingMain("program has no main function")

    fn_names = {fn.name for fn in functions} | set(named_holes)

    # Discover call sites and inline holes in source order.
    inline_holes: list[Hole] = []
    named_calls: dict[str, list[HoleCall]] = {name: [] for name in named_holes}
    counter = 0
    for fn in functions:
        assigns = _enclosing_assign(fn.node)
        for call in _iter_calls(fn.node):
            func = call.func
            if isinstance(func, ast.Constant) and isinstance(func.value, str):
                desc = func.value
                if not desc.strip():
                    raise EmptyDescription("hole has an empty description",
                                           call.lineno, call.col_offset)
                label = f"{AUTO_LABEL_PREFIX}{counter}"
                counter += 1
                site = _call_site(call, label, fn_names, assigns.get(id(call)))
                inline_holes.append(Hole(
                    id=label, description=desc, auto_label=label,
                    calls=(site,), position=(call.lineno, call.col_offset)))
            elif isinstance(func, ast.Name) and func.id in named_holes:
                site = _call_site(call, func.id, fn_names, assigns.get(id(call)))
                named_calls[func.id].append(site)

    holes: list[Hole] = list(inline_holes)
    for name, hole in named_holes.items():
        calls = tuple(named_calls[name])
        position = min([hole.position] + [(c.line, c.col) for c in calls])
        holes.append(Hole(id=hole.id, description=hole.description,
                          user_name=hole.user_name,
                          declared_params=hole.declared_params,
                          calls=calls, position=position))

    holes.sort(key=lambda h: h.position)
    return AnplProgram(functions=tuple(functions), holes=tuple(holes),
                       order=tuple(order), source=text)


def holes_in_order(program: AnplProgram) -> list[Hole]:
    """Holes sorted by the source position of their first occurrence."""
    return sorted(program.holes, key=lambda h: h.position)


# ---------------------------------------------------------------------------
# rendering

_PREC_OR = 4
_PREC_AND = 5
_PREC_NOT = 6
_PREC_CMP = 7
_PREC_ADD = 12
_PREC_MUL = 13
_PREC_UNARY = 14
_PREC_POW = 15
_PREC_POSTFIX = 17
_PREC_ATOM = 18

_BINOP_TEXT = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/",
               ast.FloorDiv: "//", ast.Mod: "%", ast.Pow: "**"}
_BINOP_PREC = {ast.Add: _PREC_ADD, ast.Sub: _PREC_ADD, ast.Mult: _PREC_MUL,
               ast.Div: _PREC_MUL, ast.FloorDiv: _PREC_MUL, ast.Mod: _PREC_MUL,
               ast.Pow: _PREC_POW}
_CMP_TEXT = {ast.Eq: "==", ast.NotEq: "!=", ast.Lt: "<", ast.LtE: "<=",
             ast.Gt: ">", ast.GtE: ">=", ast.In: "in", ast.NotIn: "not in",
             ast.Is: "is", ast.IsNot: "is not"}


def _string_literal(value: str) -> str:
    # Double-quoted, escape-minimal; json escaping is valid Python.
    return json.dumps(value, ensure_ascii=False)


def _constant(value) -> str:
    if isinstance(value, str):
        return _string_literal(value)
    if value is None or isinstance(value, bool):
        return repr(value)
    return repr(value)


def _expr(node: ast.expr, prec: int = 0) -> str:
    if isinstance(node, ast.Constant):
        text = _constant(node.value)
        # 1 .bit_length() style: numeric literals need parens before a dot
        if prec >= _PREC_POSTFIX and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return f"({text})"
        return text
    if isinstance(node, ast.Name):
        return node.id
    if isinstance(node, ast.Call):
        if isinstance(node.func, ast.Constant):
            head = _string_literal(node.func.value)
        else:
            head = _expr(node.func, _PREC_POSTFIX)
        parts = [_expr(a) for a in node.args]
        parts += [f"{kw.arg}={_expr(kw.value)}" for kw in node.keywords]
        return f"{head}({', '.join(parts)})"
    if isinstance(node, ast.Attribute):
        return f"{_expr(node.value, _PREC_POSTFIX)}.{node.attr}"
    if isinstance(node, ast.Subscript):
        return f"{_expr(node.value, _PREC_POSTFIX)}[{_subscript(node.slice)}]"
    if isinstance(node, ast.Tuple):
        if not node.elts:
            return "()"
        inner = ", ".join(_expr(e) for e in node.elts)
        if len(node.elts) == 1:
            inner += ","
        return f"({inner})"
    if isinstance(node, ast.List):
        return f"[{', '.join(_expr(e) for e in node.elts)}]"
    if isinstance(node, ast.BinOp):
        op_prec = _BINOP_PREC[type(node.op)]
        if isinstance(node.op, ast.Pow):  # right-associative
            text = f"{_expr(node.left, op_prec + 1)} ** {_expr(node.right, op_prec)}"
        else:
            text = (f"{_expr(node.left, op_prec)} {_BINOP_TEXT[type(node.op)]} "
                    f"{_expr(node.right, op_prec + 1)}")
        return f"({text})" if op_prec < prec else text
    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.Not):
            text = f"not {_expr(node.operand, _PREC_NOT)}"
            return f"({text})" if _PREC_NOT < prec else text
        sign = "-" if isinstance(node.op, ast.USub) else "+"
        text = f"{sign}{_expr(node.operand, _PREC_UNARY)}"
        return f"({text})" if _PREC_UNARY < prec else text
    if isinstance(node, ast.Compare):
        parts = [_expr(node.left, _PREC_CMP + 1)]
        for op, cmp in zip(node.ops, node.comparators):
            parts.append(_CMP_TEXT[type(op)])
            parts.append(_expr(cmp, _PREC_CMP + 1))
        text = " ".join(parts)
        return f"({text})" if _PREC_CMP < prec else text
    if isinstance(node, ast.BoolOp):
        op_prec = _PREC_AND if isinstance(node.op, ast.And) else _PREC_OR
        word = " and " if isinstance(node.op, ast.And) else " or "
        text = word.join(_expr(v, op_prec + 1) for v in node.values)
        return f"({text})" if op_prec < prec else text
    raise ValueError(f"cannot render {type(node).__name__}")


def _subscript(node: ast.expr) -> str:
    if isinstance(node, ast.Slice):
        lower = _expr(node.lower) if node.lower else ""
        upper = _expr(node.upper) if node.upper else ""
        text = f"{lower}:{upper}"
        if node.step is not None:
            text += f":{_expr(node.step)}"
        return text
    if isinstance(node, ast.Tuple) and node.elts:
        return ", ".join(_subscript(e) for e in node.elts)
    return _expr(node)


def _target(node: ast.expr) -> str:
    if isinstance(node, ast.Tuple):
        if len(node.elts) == 1:
            return f"{_expr(node.elts[0])},"
        return ", ".join(_expr(e) for e in node.elts)
    if isinstance(node, ast.Subscript):
        return f"{_expr(node.value, _PREC_POSTFIX)}[{_subscript(node.slice)}]"
    return _expr(node)


def _stmt_lines(node: ast.stmt, indent: int) -> list[str]:
    pad = "    " * indent
    if isinstance(node, ast.Assign):
        return [f"{pad}{_target(node.targets[0])} = {_expr(node.value)}"]
    if isinstance(node, ast.Expr):
        return [f"{pad}{_expr(node.value)}"]
    if isinstance(node, ast.Return):
        if node.value is None:
            return [f"{pad}return"]
        if isinstance(node.value, ast.Tuple) and len(node.value.elts) > 1:
            return [f"{pad}return {', '.join(_expr(e) for e in node.value.elts)}"]
        return [f"{pad}return {_expr(node.value)}"]
    if isinstance(node, ast.Pass):
        return [f"{pad}pass"]
    if isinstance(node, ast.For):
        lines = [f"{pad}for {_target(node.target)} in {_expr(node.iter)}:"]
        for stmt in node.body:
            lines += _stmt_lines(stmt, indent + 1)
        return lines
    if isinstance(node, ast.While):
        lines = [f"{pad}while {_expr(node.test)}:"]
        for stmt in node.body:
            lines += _stmt_lines(stmt, indent + 1)
        return lines
    if isinstance(node, ast.If):
        lines = [f"{pad}if {_expr(node.test)}:"]
        for stmt in node.body:
            lines += _stmt_lines(stmt, indent + 1)
        orelse = node.orelse
        while len(orelse) == 1 and isinstance(orelse[0], ast.If):
            chain = orelse[0]
            lines.append(f"{pad}elif {_expr(chain.test)}:")
            for stmt in chain.body:
                lines += _stmt_lines(stmt, indent + 1)
            orelse = chain.orelse
        if orelse:
            lines.append(f"{pad}else:")
            for stmt in orelse:
                lines += _stmt_lines(stmt, indent + 1)
        return lines
    raise ValueError(f"cannot render {type(node).__name__}")


def render_function(node: ast.FunctionDef) -> str:
    lines = [f"def {node.name}({', '.join(a.arg for a in node.args.args)}):"]
    for stmt in node.body:
        lines += _stmt_lines(stmt, 1)
    return "\n".join(lines)


def render_hole_stub(name: str, params: tuple[str, ...], description: str) -> str:
    return (f"def {name}({', '.join(params)}):\n"
            f"    {_string_literal(description)}")


def render(program: AnplProgram) -> str:
    """Canonical source text; parse(render(p)) == p."""
    chunks = []
    for kind, name in program.order:
        if kind == "fn":
            chunks.append(render_function(program.function(name).node))
        else:
            hole = program.hole(name)
            chunks.append(render_hole_stub(hole.canonical_name,
                                           hole.declared_params or (),
                                           hole.description))
    return "\n\n".join(chunks) + "\n"


# ---------------------------------------------------------------------------
# dataflow validation

def _reads(node: ast.expr, out: list[tuple[str, int, int]]) -> None:
    """Collect Name loads in evaluation-relevant order."""
    if isinstance(node, ast.Name):
        out.append((node.id, node.lineno, node.col_offset))
        return
    if isinstance(node, ast.Call):
        if isinstance(node.func, (ast.Name, ast.Attribute)):
            _reads(node.func, out)
        for arg in node.args:
            _reads(arg, out)
        for kw in node.keywords:
            _reads(kw.value, out)
        return
    if isinstance(node, ast.Attribute):
        _reads(node.value, out)
        return
    for child in ast.iter_child_nodes(node):
        if isinstance(child, ast.expr):
            _reads(child, out)


def _target_names(node: ast.expr) -> list[str]:
    if isinstance(node, ast.Name):
        return [node.id]
    if isinstance(node, ast.Tuple):
        return [e.id for e in node.elts if isinstance(e, ast.Name)]
    return []


class _FlowState:
    def __init__(self, definite: set[str], maybe: set[str]):
        self.definite = set(definite)
        self.maybe = set(maybe)

    def copy(self) -> "_FlowState":
        return _FlowState(self.definite, self.maybe)

    def define(self, name: str) -> None:
        self.definite.add(name)
        self.maybe.discard(name)


def _check_reads(expr: ast.expr, state: _FlowState, ambient: set[str],
                 diags: list[Diagnostic]) -> None:
    found: list[tuple[str, int, int]] = []
    _reads(expr, found)
    for name, line, col in found:
        if name in state.definite or name in ambient:
            continue
        if name in state.maybe:
            diags.append(Diagnostic(
                "warning",
                f"ConditionalDefinition: {name} is defined on only some paths",
                line, col))
        else:
            diags.append(Diagnostic(
                "error", f"UndefinedVariable: {name} is not defined here",
                line, col))


def _flow_stmt(stmt: ast.stmt, state: _FlowState, ambient: set[str],
               diags: list[Diagnostic]) -> None:
    if isinstance(stmt, ast.Assign):
        _check_reads(stmt.value, state, ambient, diags)
        target = stmt.targets[0]
        if isinstance(target, ast.Subscript):
            _check_reads(target, state, ambient, diags)
        else:
            for name in _target_names(target):
                state.define(name)
        return
    if isinstance(stmt, ast.Expr):
        if isinstance(stmt.value, ast.Call):
            _check_reads(stmt.value, state, ambient, diags)
        return
    if isinstance(stmt, ast.Return):
        if stmt.value is not None:
            _check_reads(stmt.value, state, ambient, diags)
        return
    if isinstance(stmt, ast.Pass):
        return
    if isinstance(stmt, ast.If):
        _check_reads(stmt.test, state, ambient, diags)
        then_state = state.copy()
        else_state = state.copy()
        for s in stmt.body:
            _flow_stmt(s, then_state, ambient, diags)
        for s in stmt.orelse:
            _flow_stmt(s, else_state, ambient, diags)
        both = then_state.definite & else_state.definite
        either = then_state.definite | else_state.definite
        state.maybe |= then_state.maybe | else_state.maybe | (either - both)
        state.definite |= both
        state.maybe -= state.definite
        return
    if isinstance(stmt, (ast.For, ast.While)):
        if isinstance(stmt, ast.For):
            _check_reads(stmt.iter, state, ambient, diags)
        else:
            _check_reads(stmt.test, state, ambient, diags)
        body_state = state.copy()
        if isinstance(stmt, ast.For):
            for name in _target_names(stmt.target):
                body_state.define(name)
        for s in stmt.body:
            _flow_stmt(s, body_state, ambient, diags)
        # the loop may run zero times: body definitions are conditional after
        state.maybe |= (body_state.definite | body_state.maybe) - state.definite
        return


def validate_sketch(program: AnplProgram) -> list[Diagnostic]:
    """Dataflow well-formedness diagnostics; empty means well-formed."""
    ambient = set(AMBIENT_NAMES) | program.function_names | program.named_hole_names
    diags: list[Diagnostic] = []
    for fn in program.functions:
        state = _FlowState(set(fn.params), set())
        for stmt in fn.body:
            _flow_stmt(stmt, state, ambient, diags)
    diags.sort(key=lambda d: (d.line, d.col))
    return diags


def validation_errors(program: AnplProgram) -> list[Diagnostic]:
    return [d for d in validate_sketch(program) if d.severity == "error"]


# ---------------------------------------------------------------------------
# AST helpers used by the compiler

def substitute_inline_calls(fn: SketchFunction,
                            by_site: dict[tuple[int, int], str]) -> ast.FunctionDef:
    """Copy of the function with each inline hole call at a recorded
    (line, col) turned into a call of the mapped symbol."""
    node = copy.deepcopy(fn.node)
    for call in _iter_calls(node):
        if isinstance(call.func, ast.Constant) and isinstance(call.func.value, str):
            name = by_site.get((call.lineno, call.col_offset))
            if name is not None:
                call.func = ast.Name(id=name, ctx=ast.Load(),
                                     lineno=call.lineno, col_offset=call.col_offset)
    return node


def restore_inline_calls(node: ast.FunctionDef,
                         by_name: dict[str, str]) -> ast.FunctionDef:
    """Inverse of substitute_inline_calls: calls to mapped names become
    hole calls carrying the description again."""
    node = copy.deepcopy(node)
    for call in _iter_calls(node):
        if isinstance(call.func, ast.Name) and call.func.id in by_name:
            call.func = ast.Constant(value=by_name[call.func.id],
                                     lineno=call.lineno, col_offset=call.col_offset)
    return node
