"""The hole-compiling loop.

Holes are filled one by one in appearance order. For each hole the LLM is
asked for an implementation (retrying up to five times on a rising
temperature schedule); the response's dependency graph decides which
generated function implements the hole; that function and its reachable
helpers are spliced into the program under the hole's canonical name.
The user's sketch text is never altered beyond replacing hole calls with
calls to the canonical name.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field

from .callgraph import (Ambiguous, DependencyGraph, Epoch, FunctionNode, Named,
                        NamedMissing, Provenance, SingleEntry, build_graph,
                        referenced_names, resolve_hole_fill, topo_order)
from .errors import (DuplicateName, ExhaustedAttempts, ParseFailure,
                     SketchInvalid)
from .gateway import DEFAULT_MAX_TOKENS, ChatRequest, LlmGateway
from .prompts import SYSTEM_PROMPT, render_user_prompt
from .sketch import (AMBIENT_NAMES, AnplProgram, Hole, holes_in_order,
                     render, render_function, render_hole_stub,
                     restore_inline_calls, substitute_inline_calls,
                     validation_errors)

MAX_ATTEMPTS = 5
TEMPERATURE_STEP = 0.1

# Every compiled module starts with the same bindings the generated code
# was prompted against: numpy, typing helpers, and the ten grid colors.
PREAMBLE = (
    "import numpy as np\n"
    "from typing import *\n"
    "(black, blue, red, green, yellow, grey, pink, orange, teal, maroon) = range(10)"
)

FILL_MARKER = "# fill for {hole_id}"
RETAINED_MARKER = "# retained helpers from {hole_id}"


@dataclass(frozen=True)
class Filled:
    name: str


@dataclass(frozen=True)
class Rejected:
    reason: str


@dataclass(frozen=True)
class FillAttempt:
    hole_id: str
    attempt_index: int
    temperature: float
    prompt: tuple[str, str]
    response: str
    outcome: Filled | Rejected


@dataclass
class CompiledProgram:
    """A fully (or partially, on failure) compiled program."""

    anpl: AnplProgram
    target_source: str
    fill_map: dict[str, str]
    graph: DependencyGraph
    fill_sections: dict[str, str] = field(default_factory=dict)
    fill_nodes: dict[str, tuple[str, ...]] = field(default_factory=dict)
    fill_order: tuple[str, ...] = ()
    retained: tuple[tuple[str, str], ...] = ()  # (old hole id, section text)
    attempt_log: dict[str, list[FillAttempt]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "target_source": self.target_source,
            "fill_map": dict(self.fill_map),
            "fill_order": list(self.fill_order),
            "functions": sorted(self.graph.nodes),
        }


@dataclass
class PartialCompile:
    """Mutable accumulation of fills during one compile.

    extra_reserved lets the differential compiler pre-claim symbols that
    reused old fills will occupy, before those fills are appended.
    """

    anpl: AnplProgram
    fill_map: dict[str, str] = field(default_factory=dict)
    fill_sections: dict[str, str] = field(default_factory=dict)
    fill_nodes: dict[str, tuple[str, ...]] = field(default_factory=dict)
    order: list[str] = field(default_factory=list)
    extra_reserved: set[str] = field(default_factory=set)

    @classmethod
    def start(cls, anpl: AnplProgram) -> "PartialCompile":
        return cls(anpl=anpl)

    @classmethod
    def from_compiled(cls, compiled: CompiledProgram) -> "PartialCompile":
        return cls(anpl=compiled.anpl, fill_map=dict(compiled.fill_map),
                   fill_sections=dict(compiled.fill_sections),
                   fill_nodes=dict(compiled.fill_nodes),
                   order=list(compiled.fill_order))

    def context_code(self) -> str:
        return "\n\n".join(self.fill_sections[h] for h in self.order)

    def taken_names(self) -> set[str]:
        """Symbols a new fill must not clobber."""
        names = set(AMBIENT_NAMES)
        names |= self.anpl.function_names
        names |= {h.canonical_name for h in self.anpl.holes}
        names |= self.extra_reserved
        for node_names in self.fill_nodes.values():
            names |= set(node_names)
        return names


# ---------------------------------------------------------------------------
# response handling

_FENCE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


def extract_code(markdown_response: str) -> str:
    """Concatenated fenced code blocks, or the whole text if none."""
    blocks = [m.group(1).rstrip("\n") for m in _FENCE.finditer(markdown_response)]
    if not blocks:
        return markdown_response
    return "\n".join(blocks)


def apply_renames(def_source: str, renames: dict[str, str]) -> str:
    """Rename a function definition and its internal references.

    Parameters shadowing a renamed symbol keep their references intact
    (they refer to the parameter, not the module-level function).
    """
    module = ast.parse(def_source)
    fn = module.body[0]
    assert isinstance(fn, ast.FunctionDef)
    args = fn.args
    params = {a.arg for a in args.args + args.posonlyargs + args.kwonlyargs}
    for a in (args.vararg, args.kwarg):
        if a is not None:
            params.add(a.arg)
    effective = {old: new for old, new in renames.items() if old not in params}
    fn.name = renames.get(fn.name, fn.name)
    for node in ast.walk(fn):
        if isinstance(node, ast.Name) and node.id in effective:
            node.id = effective[node.id]
    return ast.unparse(module)


def _plan_renames(fill_order: list[str], entry: str, canonical: str,
                  reserved: set[str]) -> dict[str, str]:
    """Entry takes the canonical name; helpers dodge collisions with
    __v<k> suffixes. Reserved must not include the canonical name."""
    renames: dict[str, str] = {entry: canonical}
    taken = set(reserved) | {canonical}
    for name in fill_order:
        if name == entry:
            continue
        new = name
        if new in taken:
            k = 2
            while f"{name}__v{k}" in taken:
                k += 1
            new = f"{name}__v{k}"
        renames[name] = new
        taken.add(new)
    return renames


def splice_fill(partial: PartialCompile, hole: Hole,
                entry: str, fill_graph: DependencyGraph) -> str:
    """Add the resolved fill to the partial compile; returns the name the
    hole was bound to (always the hole's canonical name)."""
    canonical = hole.canonical_name
    reserved = partial.taken_names() - {canonical}
    order = topo_order(fill_graph)
    renames = _plan_renames(order, entry, canonical, reserved)
    sources = [apply_renames(fill_graph.nodes[name].source, renames)
               for name in order]
    partial.fill_map[hole.id] = canonical
    partial.fill_sections[hole.id] = "\n\n".join(sources)
    partial.fill_nodes[hole.id] = tuple(renames[name] for name in order)
    partial.order.append(hole.id)
    return canonical


def hole_stub(hole: Hole) -> str:
    return render_hole_stub(hole.canonical_name, hole.signature_params(),
                            hole.description)


def build_prompt(context_code: str, hole: Hole) -> tuple[str, str]:
    """(system, user) prompt pair for one hole against the code so far."""
    return SYSTEM_PROMPT, render_user_prompt(context_code, hole_stub(hole))


def fill_one(partial: PartialCompile, hole: Hole,
             llm: LlmGateway) -> list[FillAttempt]:
    """Fill one hole, retrying across the temperature schedule.

    Returns the attempt history (last entry Filled) or raises
    ExhaustedAttempts carrying all five rejected attempts.
    """
    attempts: list[FillAttempt] = []
    system_text, user_text = build_prompt(partial.context_code(), hole)
    for index in range(MAX_ATTEMPTS):
        temperature = round(TEMPERATURE_STEP * index, 10)
        req = ChatRequest(system_text=system_text, user_text=user_text,
                          temperature=temperature,
                          max_tokens=DEFAULT_MAX_TOKENS, n_completions=1)
        resp = llm.complete(req)
        raw = resp.completions[0]
        code = extract_code(raw)
        outcome: Filled | Rejected
        try:
            graph = build_graph(code)
        except (ParseFailure, DuplicateName) as exc:
            outcome = Rejected(str(exc))
        else:
            decision = resolve_hole_fill(hole, graph)
            if isinstance(decision, (Named, SingleEntry)):
                name = splice_fill(partial, hole, decision.node, decision.graph)
                outcome = Filled(name)
            elif isinstance(decision, NamedMissing):
                outcome = Rejected(f"no function named {decision.wanted} and "
                                   f"{len(decision.entries)} entry nodes")
            else:
                assert isinstance(decision, Ambiguous)
                outcome = Rejected(decision.reason)
        attempts.append(FillAttempt(hole_id=hole.id, attempt_index=index,
                                    temperature=temperature,
                                    prompt=(system_text, user_text),
                                    response=raw, outcome=outcome))
        if isinstance(outcome, Filled):
            return attempts
    raise ExhaustedAttempts(hole.id, attempts)


# ---------------------------------------------------------------------------
# assembly

def _site_map(partial: PartialCompile) -> dict[tuple[int, int], str]:
    sites: dict[tuple[int, int], str] = {}
    for hole in partial.anpl.holes:
        if hole.is_named or hole.id not in partial.fill_map:
            continue
        for call in hole.calls:
            sites[(call.line, call.col)] = partial.fill_map[hole.id]
    return sites


def sketch_chunks(partial: PartialCompile) -> list[str]:
    """Rendered sketch functions (hole calls substituted where filled)
    plus stubs for any still-unfilled named hole, in source order."""
    anpl = partial.anpl
    sites = _site_map(partial)
    chunks: list[str] = []
    for kind, name in anpl.order:
        if kind == "fn":
            fn = anpl.function(name)
            chunks.append(render_function(substitute_inline_calls(fn, sites)))
        elif name not in partial.fill_map:
            chunks.append(hole_stub(anpl.hole(name)))
    return chunks


def assemble(partial: PartialCompile,
             attempt_log: dict[str, list[FillAttempt]] | None = None,
             epochs: dict[str, Epoch] | None = None,
             retained: tuple[tuple[str, str], ...] = (),
             graph_override: DependencyGraph | None = None) -> CompiledProgram:
    """Deterministic layout: preamble, sketch functions in source order,
    then one marked section per fill in splice order."""
    anpl = partial.anpl
    chunks: list[str] = [PREAMBLE]
    node_specs: list[tuple[str, str, Provenance, Epoch]] = []

    for text in sketch_chunks(partial):
        name = ast.parse(text).body[0].name  # type: ignore[union-attr]
        chunks.append(text)
        node_specs.append((name, text, Provenance.USER, Epoch.NEW))

    for hole_id in partial.order:
        section = partial.fill_sections[hole_id]
        chunks.append(FILL_MARKER.format(hole_id=hole_id) + "\n" + section)
        epoch = (epochs or {}).get(hole_id, Epoch.NEW)
        for def_node in ast.parse(section).body:
            assert isinstance(def_node, ast.FunctionDef)
            node_specs.append((def_node.name, ast.unparse(def_node),
                               Provenance.LLM, epoch))

    for old_hole_id, section in retained:
        chunks.append(RETAINED_MARKER.format(hole_id=old_hole_id) + "\n" + section)
        for def_node in ast.parse(section).body:
            assert isinstance(def_node, ast.FunctionDef)
            node_specs.append((def_node.name, ast.unparse(def_node),
                               Provenance.LLM, Epoch.OLD))

    target_source = "\n\n".join(chunks) + "\n"
    if graph_override is not None:
        graph = graph_override
    else:
        all_names = {name for name, *_ in node_specs}
        nodes = []
        for name, text, prov, epoch in node_specs:
            fn_node = ast.parse(text).body[0]
            calls = frozenset(referenced_names(fn_node) & all_names)
            nodes.append(FunctionNode(name=name, source=text, provenance=prov,
                                      epoch=epoch, calls=calls))
        graph = DependencyGraph.from_nodes(nodes)

    return CompiledProgram(
        anpl=anpl, target_source=target_source,
        fill_map=dict(partial.fill_map), graph=graph,
        fill_sections=dict(partial.fill_sections),
        fill_nodes=dict(partial.fill_nodes),
        fill_order=tuple(partial.order), retained=tuple(retained),
        attempt_log=dict(attempt_log or {}))


def compile_program(anpl: AnplProgram, llm: LlmGateway) -> CompiledProgram:
    """Fill every hole in appearance order and emit the compiled module."""
    errors = validation_errors(anpl)
    if errors:
        raise SketchInvalid(errors)
    partial = PartialCompile.start(anpl)
    log: dict[str, list[FillAttempt]] = {}
    for hole in holes_in_order(anpl):
        try:
            log[hole.id] = fill_one(partial, hole, llm)
        except ExhaustedAttempts as exc:
            log[hole.id] = exc.attempts
            exc.partial = assemble(partial, log)
            raise
    return assemble(partial, log)


# ---------------------------------------------------------------------------
# sketch preservation

def revert_to_sketch(compiled: CompiledProgram) -> str:
    """Reconstruct sketch source from the compiled module's own text.

    Fill sections are dropped, calls to inline fills become hole calls
    again, and named-hole stubs are reinstated; the result must equal
    render(compiled.anpl) byte for byte.
    """
    anpl = compiled.anpl
    fill_names = {name for names in compiled.fill_nodes.values() for name in names}
    descriptions = {compiled.fill_map[h.id]: h.description
                    for h in anpl.holes
                    if not h.is_named and h.id in compiled.fill_map}
    sketch_defs: dict[str, ast.FunctionDef] = {}
    for node in ast.parse(compiled.target_source).body:
        if isinstance(node, ast.FunctionDef) and node.name not in fill_names:
            sketch_defs[node.name] = node

    chunks: list[str] = []
    for kind, name in anpl.order:
        if kind == "hole":
            hole = anpl.hole(name)
            chunks.append(render_hole_stub(hole.canonical_name,
                                           hole.declared_params or (),
                                           hole.description))
        else:
            node = restore_inline_calls(sketch_defs[name], descriptions)
            chunks.append(render_function(node))
    return "\n\n".join(chunks) + "\n"


def check_sketch_preserved(compiled: CompiledProgram) -> bool:
    return revert_to_sketch(compiled) == render(compiled.anpl)
