"""Differential compilation: recompile only what the edit touched.

Unchanged holes keep their compiled bytes (zero LLM traffic); changed and
new holes are filled fresh. Where old and new graphs offer a node for the
same name, the winner follows the intention priority

    user-current > user-previous > llm-previous > llm-current

so an untouched hole's previously generated code always beats a fresh
regeneration, while anything the user just wrote wins outright.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field, replace

from .callgraph import (DependencyGraph, Epoch, FunctionNode, Provenance,
                        prune_reachable, referenced_names)
from .compiler import (CompiledProgram, FillAttempt, PartialCompile, apply_renames,
                       assemble, fill_one, sketch_chunks)
from .errors import MergeConflict, SketchInvalid
from .gateway import LlmGateway
from .sketch import AnplProgram, Hole, holes_in_order, validation_errors

_RANK = {
    (Provenance.USER, Epoch.NEW): 4,
    (Provenance.USER, Epoch.OLD): 3,
    (Provenance.LLM, Epoch.OLD): 2,
    (Provenance.LLM, Epoch.NEW): 1,
}


def rank(node: FunctionNode) -> int:
    return _RANK[(node.provenance, node.epoch)]


@dataclass(frozen=True)
class EditDelta:
    changed_holes: frozenset[str]  # ids in the new program
    new_holes: frozenset[str]      # ids in the new program
    removed_holes: frozenset[str]  # ids in the old program
    sketch_changed: dict[str, bool] = field(default_factory=dict)
    matches: dict[str, str] = field(default_factory=dict)  # new id -> old id

    @property
    def is_empty(self) -> bool:
        return (not self.changed_holes and not self.new_holes
                and not self.removed_holes
                and not any(self.sketch_changed.values()))

    def to_json(self) -> dict:
        return {"changed": sorted(self.changed_holes),
                "new": sorted(self.new_holes),
                "removed": sorted(self.removed_holes),
                "sketch_changed": sorted(n for n, c in self.sketch_changed.items() if c)}


def _masked_dump(fn_node: ast.FunctionDef) -> str:
    """Function structure with inline hole text blanked, so a description
    edit does not read as a sketch change."""
    import copy
    node = copy.deepcopy(fn_node)
    for sub in ast.walk(node):
        if (isinstance(sub, ast.Call) and isinstance(sub.func, ast.Constant)
                and isinstance(sub.func.value, str)):
            sub.func = ast.Constant(value="\x00hole")
    return ast.dump(node, include_attributes=False)


def _inline_keys(program: AnplProgram) -> dict[tuple[str, int], Hole]:
    """Inline holes keyed by (enclosing function, occurrence index)."""
    inline = {h.position: h for h in program.holes if not h.is_named}
    keyed: dict[tuple[str, int], Hole] = {}
    for fn in program.functions:
        count = 0
        for sub in ast.walk(fn.node):
            if (isinstance(sub, ast.Call) and isinstance(sub.func, ast.Constant)
                    and isinstance(sub.func.value, str)):
                hole = inline.get((sub.lineno, sub.col_offset))
                if hole is not None:
                    keyed[(fn.name, count)] = hole
                    count += 1
    return keyed


def _hole_signature(hole: Hole) -> tuple:
    if hole.is_named:
        return (hole.description, hole.declared_params)
    call = hole.calls[0] if hole.calls else None
    return (hole.description, call.input_vars if call else ())


def diff(old_anpl: AnplProgram, new_anpl: AnplProgram) -> EditDelta:
    """Match holes across an edit: named holes by name, inline holes by
    their structural slot (enclosing function, occurrence index)."""
    changed: set[str] = set()
    new_ids: set[str] = set()
    removed: set[str] = set()
    matches: dict[str, str] = {}

    old_named = {h.user_name: h for h in old_anpl.holes if h.is_named}
    new_named = {h.user_name: h for h in new_anpl.holes if h.is_named}
    for name, hole in new_named.items():
        old = old_named.get(name)
        if old is None:
            new_ids.add(hole.id)
            continue
        matches[hole.id] = old.id
        if _hole_signature(hole) != _hole_signature(old):
            changed.add(hole.id)
    removed |= {h.id for name, h in old_named.items() if name not in new_named}

    old_inline = _inline_keys(old_anpl)
    new_inline = _inline_keys(new_anpl)
    for key, hole in new_inline.items():
        old = old_inline.get(key)
        if old is None:
            new_ids.add(hole.id)
            continue
        matches[hole.id] = old.id
        if _hole_signature(hole) != _hole_signature(old):
            changed.add(hole.id)
    removed |= {h.id for key, h in old_inline.items() if key not in new_inline}

    sketch_changed: dict[str, bool] = {}
    old_fns = {fn.name: fn for fn in old_anpl.functions}
    new_fns = {fn.name: fn for fn in new_anpl.functions}
    for name in old_fns.keys() | new_fns.keys():
        if name in old_fns and name in new_fns:
            sketch_changed[name] = (_masked_dump(old_fns[name].node)
                                    != _masked_dump(new_fns[name].node))
        else:
            sketch_changed[name] = True

    return EditDelta(changed_holes=frozenset(changed),
                     new_holes=frozenset(new_ids),
                     removed_holes=frozenset(removed),
                     sketch_changed=sketch_changed, matches=matches)


# ---------------------------------------------------------------------------
# graph merging

def merge(old_g: DependencyGraph, new_g: DependencyGraph) -> DependencyGraph:
    """Merge two tagged graphs under the intention priority.

    Shared names keep the higher-ranked node; equal-rank nodes must be
    identical (upstream splicing renames genuinely distinct ones).
    The result is pruned to what `main` reaches, when main exists.
    """
    winners: dict[str, FunctionNode] = {}
    for name in old_g.names | new_g.names:
        a = old_g.nodes.get(name)
        b = new_g.nodes.get(name)
        if a is not None and b is not None:
            if rank(a) > rank(b):
                winners[name] = a
            elif rank(b) > rank(a):
                winners[name] = b
            elif a.source == b.source:
                winners[name] = a
            else:
                raise MergeConflict(f"distinct nodes named {name} share rank "
                                    f"{rank(a)}")
        else:
            winners[name] = a if a is not None else b  # type: ignore[assignment]

    names = set(winners)
    nodes = [replace(node,
                     calls=frozenset(
                         referenced_names(ast.parse(node.source).body[0]) & names))
             for node in winners.values()]
    merged = DependencyGraph.from_nodes(nodes)
    if "main" in merged.nodes:
        merged = prune_reachable(merged, "main")
    return merged


# ---------------------------------------------------------------------------
# differential compile

def _split_defs(section: str) -> list[tuple[str, str]]:
    return [(node.name, ast.unparse(node))
            for node in ast.parse(section).body
            if isinstance(node, ast.FunctionDef)]


def _rename_section(section: str, node_names: tuple[str, ...],
                    old_entry: str, new_entry: str,
                    reserved: set[str]) -> tuple[str, tuple[str, ...]]:
    """Mechanically rebind a reused fill whose canonical label shifted
    (an auto-label renumbering); no LLM involvement."""
    renames: dict[str, str] = {old_entry: new_entry}
    taken = (reserved - set(node_names)) | {new_entry}
    for name in node_names:
        if name == old_entry:
            continue
        new = name
        if new in taken:
            k = 2
            while f"{name}__v{k}" in taken:
                k += 1
            new = f"{name}__v{k}"
        renames[name] = new
        taken.add(new)
    parts = [apply_renames(src, renames) for _, src in _split_defs(section)]
    return "\n\n".join(parts), tuple(renames[n] for n in node_names)


def compile_diff(old: CompiledProgram, new_anpl: AnplProgram,
                 llm: LlmGateway) -> CompiledProgram:
    """Recompile only changed/new holes; reuse everything else byte-for-byte.

    Old helpers orphaned by the edit survive in "retained" sections while
    anything still references them; the final graph is pruned to main.
    """
    errors = validation_errors(new_anpl)
    if errors:
        raise SketchInvalid(errors)
    delta = diff(old.anpl, new_anpl)

    new_holes = holes_in_order(new_anpl)
    refill_ids = {h.id for h in new_holes
                  if h.id in delta.changed_holes or h.id in delta.new_holes}
    refill_canonicals = {h.canonical_name for h in new_holes if h.id in refill_ids}

    partial = PartialCompile.start(new_anpl)
    # every surviving old symbol is off-limits for fresh fills
    partial.extra_reserved = set(old.graph.nodes) - refill_canonicals

    log: dict[str, list[FillAttempt]] = {}
    epochs: dict[str, Epoch] = {}
    for hole in new_holes:
        if hole.id not in refill_ids and hole.id in delta.matches:
            old_id = delta.matches[hole.id]
            section = old.fill_sections[old_id]
            node_names = old.fill_nodes[old_id]
            old_canonical = old.fill_map[old_id]
            if old_canonical != hole.canonical_name:
                section, node_names = _rename_section(
                    section, node_names, old_canonical, hole.canonical_name,
                    partial.taken_names())
            partial.fill_map[hole.id] = hole.canonical_name
            partial.fill_sections[hole.id] = section
            partial.fill_nodes[hole.id] = node_names
            partial.order.append(hole.id)
            epochs[hole.id] = Epoch.OLD
        else:
            log[hole.id] = fill_one(partial, hole, llm)
            epochs[hole.id] = Epoch.NEW

    retained = _retained_sections(old, new_anpl, delta, partial)
    compiled = assemble(partial, log, epochs=epochs, retained=retained)
    if "main" in compiled.graph.nodes:
        compiled.graph = prune_reachable(compiled.graph, "main")
    return compiled


def _retained_sections(old: CompiledProgram, new_anpl: AnplProgram,
                       delta: EditDelta,
                       partial: PartialCompile) -> tuple[tuple[str, str], ...]:
    """Old nodes whose owning hole went away but that something still calls.

    Candidates: nodes of changed holes' fills (minus the superseded entry),
    nodes of removed holes' fills, and sketch functions the user deleted.
    A candidate survives when reachable from main in the merged module.
    """
    changed_old_ids = {delta.matches[nid] for nid in delta.changed_holes}
    candidates: dict[str, FunctionNode] = {}
    owners: list[tuple[str, list[str]]] = []

    for old_id in old.fill_order:
        if old_id in changed_old_ids or old_id in delta.removed_holes:
            names = []
            for name in old.fill_nodes[old_id]:
                if old_id in changed_old_ids and name == old.fill_map[old_id]:
                    continue  # the fresh fill owns this name now
                if name in old.graph.nodes:
                    candidates[name] = old.graph.nodes[name]
                    names.append(name)
            if names:
                owners.append((old_id, names))

    deleted_fns = sorted(old.anpl.function_names - new_anpl.function_names)
    for name in deleted_fns:
        if name in old.graph.nodes:
            candidates[name] = old.graph.nodes[name]
            owners.append((name, [name]))

    if not candidates:
        return ()

    # reachability over new sketch + current sections + candidates
    sources: dict[str, str] = {name: node.source for name, node in candidates.items()}
    for text in sketch_chunks(partial):
        node = ast.parse(text).body[0]
        sources[node.name] = text  # type: ignore[union-attr]
    for hole_id in partial.order:
        for name, src in _split_defs(partial.fill_sections[hole_id]):
            sources[name] = src
    names = set(sources)
    calls = {name: referenced_names(ast.parse(src).body[0]) & names
             for name, src in sources.items()}
    reachable: set[str] = set()
    frontier = ["main"] if "main" in names else []
    while frontier:
        u = frontier.pop()
        if u in reachable:
            continue
        reachable.add(u)
        frontier.extend(calls[u])

    out: list[tuple[str, str]] = []
    for label, names_for_owner in owners:
        kept = [n for n in names_for_owner if n in reachable]
        if kept:
            out.append((label, "\n\n".join(candidates[n].source for n in kept)))
    return tuple(out)
