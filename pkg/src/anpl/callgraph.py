"""Provenance-tagged dependency graphs over generated functions.

Nodes are top-level function definitions; an edge (f, g) exists when g's
name is referenced anywhere in f's body, including a bare reference
passed as a call argument (which is how indirect recursion is wired).
"""

from __future__ import annotations

import ast
import heapq
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import CyclicGraph, DuplicateName, ParseFailure, UnknownRoot
from .sketch import Hole


class Provenance(Enum):
    USER = "user"
    LLM = "llm"


class Epoch(Enum):
    OLD = "old"
    NEW = "new"


@dataclass(frozen=True)
class FunctionNode:
    name: str
    source: str
    provenance: Provenance
    epoch: Epoch
    calls: frozenset[str]

    def retag(self, provenance: Provenance | None = None,
              epoch: Epoch | None = None) -> "FunctionNode":
        return replace(self, provenance=provenance or self.provenance,
                       epoch=epoch or self.epoch)


@dataclass(frozen=True)
class DependencyGraph:
    nodes: dict[str, FunctionNode] = field(default_factory=dict)
    edges: frozenset[tuple[str, str]] = frozenset()

    @classmethod
    def from_nodes(cls, nodes) -> "DependencyGraph":
        by_name = {n.name: n for n in nodes}
        edges = frozenset((n.name, callee) for n in by_name.values()
                          for callee in n.calls if callee in by_name)
        return cls(nodes=by_name, edges=edges)

    @property
    def names(self) -> set[str]:
        return set(self.nodes)

    def successors(self, name: str) -> set[str]:
        return {v for (u, v) in self.edges if u == name}

    def __contains__(self, name: str) -> bool:
        return name in self.nodes


def referenced_names(fn: ast.FunctionDef) -> set[str]:
    """Names loaded anywhere in the body, minus parameter shadows."""
    shadowed = set()
    for node in ast.walk(fn):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.Lambda)):
            args = node.args
            for a in args.args + args.posonlyargs + args.kwonlyargs:
                shadowed.add(a.arg)
            for a in (args.vararg, args.kwarg):
                if a is not None:
                    shadowed.add(a.arg)
    return {node.id for node in ast.walk(fn)
            if isinstance(node, ast.Name) and isinstance(node.ctx, ast.Load)
            and node.id not in shadowed}


def build_graph(source: str, provenance: Provenance = Provenance.LLM,
                epoch: Epoch = Epoch.NEW) -> DependencyGraph:
    """One node per top-level def; non-def statements are ignored."""
    try:
        module = ast.parse(source)
    except SyntaxError as exc:
        raise ParseFailure(f"generated code does not parse: {exc.msg} "
                           f"(line {exc.lineno})") from None
    defs = [n for n in module.body if isinstance(n, ast.FunctionDef)]
    if not defs:
        raise ParseFailure("no top-level function definition found")
    names = [d.name for d in defs]
    for name in names:
        if names.count(name) > 1:
            raise DuplicateName(f"function {name} defined more than once")
    top = set(names)
    nodes = [FunctionNode(name=d.name, source=ast.unparse(d),
                          provenance=provenance, epoch=epoch,
                          calls=frozenset(referenced_names(d) & top))
             for d in defs]
    return DependencyGraph.from_nodes(nodes)


def entry_nodes(g: DependencyGraph) -> set[str]:
    """Names with no incoming edge from another node (self-edges ignored)."""
    called = {v for (u, v) in g.edges if u != v}
    return set(g.nodes) - called


def find_cycle(g: DependencyGraph) -> list[str] | None:
    """A cycle among >= 2 distinct nodes, or None. Self-edges don't count."""
    color: dict[str, int] = {}
    stack: list[str] = []

    def visit(u: str) -> list[str] | None:
        color[u] = 1
        stack.append(u)
        for v in sorted(g.successors(u)):
            if v == u:
                continue
            if color.get(v) == 1:
                return stack[stack.index(v):]
            if color.get(v, 0) == 0:
                found = visit(v)
                if found:
                    return found
        stack.pop()
        color[u] = 2
        return None

    for name in sorted(g.nodes):
        if color.get(name, 0) == 0:
            found = visit(name)
            if found:
                return found
    return None


def topo_order(g: DependencyGraph) -> list[str]:
    """Callers before callees; ties broken by name. Raises CyclicGraph."""
    cycle = find_cycle(g)
    if cycle:
        raise CyclicGraph(cycle)
    indegree = {name: 0 for name in g.nodes}
    for (u, v) in g.edges:
        if u != v:
            indegree[v] += 1
    heap = sorted(name for name, deg in indegree.items() if deg == 0)
    heapq.heapify(heap)
    out: list[str] = []
    while heap:
        u = heapq.heappop(heap)
        out.append(u)
        for v in sorted(g.successors(u)):
            if v == u:
                continue
            indegree[v] -= 1
            if indegree[v] == 0:
                heapq.heappush(heap, v)
    return out


def prune_reachable(g: DependencyGraph, root: str) -> DependencyGraph:
    if root not in g.nodes:
        raise UnknownRoot(f"{root} is not in the graph")
    keep: set[str] = set()
    frontier = [root]
    while frontier:
        u = frontier.pop()
        if u in keep:
            continue
        keep.add(u)
        frontier.extend(v for v in g.nodes[u].calls if v in g.nodes)
    return DependencyGraph(
        nodes={n: g.nodes[n] for n in keep},
        edges=frozenset((u, v) for (u, v) in g.edges if u in keep and v in keep))


# --- hole resolution -------------------------------------------------------

@dataclass(frozen=True)
class Named:
    """The hole's own name matched a generated function."""
    node: str
    graph: DependencyGraph


@dataclass(frozen=True)
class SingleEntry:
    """Exactly one entry node; it implements the hole."""
    node: str
    graph: DependencyGraph


@dataclass(frozen=True)
class Ambiguous:
    """No single implementation can be identified; regenerate."""
    reason: str
    entries: frozenset[str] = frozenset()


@dataclass(frozen=True)
class NamedMissing:
    """The user-chosen name is absent and entry count gives no fallback."""
    wanted: str
    entries: frozenset[str] = frozenset()


FillDecision = Named | SingleEntry | Ambiguous | NamedMissing


def resolve_hole_fill(hole: Hole, g: DependencyGraph) -> FillDecision:
    """Decide which generated function implements the hole.

    Name match wins; otherwise a unique entry node; otherwise the response
    is ambiguous. A named hole whose name is missing falls back to the
    unique-entry rule (models renamed, which the prompt invites) before
    reporting NamedMissing.
    """
    entries = entry_nodes(g)

    def pruned_or_ambiguous(root: str, make):
        sub = prune_reachable(g, root)
        cycle = find_cycle(sub)
        if cycle:
            return Ambiguous(reason=f"cycle among {sorted(cycle)}",
                             entries=frozenset(entries))
        return make(root, sub)

    if hole.user_name and hole.user_name in g.nodes:
        return pruned_or_ambiguous(hole.user_name, Named)
    if len(entries) == 1:
        return pruned_or_ambiguous(next(iter(entries)), SingleEntry)
    if hole.user_name:
        return NamedMissing(wanted=hole.user_name, entries=frozenset(entries))
    reason = "multiple entry nodes" if entries else "no entry node"
    return Ambiguous(reason=reason, entries=frozenset(entries))


def to_dot(g: DependencyGraph) -> str:
    """Graphviz dump; node labels carry the provenance/epoch tag."""
    lines = ["digraph deps {"]
    for name in sorted(g.nodes):
        node = g.nodes[name]
        label = f"{name}\\n({node.provenance.value},{node.epoch.value})"
        lines.append(f'  "{name}" [label="{label}"];')
    for (u, v) in sorted(g.edges):
        lines.append(f'  "{u}" -> "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
