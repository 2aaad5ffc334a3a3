"""IO-constrained resynthesis.

One request asks for a batch of candidate implementations; each candidate
is spliced into a scratch copy and its function is called directly on
every stored constraint. The first candidate (in generation order) that
satisfies them all replaces the hole's fill; nothing else in the program
changes.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field

from .callgraph import Ambiguous, Named, SingleEntry, build_graph, resolve_hole_fill
from .compiler import (CompiledProgram, PartialCompile, assemble, build_prompt,
                       extract_code, splice_fill, sketch_chunks)
from .errors import (DuplicateName, NoCandidatePasses, ParseFailure,
                     UnknownHole)
from .gateway import DEFAULT_MAX_TOKENS, ChatRequest, LlmGateway
from .harness import DEFAULT_TIMEOUT_MS, ExecRequest, Harness
from .values import decode_value, encode_value

RESYNTH_BATCH = 10
RESYNTH_TEMPERATURE = 0.8


@dataclass(frozen=True)
class IoConstraint:
    hole_id: str
    inputs: tuple
    expected_output: object

    def to_json(self) -> dict:
        return {"hole_id": self.hole_id,
                "input": [encode_value(v) for v in self.inputs],
                "expected_output": encode_value(self.expected_output)}

    @classmethod
    def from_json(cls, data: dict) -> "IoConstraint":
        return cls(hole_id=data["hole_id"],
                   inputs=tuple(decode_value(v) for v in data["input"]),
                   expected_output=decode_value(data["expected_output"]))

    def key(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


class ConstraintStore:
    """Per-hole constraint sets with set semantics and stable order."""

    def __init__(self):
        self._by_hole: dict[str, list[IoConstraint]] = {}
        self._seen: set[str] = set()

    def add(self, program_holes, constraint: IoConstraint) -> None:
        if not any(h.id == constraint.hole_id for h in program_holes):
            raise UnknownHole(f"no hole named {constraint.hole_id}")
        if constraint.key() in self._seen:
            return
        self._seen.add(constraint.key())
        self._by_hole.setdefault(constraint.hole_id, []).append(constraint)

    def for_hole(self, hole_id: str) -> list[IoConstraint]:
        return list(self._by_hole.get(hole_id, []))

    def drop_hole(self, hole_id: str) -> None:
        for c in self._by_hole.pop(hole_id, []):
            self._seen.discard(c.key())

    def to_json(self) -> dict:
        return {hole_id: [c.to_json() for c in cs]
                for hole_id, cs in self._by_hole.items()}


@dataclass(frozen=True)
class CandidateResult:
    candidate_index: int
    constraint_index: int
    status: str  # "pass" | "fail" | "error"
    detail: str = ""

    def to_json(self) -> dict:
        return {"candidate_index": self.candidate_index,
                "constraint_index": self.constraint_index,
                "status": self.status, "detail": self.detail}


@dataclass
class CandidateReport:
    n_candidates: int
    results: list[CandidateResult] = field(default_factory=list)
    selected: int | None = None

    def to_json(self) -> dict:
        return {"n_candidates": self.n_candidates, "selected": self.selected,
                "results": [r.to_json() for r in self.results]}


def _scratch_without(program: CompiledProgram, hole_id: str) -> PartialCompile:
    partial = PartialCompile.from_compiled(program)
    partial.fill_map.pop(hole_id, None)
    partial.fill_sections.pop(hole_id, None)
    partial.fill_nodes.pop(hole_id, None)
    partial.order = [h for h in partial.order if h != hole_id]
    # candidates must also dodge helpers living in retained sections
    for _, section in program.retained:
        for node in ast.parse(section).body:
            if isinstance(node, ast.FunctionDef):
                partial.extra_reserved.add(node.name)
    return partial


def _evaluate_candidate(scratch: CompiledProgram, fill_name: str,
                        constraints, harness: Harness,
                        timeout_ms: int) -> list[tuple[str, str]]:
    """(status, detail) per constraint, calling the fill directly."""
    outcomes: list[tuple[str, str]] = []
    for constraint in constraints:
        req = ExecRequest(source=scratch.target_source, entry=fill_name,
                          args=tuple(encode_value(v) for v in constraint.inputs),
                          timeout_ms=timeout_ms)
        result = harness.run(req)
        if result.status == "timeout":
            outcomes.append(("error", "Timeout"))
        elif result.status == "fault":
            lines = result.traceback_text.strip().splitlines()
            outcomes.append(("error", lines[-1] if lines else "fault"))
        elif decode_value(result.output) == constraint.expected_output:
            outcomes.append(("pass", ""))
        else:
            outcomes.append(("fail", f"got {json.dumps(result.output)[:200]}"))
    return outcomes


def resynthesize(program: CompiledProgram, hole_id: str, llm: LlmGateway,
                 harness: Harness, constraints: list[IoConstraint],
                 timeout_ms: int = DEFAULT_TIMEOUT_MS
                 ) -> tuple[CompiledProgram, CandidateReport]:
    """One batched request; splice the first candidate satisfying every
    constraint. Raises NoCandidatePasses (report attached) otherwise."""
    if not program.anpl.has_hole(hole_id):
        raise UnknownHole(f"no hole named {hole_id}")
    if not constraints:
        raise ValueError(f"no constraints stored for {hole_id}")
    hole = program.anpl.hole(hole_id)

    base = _scratch_without(program, hole_id)
    context = "\n\n".join(sketch_chunks(base) + [base.context_code()]
                          + [text for _, text in program.retained])
    system_text, user_text = build_prompt(context.rstrip(), hole)
    req = ChatRequest(system_text=system_text, user_text=user_text,
                      temperature=RESYNTH_TEMPERATURE,
                      max_tokens=DEFAULT_MAX_TOKENS,
                      n_completions=RESYNTH_BATCH)
    resp = llm.complete(req)

    report = CandidateReport(n_candidates=len(resp.completions))
    original_order = list(program.fill_order)
    for index, completion in enumerate(resp.completions):
        code = extract_code(completion)
        try:
            graph = build_graph(code)
            decision = resolve_hole_fill(hole, graph)
        except (ParseFailure, DuplicateName) as exc:
            decision = Ambiguous(reason=str(exc))
        if not isinstance(decision, (Named, SingleEntry)):
            reason = getattr(decision, "reason", None) or \
                f"unresolved: {type(decision).__name__}"
            for ci in range(len(constraints)):
                report.results.append(CandidateResult(index, ci, "error", reason))
            continue

        scratch_partial = _scratch_without(program, hole_id)
        fill_name = splice_fill(scratch_partial, hole, decision.node,
                                decision.graph)
        scratch_partial.order = [h for h in original_order
                                 if h in scratch_partial.fill_sections]
        scratch = assemble(scratch_partial, program.attempt_log,
                           retained=program.retained)
        outcomes = _evaluate_candidate(scratch, fill_name, constraints,
                                       harness, timeout_ms)
        for ci, (status, detail) in enumerate(outcomes):
            report.results.append(CandidateResult(index, ci, status, detail))
        if all(status == "pass" for status, _ in outcomes):
            report.selected = index
            return scratch, report

    raise NoCandidatePasses(report)
