"""Sketch programs with natural-language holes, compiled by an LLM.

The sketch (control/data flow) is authored directly and provably survives
compilation; holes are compiled to Python functions, edited
differentially, traced, and resynthesized under IO constraints.
"""

from .arc import ArcTask, Grid, Verdict, check, grids_equal, load_task
from .callgraph import (Ambiguous, DependencyGraph, Epoch, FunctionNode,
                        Named, NamedMissing, Provenance, SingleEntry,
                        build_graph, entry_nodes, prune_reachable,
                        resolve_hole_fill, to_dot, topo_order)
from .compiler import (CompiledProgram, FillAttempt, PREAMBLE, build_prompt,
                       compile_program, extract_code, fill_one,
                       revert_to_sketch)
from .diffcompile import EditDelta, compile_diff, diff, merge
from .edits import (Abstract, Decompose, EditDescription, EditOp, EditSketch,
                    apply_edit_op)
from .errors import AnplError
from .gateway import (ChatRequest, ChatResponse, HttpGateway, RecordingGateway,
                      ReplayGateway, RuleGateway, ScriptedGateway, rule)
from .harness import (ExecRequest, ExecResult, SubprocessHarness, TraceEvent,
                      TranscriptHarness, default_harness)
from .resynth import ConstraintStore, IoConstraint, resynthesize
from .session import Session, export_log, replay
from .sketch import (AnplProgram, Diagnostic, Hole, holes_in_order, parse,
                     render, validate_sketch)

__all__ = [name for name in dir() if not name.startswith("_")]
