"""Exception types shared across the package.

Everything raised on purpose derives from AnplError so callers (CLI,
HTTP service) can map failures to diagnostics uniformly.
"""

from __future__ import annotations


class AnplError(Exception):
    """Base class for all errors raised by this package."""


# --- sketch parsing / validation ---

class AnplSyntaxError(AnplError):
    """Source text is outside the sketch grammar or malformed."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class EmptyDescription(AnplSyntaxError):
    """A hole was written with blank description text."""


class MissingMain(AnplError):
    """The program defines no `main` function."""


class SketchInvalid(AnplError):
    """Dataflow validation produced error-severity diagnostics."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics) or "invalid sketch")
        self.diagnostics = list(diagnostics)


# --- dependency graphs ---

class ParseFailure(AnplError):
    """Generated code yields no parseable top-level function."""


class DuplicateName(AnplError):
    """Two top-level functions share one name."""


class CyclicGraph(AnplError):
    """Topological order requested on a graph with a multi-node cycle."""

    def __init__(self, cycle):
        super().__init__(f"cycle among {sorted(cycle)}")
        self.cycle = frozenset(cycle)


class UnknownRoot(AnplError):
    """Reachability pruning asked for a node absent from the graph."""


# --- compiling ---

class ExhaustedAttempts(AnplError):
    """All retry attempts for one hole were rejected."""

    def __init__(self, hole_id: str, attempts, partial=None):
        super().__init__(f"no usable completion for {hole_id} after {len(attempts)} attempts")
        self.hole_id = hole_id
        self.attempts = list(attempts)
        self.partial = partial


class MergeConflict(AnplError):
    """Two distinct nodes share a name and a priority rank."""


# --- gateway ---

class GatewayError(AnplError):
    """Base for chat-completion transport failures."""


class Timeout(GatewayError):
    pass


class RateLimited(GatewayError):
    def __init__(self, retry_after: float | None = None):
        super().__init__(f"rate limited (retry after {retry_after}s)")
        self.retry_after = retry_after


class ProviderError(GatewayError):
    def __init__(self, status: int, body: str):
        super().__init__(f"provider returned {status}")
        self.status = status
        self.body = body


class ScriptMiss(GatewayError):
    """A scripted/replay gateway has no entry for this request."""

    def __init__(self, fingerprint: str):
        super().__init__(f"no scripted response for fingerprint {fingerprint}")
        self.fingerprint = fingerprint


# --- execution harness ---

class HarnessUnavailable(AnplError):
    """No execution backend is configured or reachable."""


class RuntimeFault(AnplError):
    """Executed program raised; carries the target-language traceback."""

    def __init__(self, traceback_text: str):
        super().__init__(traceback_text.strip().splitlines()[-1] if traceback_text.strip() else "fault")
        self.traceback_text = traceback_text


class ExecutionTimeout(AnplError):
    """Executed program exceeded its wall-clock budget."""


# --- resynthesis / constraints ---

class UnknownHole(AnplError):
    pass


class NoCandidatePasses(AnplError):
    """Every resynthesis candidate failed at least one stored constraint."""

    def __init__(self, report):
        super().__init__("no candidate satisfies all constraints")
        self.report = report


# --- ARC tasks ---

class SchemaError(AnplError):
    """Task JSON does not match the expected layout."""


class CellRange(AnplError):
    def __init__(self, value: int, row: int, col: int):
        super().__init__(f"cell value {value} out of range at ({row}, {col})")
        self.value = value
        self.row = row
        self.col = col


class DimRange(AnplError):
    def __init__(self, height: int, width: int):
        super().__init__(f"grid dimensions {height}x{width} out of range")
        self.height = height
        self.width = width


# --- session log ---

class CsvSchema(AnplError):
    """Session log CSV is malformed or uses an unknown action."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(f"row {row}: {message}" if row is not None else message)
        self.row = row
