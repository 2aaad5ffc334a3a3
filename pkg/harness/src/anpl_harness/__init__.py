"""Isolated executor for generated grid programs.

Protocol: one JSON request on stdin, one JSON result line on stdout,
process exits. The caller enforces the wall-clock timeout by killing the
process; a fresh process per request means no state ever crosses runs.
"""

from .runner import execute, main

__all__ = ["execute", "main"]
