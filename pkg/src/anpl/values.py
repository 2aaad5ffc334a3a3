"""Wire encoding for values crossing the execution-harness boundary.

Grids travel as nested lists of ints, scalars as JSON scalars, tuples as
``{"t": [...]}``. Anything else degrades to ``{"r": repr(...)}`` so trace
snapshots stay renderable. The encoding is lossless for the value kinds
the system promises to round-trip (grids, scalars, lists, tuples).
"""

from __future__ import annotations

import numpy as np


def encode_value(value):
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return encode_value(value.tolist())
    if isinstance(value, tuple):
        return {"t": [encode_value(v) for v in value]}
    if isinstance(value, list):
        return [encode_value(v) for v in value]
    return {"r": repr(value)}


def decode_value(value):
    if isinstance(value, dict):
        if set(value) == {"t"}:
            return tuple(decode_value(v) for v in value["t"])
        return value
    if isinstance(value, list):
        return [decode_value(v) for v in value]
    return value


def is_grid(value) -> bool:
    """A rectangular, non-empty 2-D nested list of plain ints."""
    if not isinstance(value, list) or not value:
        return False
    if not all(isinstance(row, list) and row for row in value):
        return False
    width = len(value[0])
    return all(len(row) == width
               and all(type(cell) is int for cell in row)
               for row in value)
