"""Matrix JSON codec: ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` in row-major order."""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import InvalidInputError


def matrix_to_json(m) -> dict[str, Any]:
    """Encode a matrix (or a 1-D vector, as an ``n x 1`` column)."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidInputError(f"cannot encode array of shape {arr.shape}")
    rows, cols = arr.shape
    data = [[float(z.real), float(z.imag)] for z in arr.ravel()]
    return {"rows": int(rows), "cols": int(cols), "data": data}


def matrix_from_json(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise InvalidInputError("matrix JSON must be an object with rows, cols and data")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise InvalidInputError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise InvalidInputError(f"expected {rows * cols} entries, got {len(data) if isinstance(data, list) else 'none'}")
    try:
        flat = np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed matrix entry: {exc}") from exc
    return flat.reshape(rows, cols)


def vector_from_json(obj: Any) -> np.ndarray:
    m = matrix_from_json(obj)
    if m.shape[1] != 1:
        raise InvalidInputError(f"expected a column vector, got shape {m.shape}")
    return m[:, 0]


def dumps(obj: Any) -> str:
    """Pretty, key-sorted JSON, so equal reports are byte-identical."""
    return json.dumps(obj, indent=2, sort_keys=True)
