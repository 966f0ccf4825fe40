"""JSON wire formats.

Matrix: ``{"rows": R, "cols": C, "data": [[re, im], ...]}`` in row-major order.
Tuple: a JSON array of matrices (optionally wrapped as ``{"tuple": [...]}``).
Product decomposition: ``{"terms": [{"weight": w, "xi": matrix, "eta": matrix}, ...]}``.
"""

import json
import math

import numpy as np

from .errors import ValidationError


def matrix_to_json(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj):
    try:
        rows = obj["rows"]
        cols = obj["cols"]
        data = obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"matrix JSON needs rows, cols and data: {exc}") from exc
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 0 or cols < 0:
        raise ValidationError("rows and cols must be non-negative integers")
    if len(data) != rows * cols:
        raise ValidationError(f"data has {len(data)} entries, expected {rows * cols}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for k, pair in enumerate(data):
        if len(pair) != 2:
            raise ValidationError(f"entry {k} is not a [re, im] pair")
        re, im = float(pair[0]), float(pair[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValidationError(f"entry {k} is not finite")
        out[k] = complex(re, im)
    return out.reshape(rows, cols)


def tuple_to_json(components):
    return [matrix_to_json(c) for c in components]


def tuple_from_json(obj):
    if isinstance(obj, dict) and "tuple" in obj:
        obj = obj["tuple"]
    if not isinstance(obj, list) or not obj:
        raise ValidationError("tuple JSON must be a non-empty array of matrices")
    mats = [matrix_from_json(o) for o in obj]
    if len({m.shape for m in mats}) != 1:
        raise ValidationError("tuple components must share a common shape")
    return np.stack(mats)


def _reject_constant(name):
    raise ValidationError(f"non-finite JSON constant {name}")


def load_json(path):
    with open(path) as fh:
        return json.load(fh, parse_constant=_reject_constant)


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)
