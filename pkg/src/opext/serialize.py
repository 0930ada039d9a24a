"""JSON encoding of matrices and result records.

Matrices are stored as ``{"rows": m, "cols": n, "data": [[[re, im], ...], ...]}``.
Floats are written with Python's shortest round-trip representation, so
``decode(encode(x))`` reproduces every double exactly.
"""

from __future__ import annotations

import dataclasses
import json
import math
import types
import typing
from enum import Enum
from pathlib import Path

import numpy as np

from .balls import OperatorBall, OperatorHole, hole_make
from .completion import DualPair, dual_pair_make
from .errors import OpExtError
from .matcore import Inertia, Tolerances


def matrix_to_json(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        A = A.reshape(1, -1) if A.ndim < 2 else A
    rows, cols = A.shape
    return {
        "rows": rows,
        "cols": cols,
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }


def _entry(e) -> complex:
    if isinstance(e, (list, tuple)):
        if len(e) != 2:
            raise OpExtError("matrix entries must be [re, im] pairs")
        re, im = e
    elif isinstance(e, (int, float)) and not isinstance(e, bool):
        re, im = e, 0.0
    else:
        raise OpExtError(f"bad matrix entry {e!r}")
    if isinstance(re, bool) or isinstance(im, bool):
        raise OpExtError(f"bad matrix entry {e!r}")
    z = complex(float(re), float(im))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise OpExtError("matrix entries must be finite")
    return z


def matrix_from_json(obj) -> np.ndarray:
    """Parse a matrix object; plain real entries are accepted as a convenience."""
    if not isinstance(obj, dict) or "data" not in obj:
        raise OpExtError("matrix object needs a 'data' field")
    data = obj["data"]
    if not isinstance(data, list):
        raise OpExtError("'data' must be a list of rows")
    rows = obj.get("rows", len(data))
    cols = obj.get("cols", len(data[0]) if data else 0)
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 0 or cols < 0:
        raise OpExtError("'rows' and 'cols' must be nonnegative integers")
    if len(data) != rows or any(not isinstance(r, list) or len(r) != cols for r in data):
        raise OpExtError(f"'data' does not have shape {rows} x {cols}")
    out = np.zeros((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        for j, e in enumerate(row):
            out[i, j] = _entry(e)
    return out


def is_matrix_json(obj) -> bool:
    return isinstance(obj, dict) and set(obj) == {"rows", "cols", "data"}


# ---------------------------------------------------------------------------
# generic encoding


def to_jsonable(x):
    """Convert dataclasses, arrays, enums and numpy scalars to JSON-ready values."""
    if isinstance(x, np.ndarray):
        if x.ndim == 2:
            return matrix_to_json(x)
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, DualPair):
        return pair_to_json(x)
    if isinstance(x, OperatorHole):
        return hole_to_json(x)
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: to_jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if isinstance(x, Inertia):
        return x._asdict()
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return x


def dumps(x) -> str:
    return json.dumps(to_jsonable(x), indent=2, sort_keys=False, allow_nan=False)


def _decode_value(tp, value):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if value is None:
        return None
    if tp is np.ndarray or (is_matrix_json(value) and tp is not dict):
        return matrix_from_json(value)
    if origin in (typing.Union, types.UnionType):
        for a in args:
            if a is type(None):
                continue
            try:
                return _decode_value(a, value)
            except (TypeError, ValueError, KeyError):
                continue
        return value
    if isinstance(tp, type) and issubclass(tp, Enum):
        return tp(value)
    if dataclasses.is_dataclass(tp):
        return decode(tp, value)
    if origin in (list, tuple) and isinstance(value, list):
        inner = args[0] if args else typing.Any
        items = [_decode_value(inner, v) for v in value]
        return tuple(items) if origin is tuple else items
    if tp is float and isinstance(value, str):
        return float(value)
    return value


def decode(cls, obj):
    """Rebuild a dataclass from the output of :func:`to_jsonable`."""
    if cls is DualPair:
        return pair_from_json(obj)
    if cls is OperatorHole:
        return hole_from_json(obj)
    if not isinstance(obj, dict):
        raise OpExtError(f"expected an object for {cls.__name__}")
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name in obj:
            kwargs[f.name] = _decode_value(hints.get(f.name, typing.Any), obj[f.name])
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# file formats for the domain objects


def pair_to_json(pair: DualPair) -> dict:
    return {k: matrix_to_json(getattr(pair, k)) for k in ("t11", "t21", "t12")}


def pair_from_json(obj, tol: Tolerances | None = None) -> DualPair:
    try:
        return dual_pair_make(*(matrix_from_json(obj[k]) for k in ("t11", "t21", "t12")), tol=tol)
    except (KeyError, TypeError) as exc:
        raise OpExtError(f"dual pair needs t11, t21 and t12 matrices ({exc})") from exc


def ball_to_json(ball: OperatorBall) -> dict:
    return to_jsonable(ball)


def ball_from_json(obj) -> OperatorBall:
    try:
        return OperatorBall(*(matrix_from_json(obj[k]) for k in ("center", "r_left", "r_right")))
    except (KeyError, TypeError) as exc:
        raise OpExtError(f"ball needs center, r_left and r_right ({exc})") from exc


def hole_to_json(hole: OperatorHole) -> dict:
    return {
        "c1": matrix_to_json(hole.ball_one.center),
        "c2": matrix_to_json(hole.ball_two.center),
        "r_left": matrix_to_json(hole.r_left),
        "r_right": matrix_to_json(hole.r_right),
    }


def hole_from_json(obj, tol: Tolerances | None = None) -> OperatorHole:
    try:
        return hole_make(*(matrix_from_json(obj[k]) for k in ("c1", "c2", "r_left", "r_right")), tol=tol)
    except (KeyError, TypeError) as exc:
        raise OpExtError(f"hole needs c1, c2, r_left and r_right ({exc})") from exc


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise OpExtError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise OpExtError(f"{path} is not valid JSON: {exc}") from exc
