"""JSON problem and solution files.

Complex entries are ``[re, im]`` pairs and matrices nest rows then columns.
Empty matrices are written as ``[]`` (or rows of ``[]``); their shape is
recovered from the other blocks of the same file.
"""
import json
import math

import numpy as np

from .realization import LeechData, Realization
from .spectral import SymbolR

SCHEMA_VERSION = "1"


class FileFormatError(ValueError):
    pass


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in M]


def decode_matrix(obj, name="matrix", shape=None):
    """Inverse of :func:`encode_matrix`; rejects ragged input.

    `shape` supplies the dimensions of an empty matrix and is checked
    against non-empty ones.
    """
    if not isinstance(obj, list):
        raise FileFormatError(f"{name}: expected a list of rows")
    rows = len(obj)
    cols = None
    for row in obj:
        if not isinstance(row, list):
            raise FileFormatError(f"{name}: rows must be lists")
        if cols is None:
            cols = len(row)
        elif len(row) != cols:
            raise FileFormatError(f"{name}: ragged rows")
        for v in row:
            if (not isinstance(v, list) or len(v) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
                raise FileFormatError(f"{name}: entries must be [re, im] number pairs")
    cols = cols or 0
    if rows == 0 or cols == 0:
        if shape is None:
            return np.zeros((rows, cols), complex)
        shape = tuple(shape)
        if (rows and rows != shape[0]) or (cols and cols != shape[1]):
            raise FileFormatError(f"{name}: expected shape {shape}")
        return np.zeros(shape, complex)
    M = np.array([[complex(*v) for v in row] for row in obj], dtype=complex)
    if not np.all(np.isfinite(M)):
        raise FileFormatError(f"{name}: non-finite entry")
    if shape is not None and M.shape != tuple(shape):
        raise FileFormatError(f"{name}: expected shape {tuple(shape)}, got {M.shape}")
    return M


def _rows(obj):
    return len(obj) if isinstance(obj, list) else 0


def _cols(obj):
    return len(obj[0]) if isinstance(obj, list) and obj and isinstance(obj[0], list) else 0


def _require(doc, keys, what):
    if not isinstance(doc, dict):
        raise FileFormatError(f"{what}: expected a JSON object")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise FileFormatError(f"{what}: missing {', '.join(missing)}")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise FileFormatError(f"{what}: unsupported schema_version {version!r}")


PROBLEM_KEYS = ("A", "B1", "B2", "C", "D1", "D2")
OPTION_KEYS = {"tol": float, "grid": int, "max_iter": int, "allow_nonminimal": bool}


def problem_from_dict(doc):
    """Return ``(LeechData, options)`` from a parsed ProblemFile."""
    _require(doc, ("schema_version",) + PROBLEM_KEYS, "problem file")
    n = _rows(doc["A"])
    m = _rows(doc["D1"]) or _rows(doc["C"])
    p = _cols(doc["D1"]) or _cols(doc["B1"])
    q = _cols(doc["D2"]) or _cols(doc["B2"])
    shapes = {"A": (n, n), "B1": (n, p), "B2": (n, q), "C": (m, n), "D1": (m, p), "D2": (m, q)}
    mats = {k: decode_matrix(doc[k], k, shapes[k]) for k in PROBLEM_KEYS}
    options = {}
    for key, val in (doc.get("options") or {}).items():
        if key not in OPTION_KEYS:
            raise FileFormatError(f"unknown option {key!r}")
        kind = OPTION_KEYS[key]
        if kind is float and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        if not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
            raise FileFormatError(f"option {key!r} must be {kind.__name__}")
        options[key] = val
    try:
        data = LeechData(**mats)
    except ValueError as exc:
        raise FileFormatError(str(exc)) from exc
    return data, options


def problem_to_dict(data, options=None):
    doc = {"schema_version": SCHEMA_VERSION}
    for k in PROBLEM_KEYS:
        doc[k] = encode_matrix(getattr(data, k))
    if options:
        doc["options"] = dict(options)
    return doc


def realization_to_dict(R):
    n = R.n
    m, p = R.shape
    return {"dims": [n, m, p], "A": encode_matrix(R.A), "B": encode_matrix(R.B),
            "C": encode_matrix(R.C), "D": encode_matrix(R.D)}


def realization_from_dict(obj, name="realization"):
    if not isinstance(obj, dict) or not all(k in obj for k in ("dims", "A", "B", "C", "D")):
        raise FileFormatError(f"{name}: expected dims, A, B, C, D")
    n, m, p = obj["dims"]
    return Realization(decode_matrix(obj["A"], f"{name}.A", (n, n)),
                       decode_matrix(obj["B"], f"{name}.B", (n, p)),
                       decode_matrix(obj["C"], f"{name}.C", (m, n)),
                       decode_matrix(obj["D"], f"{name}.D", (m, p)))


SYMBOL_KEYS = ("A", "C", "Gamma", "R0")


def symbol_from_dict(doc):
    _require(doc, ("schema_version",) + SYMBOL_KEYS, "symbol file")
    n = _rows(doc["A"])
    m = _rows(doc["R0"])
    shapes = {"A": (n, n), "C": (m, n), "Gamma": (n, m), "R0": (m, m)}
    mats = {k: decode_matrix(doc[k], k, shapes[k]) for k in SYMBOL_KEYS}
    try:
        return SymbolR(**mats)
    except ValueError as exc:
        raise FileFormatError(str(exc)) from exc


def symbol_to_dict(sym):
    doc = {"schema_version": SCHEMA_VERSION}
    for k in SYMBOL_KEYS:
        doc[k] = encode_matrix(getattr(sym, k))
    return doc


def _jsonable(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, float):
        # JSON has no inf/nan
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.floating, np.integer)):
        return _jsonable(v.item())
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "__dataclass_fields__"):
        return {k: _jsonable(getattr(v, k)) for k in v.__dataclass_fields__}
    if isinstance(v, np.ndarray):
        return encode_matrix(v)
    return str(v)


def solution_to_dict(sol):
    d = sol.diagnostics
    return {
        "schema_version": SCHEMA_VERSION,
        "status": "solved",
        "branch": sol.branch.value,
        "X": realization_to_dict(sol.X),
        "Psi": realization_to_dict(sol.Psi),
        "F": realization_to_dict(sol.F),
        "U": encode_matrix(sol.U),
        "diagnostics": _jsonable({k: d[k] for k in sorted(d)}),
    }


def failure_to_dict(status, message, diagnostics):
    return {"schema_version": SCHEMA_VERSION, "status": status, "message": message,
            "diagnostics": _jsonable(diagnostics)}


def solution_X(doc):
    _require(doc, ("schema_version", "X"), "solution file")
    return realization_from_dict(doc["X"], "X")


def _is_flat(x):
    return all(not isinstance(v, (list, dict)) or
               (isinstance(v, list) and all(not isinstance(w, (list, dict)) for w in v))
               for v in x)


def _format(x, indent):
    pad = "  " * indent
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_format(v, indent + 1)}' for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, list):
        if _is_flat(x):
            return json.dumps(x)
        items = [pad + "  " + _format(v, indent + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(x)


def dumps(doc):
    """Canonical text: two-space indent, one matrix row per line."""
    return _format(doc, 0) + "\n"


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc
