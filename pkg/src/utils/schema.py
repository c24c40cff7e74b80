"""
JSON input schema: spaces, sequences, operators and batch manifests.

    space     {"dim": 2, "norm": {"p": 2}}
              {"dim": 2, "norm": {"p": "inf", "weights": [1, 2]}}
              {"dim": 2, "norm": {"polytope": [[1, 0], [0, 1], [-1, 0], [0, -1]]}}
    sequence  {"space": <space or name>, "vectors": [[3, 4], [0, 0]]}
              [1, 2, 3]                 scalars on the real line
              [[3, 4], [0, 0]]          vectors in PNorm(2)
    operator  {"domain": <space or name>, "codomain": <space or name>, "matrix": [[...], ...]}
    manifest  {"schema_version": 1, "spaces": {...}, "sequences": {...},
               "operators": {...}, "tasks": [{"kind": "norm", ...}, ...]}
"""
import json
import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from banach.exceptions import ManifestError
from banach.opideal import LinOp
from banach.seqnorm import ClassId, VecSeq
from banach.space import Space

SCHEMA_VERSION = 1
TASK_KINDS = ("norm", "dualnorm", "opnorm", "adjoint-report", "reverse-report", "second-adjoint")


def load_json(source: str):
    """Parse inline JSON, or the contents of `source` when it names an existing file."""
    text = source
    if os.path.isfile(source):
        with open(source, "r", encoding="utf-8") as f:
            text = f.read()
        logging.debug(f"Loaded JSON input from {source}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestError(f"Invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from None


def _require(obj: Dict, key: str, what: str):
    if not isinstance(obj, dict):
        raise ManifestError(f"{what} must be a JSON object, got {type(obj).__name__}")
    if key not in obj:
        raise ManifestError(f"{what} is missing the {key!r} field")
    return obj[key]


def _matrix(value, what: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ManifestError(f"{what} must be a list of numbers") from None
    return arr


def parse_space(obj, spaces: Optional[Dict[str, Space]] = None) -> Space:
    if isinstance(obj, str):
        if spaces is None or obj not in spaces:
            raise ManifestError(f"Unknown space reference {obj!r}")
        return spaces[obj]
    dim = _require(obj, "dim", "Space")
    spec = _require(obj, "norm", "Space")
    if not isinstance(spec, dict):
        raise ManifestError("Space norm must be a JSON object")
    if "polytope" in spec:
        space = Space.polytope(_matrix(spec["polytope"], "Polytope vertices"))
    elif "weights" in spec:
        space = Space.weighted(_require(spec, "p", "Weighted norm"), _matrix(spec["weights"], "Weights"))
    else:
        space = Space.pnorm(dim, _require(spec, "p", "Space norm"))
    if space.dim != dim:
        raise ManifestError(f"Space declares dim {dim} but its norm describes dimension {space.dim}")
    return space


def parse_sequence(obj, spaces: Optional[Dict[str, Space]] = None) -> VecSeq:
    if isinstance(obj, list):
        arr = _matrix(obj, "Sequence")
        if arr.ndim == 1:
            return VecSeq.scalars(arr)
        if arr.ndim != 2:
            raise ManifestError("Sequence must be a list of numbers or a list of vectors")
        return VecSeq(Space.pnorm(arr.shape[1], 2), arr)
    space = parse_space(_require(obj, "space", "Sequence"), spaces)
    return VecSeq(space, _matrix(_require(obj, "vectors", "Sequence"), "Sequence vectors"))


def parse_operator(obj, spaces: Optional[Dict[str, Space]] = None) -> LinOp:
    domain = parse_space(_require(obj, "domain", "Operator"), spaces)
    codomain = parse_space(_require(obj, "codomain", "Operator"), spaces)
    return LinOp(domain, codomain, _matrix(_require(obj, "matrix", "Operator"), "Operator matrix"))


def parse_class(value) -> ClassId:
    if not isinstance(value, str):
        raise ManifestError(f"Sequence class must be a string such as 'lp:2', got {value!r}")
    return ClassId.parse(value)


@dataclass
class Task:
    kind: str
    id: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Manifest:
    schema_version: int
    spaces: Dict[str, Space]
    sequences: Dict[str, VecSeq]
    operators: Dict[str, LinOp]
    tasks: List[Task]

    def sequence(self, ref) -> VecSeq:
        if isinstance(ref, str):
            if ref not in self.sequences:
                raise ManifestError(f"Unknown sequence reference {ref!r}")
            return self.sequences[ref]
        return parse_sequence(ref, self.spaces)

    def operator(self, ref) -> LinOp:
        if isinstance(ref, str):
            if ref not in self.operators:
                raise ManifestError(f"Unknown operator reference {ref!r}")
            return self.operators[ref]
        return parse_operator(ref, self.spaces)


def parse_manifest(obj) -> Manifest:
    version = _require(obj, "schema_version", "Manifest")
    if version != SCHEMA_VERSION:
        raise ManifestError(f"Unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    spaces = {name: parse_space(s) for name, s in (obj.get("spaces") or {}).items()}
    sequences = {name: parse_sequence(s, spaces) for name, s in (obj.get("sequences") or {}).items()}
    operators = {name: parse_operator(o, spaces) for name, o in (obj.get("operators") or {}).items()}
    tasks = []
    for i, raw in enumerate(obj.get("tasks") or []):
        kind = _require(raw, "kind", f"Task {i}")
        if kind not in TASK_KINDS:
            raise ManifestError(f"Task {i} has unknown kind {kind!r}; expected one of {', '.join(TASK_KINDS)}")
        params = {k: v for k, v in raw.items() if k not in ("kind", "id")}
        tasks.append(Task(kind, str(raw.get("id", f"task-{i}")), params))
    manifest = Manifest(version, spaces, sequences, operators, tasks)
    # resolve every reference up front so a bad manifest fails before any work
    for task in tasks:
        if "sequence" in task.params:
            manifest.sequence(task.params["sequence"])
        if "operator" in task.params:
            manifest.operator(task.params["operator"])
        for key in ("class", "X", "Y"):
            if key in task.params:
                parse_class(task.params[key])
    logging.info(f"Manifest parsed: {len(spaces)} spaces, {len(sequences)} sequences, "
                 f"{len(operators)} operators, {len(tasks)} tasks")
    return manifest


def to_jsonable(value):
    """Recursively convert engine values into JSON-safe Python values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if value is None or isinstance(value, str):
        return value
    return str(value)


FLOAT_FORMAT = ".17g"


def format_float(value: float) -> str:
    """17 significant digits, always recognisable as a float"""
    text = format(value, FLOAT_FORMAT)
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def _encode(value, level: int) -> str:
    pad, close = "  " * (level + 1), "  " * level
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(key)}: {_encode(value[key], level + 1)}" for key in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        items = [pad + _encode(item, level + 1) for item in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    if isinstance(value, float):
        return format_float(value)
    return json.dumps(value)


def dumps(payload) -> str:
    """Canonical JSON: sorted keys, two-space indent, floats with 17 significant digits."""
    return _encode(to_jsonable(payload), 0)
