"""JSON documents: schema validation, loading specs and deterministic output."""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
import os
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import spaces as sp
from .errors import SpecError

SCHEMA_VERSION = "1"
SCHEMA_NAMES = ("space", "shape", "function", "map", "report")
CSV_COLUMNS = ("id", "expected", "actual", "detail")


def schema_dir() -> Path:
    override = os.environ.get("TMSLAB_SCHEMA_DIR")
    if override:
        return Path(override)
    return Path(str(resources.files("tmslab") / "schemas"))


@lru_cache(maxsize=None)
def _load_schema(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise SpecError(f"unknown schema {name!r}")
    path = schema_dir() / f"{name}.schema.json"
    if not path.exists():
        raise SpecError(f"schema file {path} not found")
    return _load_schema(str(path))


def validate(doc: Any, name: str) -> None:
    """Raise SpecError listing every schema violation."""
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            lines.append(f"{where}: {e.message}")
        raise SpecError(f"{name} document is invalid:\n  " + "\n  ".join(lines))


def _decode_inf(obj):
    if isinstance(obj, dict):
        return {k: _decode_inf(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode_inf(v) for v in obj]
    if obj == "inf":
        return math.inf
    if obj == "-inf":
        return -math.inf
    return obj


def read_json(source: str | os.PathLike) -> Any:
    """Parse a file path or an inline JSON string."""
    text = str(source)
    try:
        if text.lstrip().startswith(("{", "[")):
            return json.loads(text)
        with open(text, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON in {text[:60]!r}: {exc}") from exc
    except OSError as exc:
        raise SpecError(f"cannot read {text!r}: {exc.strerror}") from exc


def load_document(source, name: str) -> Any:
    doc = read_json(source)
    validate(doc, name)
    return _decode_inf(doc)


def load_space(source) -> sp.Space:
    """A space from JSON, or one of the named spaces."""
    if isinstance(source, str) and source in sp.NAMED_SPACES:
        return sp.named_space(source)
    return sp.space_from_dict(load_document(source, "space"))


def load_shape(source):
    return sp.shape_from_dict(load_document(source, "shape"))


def load_function(source, default_domain: sp.Space | None = None):
    from .ac.functions import BUILTINS, function_from_dict
    if isinstance(source, str) and source in BUILTINS:
        doc = {"kind": "builtin", "name": source}
    else:
        doc = load_document(source, "function")
    if "domain" in doc:
        validate(doc["domain"], "space")
    return function_from_dict(doc, default_domain)


def load_map(source):
    from .linear import map_from_dict
    doc = load_document(source, "map")
    if "space" in doc:
        validate(doc["space"], "space")
    return map_from_dict(doc)


# --------------------------------------------------------------------------
# deterministic output
# --------------------------------------------------------------------------

def to_jsonable(obj: Any) -> Any:
    """Plain JSON types; non-finite floats become strings."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj))
    if obj is None or isinstance(obj, str):
        return obj
    return repr(obj)


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _detail_text(detail: Any) -> str:
    if isinstance(detail, str):
        return detail
    return json.dumps(to_jsonable(detail), sort_keys=True, separators=(",", ":"))


def csv_text(results: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow([r["id"], r["expected"], r["actual"], _detail_text(r.get("summary", r.get("detail", "")))])
    return buf.getvalue()


def emit_report(report: dict, out: str | None = None, fmt: str = "json") -> str:
    """Render a report and write it to ``out`` (stdout when None)."""
    if not report.get("results"):
        raise SpecError("a report needs at least one result")
    if fmt == "json":
        doc = to_jsonable(report)
        validate(doc, "report")
        text = dumps(doc)
    elif fmt == "csv":
        text = csv_text(report["results"])
    else:
        raise SpecError(f"unknown format {fmt!r}")
    if out is not None:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise SpecError(f"cannot write {out}: {exc.strerror}") from exc
    return text
