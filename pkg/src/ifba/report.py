"""Report records and the JSON/CSV emission layer.

Floats are written with 17 significant digits so every double round-trips
exactly; output files are written once, via a temporary file and an atomic
rename.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from importlib import resources
from dataclasses import dataclass, field
from typing import Any

import numpy as np

#: report key that is allowed to differ between otherwise identical runs
TIMESTAMP_KEY = "generated_at"


@dataclass
class AxiomRecord:
    axiom_id: str
    status: str  # "pass" | "fail" | "vacuous"
    samples_used: int
    failures: int = 0
    witness: dict[str, Any] | None = None
    note: str | None = None

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "vacuous")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": self.axiom_id,
            "status": self.status,
            "samples_used": self.samples_used,
            "failures": self.failures,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note is not None:
            out["note"] = self.note
        return out


@dataclass
class AxiomReport:
    model: str
    seed: int | None
    samples: int
    axioms: list[AxiomRecord] = field(default_factory=list)
    constants: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, axiom_id: str) -> AxiomRecord:
        for rec in self.axioms:
            if rec.axiom_id == axiom_id:
                return rec
        raise KeyError(axiom_id)

    @property
    def all_passed(self) -> bool:
        return all(rec.passed for rec in self.axioms)

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "seed": self.seed,
            "samples": self.samples,
            "constants": self.constants,
            "axioms": [rec.to_dict() for rec in self.axioms],
        }


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy values and objects with ``to_dict``."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == 0.0:
        return "0.0"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _encode(obj: Any, indent: int, level: int, parts: list[str]) -> None:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(_format_float(obj))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        parts.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            parts.append(f"{pad}{json.dumps(str(k))}: ")
            _encode(v, indent, level + 1, parts)
            parts.append(",\n" if i < len(items) - 1 else "\n")
        parts.append(close + "}")
    elif isinstance(obj, list):
        if not obj:
            parts.append("[]")
            return
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            parts.append("[" + ", ".join(_format_float(v) if isinstance(v, float) else str(v) for v in obj) + "]")
            return
        parts.append("[\n")
        for i, v in enumerate(obj):
            parts.append(pad)
            _encode(v, indent, level + 1, parts)
            parts.append(",\n" if i < len(obj) - 1 else "\n")
        parts.append(close + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Serialize ``obj`` to JSON with 17-significant-digit floats."""
    parts: list[str] = []
    _encode(to_jsonable(obj), indent, 0, parts)
    return "".join(parts) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and ``os.replace``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def strip_timestamp(report: dict[str, Any]) -> dict[str, Any]:
    return {k: v for k, v in report.items() if k != TIMESTAMP_KEY}


def load_schema(command: str) -> dict[str, Any]:
    """The shipped JSON schema for a CLI command's report."""
    res = resources.files("ifba") / "schemas" / f"{command}.json"
    return json.loads(res.read_text(encoding="utf-8"))
