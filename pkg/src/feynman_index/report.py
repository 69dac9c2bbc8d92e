"""Checks, reports and their byte-stable serialisation.

JSON is written with sorted keys, floats with 17 significant digits and
complex numbers as ``{"im": ..., "re": ...}``. Wall-clock timings live in a
separate file so that the report itself depends only on config and seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "SCHEMA_ID",
    "Check",
    "Report",
    "to_jsonable",
    "dumps",
    "emit_report",
    "emit_csv",
    "emit_timing",
    "CHECK_COLUMNS",
    "check_rows",
]

SCHEMA_ID = "feynman-index-report/1"


def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    text = "%.17g" % x
    # keep a marker of floatness so that 1.0 does not read back as an int
    if all(ch not in text for ch in ".en"):
        text += ".0"
    return text


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays, complex numbers, tuples and dataclasses to JSON types."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()] if obj.dtype != object else [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj, ensure_ascii=False)


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text of ``obj`` ending with a newline."""
    return _encode(to_jsonable(obj), indent, 0) + "\n"


def _deviation(value, reference) -> Optional[float]:
    if value is None or reference is None:
        return None
    try:
        return float(abs(complex(value) - complex(reference)))
    except TypeError:
        return None


@dataclass
class Check:
    """One numeric claim with its reference and tolerance.

    Parameters
    ----------
    name : str
    value : number, optional
        Computed value; ``None`` if the computation raised.
    reference : number, optional
    tolerance : float
    reference_source : str
        Where the reference comes from, e.g. ``closed_form`` or ``spectral_flow``.
    passed : bool, optional
        Defaults to ``|value - reference| <= tolerance``.
    criterion : int, optional
        Acceptance criterion the check belongs to (full-suite only).
    deviation : float, optional
        Defaults to ``|value - reference|``; set explicitly for relative or
        residual-type checks.
    error : str, optional
        Error code and message when the computation failed.
    details : dict
    """

    name: str
    value: Any = None
    reference: Any = None
    tolerance: float = 0.0
    reference_source: str = ""
    passed: Optional[bool] = None
    criterion: Optional[int] = None
    deviation: Optional[float] = None
    error: Optional[str] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.deviation is None:
            self.deviation = _deviation(self.value, self.reference)
        if self.passed is None:
            self.passed = self.error is None and self.deviation is not None and self.deviation <= self.tolerance
        self.passed = bool(self.passed)

    @classmethod
    def failure(cls, name: str, exc: BaseException, tolerance: float = 0.0, reference=None,
                reference_source: str = "", criterion: Optional[int] = None) -> "Check":
        """A failed check recording the raised error."""
        code = getattr(getattr(exc, "code", None), "value", type(exc).__name__)
        message = getattr(exc, "message", None) or str(exc)
        return cls(name, None, reference, tolerance, reference_source, passed=False, criterion=criterion,
                   error=f"{code}: {message}")

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "value": self.value,
            "reference": self.reference,
            "tolerance": float(self.tolerance),
            "reference_source": self.reference_source,
            "deviation": self.deviation,
            "passed": self.passed,
        }
        if self.criterion is not None:
            out["criterion"] = self.criterion
        if self.error is not None:
            out["error"] = self.error
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class Report:
    """Outcome of one command: config echo plus the ordered checks."""

    command: str
    config: dict
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_ID,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
            "summary": {"total": len(self.checks), "failed": len(self.failures()), "passed": self.passed},
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def emit_report(report: Report, path) -> Path:
    """Write ``report`` as deterministic JSON to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(report.to_json().encode("utf-8"))
    return path


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def _flatten(row: dict) -> dict:
    out = {}
    for key, value in row.items():
        if isinstance(value, (complex, np.complexfloating)):
            out[f"{key}_re"] = float(value.real)
            out[f"{key}_im"] = float(value.imag)
        else:
            out[key] = value
    return out


def emit_csv(series: Iterable[dict], path, columns: Optional[Sequence[str]] = None) -> Path:
    """Write rows of a series to CSV.

    Complex entries are split into ``<key>_re`` and ``<key>_im`` columns.
    Without ``columns`` the header is the sorted union of the row keys, so
    an empty series gives an empty header line.
    """
    rows = [_flatten(dict(r)) for r in series]
    header = list(columns) if columns is not None else sorted({k for r in rows for k in r})
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([_csv_cell(r.get(k)) for k in header])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(buffer.getvalue().encode("utf-8"))
    return path


CHECK_COLUMNS = (
    "criterion",
    "name",
    "value_re",
    "value_im",
    "reference_re",
    "reference_im",
    "deviation",
    "tolerance",
    "passed",
    "reference_source",
    "error",
)


def check_rows(report: Report) -> list[dict]:
    """One flat CSV row per check of ``report``."""
    rows = []
    for c in report.checks:
        row = {
            "criterion": c.criterion,
            "name": c.name,
            "deviation": c.deviation,
            "tolerance": float(c.tolerance),
            "passed": c.passed,
            "reference_source": c.reference_source,
            "error": c.error,
        }
        for key, value in (("value", c.value), ("reference", c.reference)):
            if isinstance(value, (int, float, complex, np.number)) and not isinstance(value, bool):
                z = complex(value)
                row[f"{key}_re"], row[f"{key}_im"] = z.real, z.imag
        rows.append(row)
    return rows


def emit_timing(timings: dict, path) -> Path:
    """Write wall-clock seconds per stage; kept apart from the byte-stable report."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps({k: float(v) for k, v in timings.items()}), encoding="utf-8")
    return path
