"""Machine-readable report documents: canonical JSON and CSV tables.

Serialization is deliberately deterministic: object keys are emitted in
sorted order, every float is printed with 17 significant digits (enough to
round-trip an IEEE double exactly), complex values become ``{"im", "re"}``
objects, and nothing time- or host-dependent enters the document.  Two
runs with identical inputs therefore produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, TextIO

from .scenarios import SWEEP_COLUMNS, SuiteResult

__all__ = [
    "REPORT_VERSION",
    "ReportDocument",
    "canonical_json",
    "parse_report",
    "write_sweep_csv",
    "sweep_csv_text",
]

REPORT_VERSION = "1"


def _canonicalize(obj: Any) -> Any:
    """Reduce a value tree to JSON-safe primitives.

    Complex numbers become ``{"im": float, "re": float}`` mappings; the
    key set is the marker that distinguishes them on the way back in.
    """
    if isinstance(obj, complex):
        return {"im": float(obj.imag), "re": float(obj.real)}
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, dict):
        out = {}
        for key in obj:
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            out[key] = _canonicalize(obj[key])
        return out
    if isinstance(obj, (list, tuple)):
        return [_canonicalize(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return _canonicalize(obj.to_dict())
    if hasattr(obj, "item"):
        return _canonicalize(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def _emit(obj: Any, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(format_number(obj))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                parts.append(",")
            parts.append(json.dumps(key, ensure_ascii=False))
            parts.append(":")
            _emit(obj[key], parts)
        parts.append("}")
    elif isinstance(obj, list):
        parts.append("[")
        for i, value in enumerate(obj):
            if i:
                parts.append(",")
            _emit(value, parts)
        parts.append("]")
    else:  # pragma: no cover - _canonicalize leaves only the above
        raise TypeError(f"cannot emit {type(obj).__name__}")


def format_number(value: float) -> str:
    """17-significant-digit decimal form that round-trips the double."""
    if value != value:
        raise ValueError("reports must not contain NaN")
    if value in (float("inf"), float("-inf")):
        raise ValueError("reports must not contain infinities")
    text = format(value, ".17g")
    # Keep integral floats recognizable as floats on re-parse.
    if "e" not in text and "E" not in text and "." not in text:
        text += ".0"
    return text


def canonical_json(obj: Any) -> str:
    """Serialize a value tree to deterministic JSON text.

    Keys are sorted, floats carry 17 significant digits, complex numbers
    are ``{"im", "re"}`` objects, and the text ends with a newline.
    """
    parts: list[str] = []
    _emit(_canonicalize(obj), parts)
    parts.append("\n")
    return "".join(parts)


@dataclass(frozen=True, eq=False)
class ReportDocument:
    """Top-level verification report.

    ``results`` is the full suite serialization (which already echoes the
    scenario configuration); ``summary`` repeats the pass/fail counts and
    the worst residual so a consumer can triage without parsing the body.
    """

    version: str
    scenario: dict[str, Any]
    results: dict[str, Any]
    summary: dict[str, Any]

    @staticmethod
    def from_suite(suite: SuiteResult) -> "ReportDocument":
        results = suite.to_dict()
        inner = results["summary"]
        return ReportDocument(
            version=REPORT_VERSION,
            scenario=results["config"],
            results=results,
            summary={
                "pass": inner["pass_count"],
                "fail": inner["fail_count"],
                "worst_residual_name": inner["worst_residual_name"],
                "worst_rel_residual": inner["worst_rel_residual"],
            },
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "scenario": self.scenario,
            "results": self.results,
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def parse_report(text: str) -> dict[str, Any]:
    """Parse report JSON back into the plain canonical value tree.

    ``parse_report(doc.to_json())`` equals ``_canonicalize(doc.to_dict())``
    exactly: the 17-digit float form is lossless.
    """
    return json.loads(text)


def sweep_csv_text(rows: list[dict[str, float]]) -> str:
    """Render sweep rows as CSV text with the fixed column header."""
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(
            ",".join(format_number(float(row[column])) for column in SWEEP_COLUMNS)
        )
    return "\n".join(lines) + "\n"


def write_sweep_csv(rows: list[dict[str, float]], stream: TextIO) -> None:
    """Write sweep rows to an open text stream."""
    stream.write(sweep_csv_text(rows))
