"""Serialization of semantic values and text rendering of run records."""

from __future__ import annotations

import json
from typing import Any

from inicalc.config import COLOR_ENABLED
from inicalc.semantics.models import Dist, MonadicValue, NameVal, PSet
from inicalc.semantics.values import ClosV, MonV, PairV, SemValue, TagV, show_value

_GREEN, _RED, _BOLD, _RESET = "\033[32m", "\033[31m", "\033[1m", "\033[0m"


def paint(text: str, code: str, color: bool | None = None) -> str:
    enabled = COLOR_ENABLED if color is None else color
    return f"{code}{text}{_RESET}" if enabled else text


# ── Values ─────────────────────────────────────────────────────────

def serialize_monadic(mv: MonadicValue) -> Any:
    match mv:
        case Dist():
            return {show_value(v): str(w) for v, w in mv.entries}
        case PSet():
            return [show_value(v) for v in mv.elements]
        case NameVal():
            canon = mv.canonical()
            return {"names": canon.count, "value": show_value(canon.payload)}
    raise TypeError(f"not a monadic value: {mv!r}")


def serialize_value(value: SemValue | MonadicValue) -> Any:
    """JSON form of an evaluation result, either monadic or independent-layer."""
    match value:
        case Dist() | PSet() | NameVal():
            return serialize_monadic(value)
        case MonV(m):
            return serialize_monadic(m)
        case PairV(a, b):
            return {"tensor": [serialize_value(a), serialize_value(b)]}
        case TagV(1, inner):
            return {"inl": serialize_value(inner)}
        case TagV(_, inner):
            return {"inr": serialize_value(inner)}
        case ClosV():
            return show_value(value)
    return show_value(value)


def show_result(value: SemValue | MonadicValue) -> str:
    match value:
        case Dist() | PSet() | NameVal():
            return value.show()
    return show_value(value)


# ── Records ────────────────────────────────────────────────────────

def render_json(record) -> str:
    return record.model_dump_json()


def _status(record, color: bool | None) -> str:
    if record.exit_code == 0:
        return paint("ok", _GREEN, color)
    return paint("error" if record.exit_code == 1 else "FAILED", _RED, color)


def _error_text(error: dict) -> str:
    where = error.get("span")
    at = f"{where['line']}:{where['column']}: " if where else ""
    detail = error.get("explanation") or error.get("message", "")
    return f"{at}{error['kind']}: {detail}"


def render_text(record, color: bool | None = None) -> str:
    """Human-readable form; one result per line, stable for a fixed record."""
    outcome = record.outcome
    lines = [f"{paint(record.command, _BOLD, color)} {record.input} [{_status(record, color)}]"]
    if "error" in outcome:
        lines.append(_error_text(outcome["error"]))
        return "\n".join(lines)

    match record.command:
        case "check":
            lines.append(outcome["type"])
        case "eval":
            lines.append(outcome["text"])
        case "independence":
            verdict = "product" if outcome["is_product"] else "NOT a product"
            lines.append(f"{verdict}: {json.dumps(outcome['marginal1'])} (x) {json.dumps(outcome['marginal2'])}")
            if outcome.get("witness"):
                lines.append(f"witness {outcome['witness']}")
            if outcome.get("name_overlap"):
                lines.append(f"shared names {outcome['name_overlap']}")
            if outcome.get("joint") is not None:
                lines.append(f"erased joint {json.dumps(outcome['joint'])}")
        case "translate":
            lines.append(outcome["program"].rstrip("\n"))
        case "gen":
            lines.extend(outcome["terms"])
        case _:
            lines.extend(_suite_lines(outcome))
    return "\n".join(lines)


def _suite_lines(outcome: dict) -> list[str]:
    lines = []
    for result in outcome.get("results", []):
        mark = "pass" if not result["failures"] else f"{len(result['failures'])} FAIL"
        lines.append(f"  {result['schema_name']:<18} {result['model']:<5} {result['checked']:>4}  {mark}")
    for key in ("failure_count", "ini_checked", "i_checked", "typing_checked", "semantics_checked", "pairs_checked", "pairs_equal", "checked", "accepted"):
        if key in outcome:
            lines.append(f"  {key}: {outcome[key]}")
    if "negative_control_flagged" in outcome:
        lines.append(f"  negative control flagged: {outcome['negative_control_flagged']} ({outcome['negative_control_witness']})")
    if outcome.get("names_disjoint") is not None:
        lines.append(f"  names disjoint: {outcome['names_disjoint']}")
    for failure in outcome.get("failures", []) + outcome.get("disagreements", []):
        lines.append(f"  failure: {json.dumps(failure, sort_keys=True)}")
    return lines
