"""Machine-readable report envelope shared by every CLI command."""

from __future__ import annotations

import json
import math

import numpy as np

SCHEMA_ID = "rcdual.report/1"

_EXTENDED = {"oneOf": [{"type": "number"}, {"enum": ["+inf", "-inf"]}]}

_ESTIMATE = {
    "type": "object",
    "required": ["value", "bound_side", "witness", "grid_value", "grid_bound", "refined", "grid_spec"],
    "properties": {
        "value": _EXTENDED,
        "bound_side": {"enum": ["upper", "exact"]},
        "grid_value": _EXTENDED,
        "grid_bound": {"type": "number"},
        "refined": {"type": "boolean"},
        "witness": {"oneOf": [{"type": "null"}, {"type": "array", "items": {"type": "number"}}]},
        "grid_spec": {"type": "object", "required": ["lower", "upper", "N"]},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "command", "problem", "config", "results", "flags", "all_passed", "notes"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "command": {"enum": ["solve", "dual", "reduce", "equivalence", "conjugate", "verify-chain"]},
        "problem": {
            "type": "object",
            "required": ["name", "dimension"],
            "properties": {"name": {"type": "string"}, "dimension": {"type": "integer"}},
        },
        "config": {
            "type": "object",
            "required": ["grid", "eps_strict", "seed", "tol", "budget"],
        },
        "results": {"type": "object"},
        "flags": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["passed", "detail"],
                "properties": {"passed": {"type": "boolean"}, "detail": {"type": "object"}},
            },
        },
        "all_passed": {"type": "boolean"},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
    "$defs": {"estimate": _ESTIMATE, "extended": _EXTENDED},
}

# per-command result keys that must be present
RESULT_KEYS = {
    "solve": ["as_posed", "strict", "nonstrict"],
    "dual": ["alpha_hat", "alpha_bar_hat", "beta_hat", "beta_bar", "phi_star", "lambda_star"],
    "verify-chain": ["alpha_hat", "alpha_bar_hat", "beta_hat", "beta_bar", "lemma_samples"],
    "reduce": ["reduction"],
    "equivalence": ["verdict", "inf_strict", "inf_nonstrict", "eta_trace", "hypotheses"],
    "conjugate": ["function", "y", "closed", "grid"],
}


def jsonable(obj):
    """Recursively convert to JSON-safe values; infinities become ``"+inf"``/``"-inf"``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return v
    return obj


def envelope(command: str, problem: dict, config: dict, results: dict, flags: dict,
             notes=()) -> dict:
    return jsonable({
        "schema": SCHEMA_ID,
        "command": command,
        "problem": problem,
        "config": config,
        "results": results,
        "flags": flags,
        "all_passed": all(f["passed"] for f in flags.values()),
        "notes": list(notes),
    })


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def render_text(report: dict) -> str:
    lines = [f"{report['command']} :: {report['problem']['name']} (n={report['problem']['dimension']})"]
    for key, val in report["results"].items():
        if isinstance(val, dict) and "value" in val:
            lines.append(f"  {key}: {val['value']} [{val.get('bound_side', '')}]")
        elif not isinstance(val, (dict, list)) or key in ("lambda_star", "y", "x_tilde"):
            lines.append(f"  {key}: {val}")
    for name, flag in report["flags"].items():
        lines.append(f"  [{'PASS' if flag['passed'] else 'FAIL'}] {name}")
    for note in report["notes"]:
        lines.append(f"  note: {note}")
    lines.append(f"  all_passed: {report['all_passed']}")
    return "\n".join(lines) + "\n"
