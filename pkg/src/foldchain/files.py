"""JSON file formats: curves, plans, timing presets, canonical dumps.

All command-line and HTTP outputs funnel through ``dumps_canonical`` so
the two front ends produce byte-identical documents for identical inputs.
Floats that carry an integral value are emitted as integers, which keeps
documents diffable across platforms.
"""

from __future__ import annotations

import json
import math
from typing import Any, Union

from .errors import SchemaError
from .geometry import AnchorPose, Curve, FoldDirection, LatticeEdge, TriCoord
from .planner import FoldPlan


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaError(msg)


def _number(value: Any, where: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), f"{where} must be a number")
    v = float(value)
    _require(math.isfinite(v), f"{where} must be finite")
    return v


def _obj(value: Any, where: str) -> dict:
    _require(isinstance(value, dict), f"{where} must be an object")
    return value


# ------------------------------------------------------------- curve files

def curve_to_obj(curve: Curve, pitch_mm: float) -> dict:
    return {
        "pitch_mm": pitch_mm,
        "points": [[x, y] for x, y in curve.points],
    }


def curve_from_obj(obj: Any) -> tuple[Curve, float]:
    doc = _obj(obj, "curve document")
    _require(set(doc) == {"pitch_mm", "points"}, "curve document needs exactly pitch_mm and points")
    pitch = _number(doc["pitch_mm"], "pitch_mm")
    _require(pitch > 0, "pitch_mm must be positive")
    pts = doc["points"]
    _require(isinstance(pts, list) and len(pts) >= 2, "points must list at least 2 points")
    parsed = []
    for i, p in enumerate(pts):
        _require(isinstance(p, list) and len(p) == 2, f"points[{i}] must be an [x, y] pair")
        parsed.append((_number(p[0], f"points[{i}][0]"), _number(p[1], f"points[{i}][1]")))
    try:
        curve = Curve(parsed)
    except ValueError as ex:
        raise SchemaError(f"points do not form a usable curve: {ex}") from ex
    return curve, pitch


# -------------------------------------------------------------- plan files

def _edge_to_obj(edge: LatticeEdge) -> list[list[int]]:
    return [[edge.a[0], edge.a[1]], [edge.b[0], edge.b[1]]]


def _edge_from_obj(value: Any, where: str) -> LatticeEdge:
    _require(isinstance(value, list) and len(value) == 2, f"{where} must be a vertex pair")
    keys = []
    for i, v in enumerate(value):
        _require(
            isinstance(v, list) and len(v) == 2 and all(isinstance(c, int) for c in v),
            f"{where}[{i}] must be an integer [k, j] vertex key",
        )
        keys.append((v[0], v[1]))
    try:
        return LatticeEdge(keys[0], keys[1])
    except ValueError as ex:
        raise SchemaError(f"{where} is not a lattice edge: {ex}") from ex


def _tri_to_obj(tri: TriCoord) -> dict:
    return {"q": tri.q, "r": tri.r, "up": tri.up}


def _tri_from_obj(value: Any, where: str) -> TriCoord:
    doc = _obj(value, where)
    _require(set(doc) >= {"q", "r", "up"}, f"{where} needs q, r, up")
    _require(
        isinstance(doc["q"], int) and isinstance(doc["r"], int) and isinstance(doc["up"], bool),
        f"{where} q/r must be integers and up a boolean",
    )
    return TriCoord(doc["q"], doc["r"], doc["up"])


def plan_to_obj(
    plan: FoldPlan,
    strip,
    pitch_mm: float,
    metrics=None,
) -> dict:
    doc: dict = {
        "pitch_mm": pitch_mm,
        "anchor": {
            **_tri_to_obj(plan.anchor.tri),
            "entry": _edge_to_obj(plan.anchor.entry),
        },
        "folds": [d.value for d in plan.directions],
        "strip": [
            {
                **_tri_to_obj(el.tri),
                "entry": _edge_to_obj(el.entry),
                "exit": _edge_to_obj(el.exit) if el.exit is not None else None,
            }
            for el in strip.elements
        ],
    }
    if metrics is not None:
        doc["metrics"] = {
            "mean_err_mm": metrics.mean,
            "max_err_mm": metrics.max,
        }
    return doc


def plan_from_obj(obj: Any) -> tuple[FoldPlan, float]:
    doc = _obj(obj, "plan document")
    _require(
        {"anchor", "folds", "strip"} <= set(doc) <= {"pitch_mm", "anchor", "folds", "strip", "metrics"},
        "plan document needs anchor, folds, strip (pitch_mm, metrics optional)",
    )
    pitch = _number(doc.get("pitch_mm", 1.0), "pitch_mm")
    _require(pitch > 0, "pitch_mm must be positive")

    anchor_doc = _obj(doc["anchor"], "anchor")
    _require("entry" in anchor_doc, "anchor needs an entry edge")
    tri = _tri_from_obj(anchor_doc, "anchor")
    entry = _edge_from_obj(anchor_doc["entry"], "anchor.entry")
    try:
        anchor = AnchorPose(tri, entry)
    except ValueError as ex:
        raise SchemaError(f"anchor is inconsistent: {ex}") from ex

    folds_doc = doc["folds"]
    _require(isinstance(folds_doc, list), "folds must be a list")
    directions = []
    for i, f in enumerate(folds_doc):
        _require(f in ("L", "R"), f"folds[{i}] must be 'L' or 'R'")
        directions.append(FoldDirection(f))

    strip_doc = doc["strip"]
    _require(isinstance(strip_doc, list), "strip must be a list")
    _require(len(strip_doc) == len(directions), "folds length must equal strip length")

    return FoldPlan(directions=tuple(directions), anchor=anchor), pitch


# ------------------------------------------------------------ timing files

_TIMING_KEYS = {
    "t_setup_initial_ms": "t_setup_initial",
    "t_reset_ms": "t_reset",
    "t_config_ms": "t_config",
    "t_sma_ms": "t_sma",
    "t_mot_ms": "t_mot",
}


def timing_to_obj(t) -> dict:
    return {json_key: getattr(t, attr) for json_key, attr in _TIMING_KEYS.items()}


def timing_from_obj(obj: Any):
    from .control import TimingParams

    doc = _obj(obj, "timing document")
    unknown = set(doc) - set(_TIMING_KEYS)
    _require(not unknown, f"unknown timing keys: {sorted(unknown)}")
    kwargs = {}
    for json_key, attr in _TIMING_KEYS.items():
        if json_key in doc:
            kwargs[attr] = _number(doc[json_key], json_key)
    try:
        return TimingParams(**kwargs)
    except ValueError as ex:
        raise SchemaError(str(ex)) from ex


# -------------------------------------------------------- mechanics params

def mech_from_obj(obj: Any):
    """Parse a parameter document; defaults fill whatever is omitted.

    Value-range violations (for example a hinge span not exceeding twice
    the offset) surface as ValueError so callers can distinguish bad
    parameter values from malformed documents.
    """
    from .mechanics import MechParams

    doc = _obj(obj, "mechanics document")
    allowed = {"delta_mm", "h_mm", "l_mm", "Wp_gf", "Fsma_N", "strap_angle_deg", "sma_contraction"}
    unknown = set(doc) - allowed
    _require(not unknown, f"unknown mechanics keys: {sorted(unknown)}")
    for key in doc:
        if doc[key] is not None:
            _number(doc[key], key)
    return MechParams.from_dict(doc)


# --------------------------------------------------------- canonical dumps

def _normalize_numbers(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return int(value) if value.is_integer() and abs(value) < 1e15 else value
    if isinstance(value, dict):
        return {k: _normalize_numbers(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize_numbers(v) for v in value]
    return value


def dumps_canonical(obj: Any) -> str:
    """Stable JSON rendering used by every front end."""
    return json.dumps(_normalize_numbers(obj), indent=2, allow_nan=False) + "\n"


def loads_strict(raw: Union[str, bytes]) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError as ex:
        raise SchemaError(f"malformed JSON: {ex}") from ex


def read_json_file(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_strict(fh.read())
