"""Scenario JSON files: schema, validation and conversion to domain objects."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .model import (
    ModuleTypeSpec,
    Requirement,
    RobotBlueprint,
    Role,
    StorageMode,
    TeamScenario,
)

BUNDLED = ("paper_example",)

_COUNT = {"type": "integer", "minimum": 0}
_LIMITS = {
    "type": "object",
    "patternProperties": {"^[0-9]+$": _COUNT},
    "additionalProperties": False,
}
_PROB = {"type": "number", "minimum": 0, "maximum": 1}

SCENARIO_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["catalog", "robots", "counts", "requirement", "horizon_months"],
    "additionalProperties": False,
    "properties": {
        "catalog": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "role", "failure_rate", "cost"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 1},
                    "role": {"enum": [r.value for r in Role]},
                    "failure_rate": {"type": "number", "exclusiveMinimum": 0},
                    "cost": {"type": "number", "minimum": 0},
                    "detect_switch_self": _PROB,
                    "detect_switch_other": _PROB,
                    "maintenance_cost": {"type": "number", "minimum": 0},
                },
            },
        },
        "robots": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["type_index", "active_modules", "free_slots", "slot_capacity"],
                "additionalProperties": False,
                "properties": {
                    "type_index": {"type": "integer", "minimum": 1},
                    "active_modules": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                    "free_slots": _COUNT,
                    "slot_capacity": _COUNT,
                    "per_type_limits": _LIMITS,
                },
            },
        },
        "counts": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "requirement": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["full", "minimal", "partial"]},
                "thresholds": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            },
        },
        "horizon_months": {"type": "number", "minimum": 0},
        "storage": {"enum": [m.value for m in StorageMode]},
        "limits": _LIMITS,
    },
}


class ScenarioFileError(ValueError):
    """Scenario document that cannot be parsed or fails validation."""


def _int_keys(d: dict | None) -> dict[int, int]:
    return {int(k): int(v) for k, v in (d or {}).items()}


def scenario_from_dict(doc: dict[str, Any]) -> TeamScenario:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            lines.append(f"{where}: {err.message}")
        raise ScenarioFileError("\n".join(lines))
    catalog = [
        ModuleTypeSpec(
            id=m["id"],
            role=Role(m["role"]),
            failure_rate=float(m["failure_rate"]),
            cost=float(m["cost"]),
            detect_switch_self=float(m.get("detect_switch_self", 1.0)),
            detect_switch_other=float(m.get("detect_switch_other", 1.0)),
            maintenance_cost=float(m.get("maintenance_cost", 0.0)),
        )
        for m in doc["catalog"]
    ]
    blueprints = [
        RobotBlueprint(
            type_index=r["type_index"],
            active_modules=tuple(r["active_modules"]),
            free_slots=r["free_slots"],
            slot_capacity=r["slot_capacity"],
            per_type_limits=_int_keys(r.get("per_type_limits")),
        )
        for r in doc["robots"]
    ]
    req = doc["requirement"]
    try:
        return TeamScenario(
            catalog=catalog,
            blueprints=blueprints,
            counts=tuple(doc["counts"]),
            horizon=float(doc["horizon_months"]),
            requirement=Requirement(req["kind"], req.get("thresholds")),
            storage=StorageMode(doc.get("storage", "shared")),
            limits=_int_keys(doc.get("limits")),
        )
    except ValueError as exc:
        raise ScenarioFileError(str(exc)) from exc


def scenario_to_dict(scenario: TeamScenario) -> dict[str, Any]:
    req: dict[str, Any] = {"kind": scenario.requirement.kind}
    if scenario.requirement.thresholds is not None:
        req["thresholds"] = list(scenario.requirement.thresholds)
    doc: dict[str, Any] = {
        "catalog": [
            {
                "id": m.id,
                "role": m.role.value,
                "failure_rate": m.failure_rate,
                "cost": m.cost,
                "detect_switch_self": m.detect_switch_self,
                "detect_switch_other": m.detect_switch_other,
                "maintenance_cost": m.maintenance_cost,
            }
            for m in scenario.catalog
        ],
        "robots": [],
        "counts": list(scenario.counts),
        "requirement": req,
        "horizon_months": scenario.horizon,
        "storage": scenario.storage.value,
    }
    for bp in scenario.blueprints:
        robot = {
            "type_index": bp.type_index,
            "active_modules": list(bp.active_modules),
            "free_slots": bp.free_slots,
            "slot_capacity": bp.slot_capacity,
        }
        if bp.per_type_limits:
            robot["per_type_limits"] = {str(k): v for k, v in bp.per_type_limits.items()}
        doc["robots"].append(robot)
    if scenario.limits:
        doc["limits"] = {str(k): v for k, v in scenario.limits.items()}
    return doc


def loads(text: str) -> TeamScenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc)


def load_scenario(path: str | Path) -> TeamScenario:
    """Load a scenario file, or a bundled fixture by name (e.g. ``paper_example``)."""
    if str(path) in BUNDLED:
        return bundled(str(path))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioFileError(f"cannot read {path}: {exc.strerror}") from exc
    return loads(text)


def bundled(name: str = "paper_example") -> TeamScenario:
    text = resources.files("selfmaint").joinpath("data", f"{name}.json").read_text()
    return loads(text)


def reference_fleet(horizon: float | None = None) -> TeamScenario:
    """The six-robot, eighteen-module-type fleet used as the reference example."""
    scenario = bundled("paper_example")
    return scenario if horizon is None else scenario.with_horizon(horizon)
