"""Scenario files: TOML experiment definitions and the bundled suite.

All geometry is given in the robot's initial frame (robot at the origin,
heading along +x).  A scenario file looks like::

    schema = "hpfnav-scenario/1"
    name = "single_drum"
    seed = 3
    target = [4.0, 0.0]

    [[world.circles]]
    center = [2.0, 0.1]
    radius = 0.3

    [config]
    D = 9.0
    sensor_preset = "paper-like"

    [config.controller]
    v_d = 0.4

See README.md for the full key list.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import jsonschema
import tomli_w

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .control import ControllerParams
from .errors import ScenarioParseError
from .mission import MissionConfig
from .vehicle import Pose, VehicleParams
from .world import SENSOR_PRESETS, Circle, Segment, SensorModel

SCHEMA_VERSION = "hpfnav-scenario/1"

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_CIRCLE = {"type": "object", "additionalProperties": False, "required": ["center", "radius"],
           "properties": {"center": _POINT, "radius": {"type": "number", "exclusiveMinimum": 0}}}
_SEGMENT = {"type": "object", "additionalProperties": False, "required": ["a", "b"],
            "properties": {"a": _POINT, "b": _POINT}}
_GEOMETRY = {"type": "object", "additionalProperties": False,
             "properties": {"circles": {"type": "array", "items": _CIRCLE},
                            "segments": {"type": "array", "items": _SEGMENT}}}


def _props(cls, skip=()) -> dict[str, Any]:
    kinds = {float: {"type": "number"}, int: {"type": "integer"}, bool: {"type": "boolean"}}
    out = {}
    for f in fields(cls):
        if f.name in skip:
            continue
        default = f.default
        if isinstance(default, bool):
            out[f.name] = kinds[bool]
        elif isinstance(default, int):
            out[f.name] = kinds[int]
        elif isinstance(default, (float, type(None))):
            out[f.name] = {"type": ["number", "null"]} if default is None else kinds[float]
        elif isinstance(default, str):
            out[f.name] = {"type": "string"}
        elif isinstance(default, tuple):
            out[f.name] = _POINT
    return out


_VEHICLE = {"type": "object", "additionalProperties": False,
            "properties": {**_props(VehicleParams), "kind": {"enum": ["differential", "car"]}}}
_CONTROLLER = {"type": "object", "additionalProperties": False, "properties": _props(ControllerParams)}
_SENSOR = {"type": "object", "additionalProperties": False, "properties": _props(SensorModel)}
_CONFIG = {
    "type": "object", "additionalProperties": False,
    "properties": {
        **_props(MissionConfig, skip=("controller", "vehicle", "sensor")),
        "map_center": _POINT,
        "sensor_preset": {"enum": sorted(SENSOR_PRESETS)},
        "controller": _CONTROLLER, "vehicle": _VEHICLE, "sensor": _SENSOR,
    },
}
SCENARIO_SCHEMA = {
    "type": "object", "additionalProperties": False,
    "required": ["schema", "name", "target"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "start": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
        "target": _POINT,
        "world": _GEOMETRY,
        "apriori": _GEOMETRY,
        "config": _CONFIG,
    },
}


@dataclass
class Scenario:
    name: str
    target: tuple[float, float]
    circles: list[Circle] = field(default_factory=list)
    segments: list[Segment] = field(default_factory=list)
    start: Pose = Pose()
    apriori_circles: list[Circle] = field(default_factory=list)
    apriori_segments: list[Segment] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    description: str = ""

    def mission_config(self, overrides: Mapping[str, Any] | None = None) -> MissionConfig:
        cfg = copy.deepcopy(self.config)
        for key, value in (overrides or {}).items():
            _set_dotted(cfg, key, value)
        return build_config(cfg)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"schema": SCHEMA_VERSION, "name": self.name}
        if self.description:
            out["description"] = self.description
        out["seed"] = self.seed
        out["start"] = [self.start.x, self.start.y, self.start.theta]
        out["target"] = list(self.target)
        out["world"] = _geometry_dict(self.circles, self.segments)
        if self.apriori_circles or self.apriori_segments:
            out["apriori"] = _geometry_dict(self.apriori_circles, self.apriori_segments)
        if self.config:
            out["config"] = copy.deepcopy(self.config)
        return out


def _geometry_dict(circles, segments) -> dict[str, Any]:
    return {"circles": [{"center": list(c), "radius": r} for c, r in circles],
            "segments": [{"a": list(a), "b": list(b)} for a, b in segments]}


def _set_dotted(cfg: dict, key: str, value: Any) -> None:
    parts = key.split(".")
    node = cfg
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    node[parts[-1]] = value


def build_config(cfg: Mapping[str, Any]) -> MissionConfig:
    """MissionConfig from a (validated) ``[config]`` table."""
    try:
        jsonschema.validate(dict(cfg), _CONFIG)
    except jsonschema.ValidationError as exc:
        raise ScenarioParseError(f"config.{'.'.join(map(str, exc.absolute_path))}: {exc.message}") from None
    cfg = dict(cfg)
    sensor = SENSOR_PRESETS[cfg.pop("sensor_preset", "noiseless")]
    sensor = replace(sensor, **_tuples(cfg.pop("sensor", {})))
    controller = ControllerParams(**cfg.pop("controller", {}))
    vehicle = VehicleParams(**cfg.pop("vehicle", {}))
    return MissionConfig(controller=controller, vehicle=vehicle, sensor=sensor, **_tuples(cfg))


def _tuples(d: Mapping[str, Any]) -> dict[str, Any]:
    return {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}


def _geometry(node: Mapping[str, Any] | None) -> tuple[list[Circle], list[Segment]]:
    node = node or {}
    circles = [((float(c["center"][0]), float(c["center"][1])), float(c["radius"]))
               for c in node.get("circles", [])]
    segments = [((float(s["a"][0]), float(s["a"][1])), (float(s["b"][0]), float(s["b"][1])))
                for s in node.get("segments", [])]
    return circles, segments


def scenario_from_dict(data: Mapping[str, Any], source: str = "<scenario>") -> Scenario:
    try:
        jsonschema.validate(dict(data), SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = ".".join(map(str, exc.absolute_path)) or "<root>"
        raise ScenarioParseError(f"{source}: field '{where}': {exc.message}") from None
    circles, segments = _geometry(data.get("world"))
    ap_c, ap_s = _geometry(data.get("apriori"))
    sc = Scenario(
        name=data["name"],
        target=(float(data["target"][0]), float(data["target"][1])),
        circles=circles, segments=segments,
        start=Pose(*map(float, data.get("start", (0.0, 0.0, 0.0)))),
        apriori_circles=ap_c, apriori_segments=ap_s,
        config=copy.deepcopy(dict(data.get("config", {}))),
        seed=int(data.get("seed", 0)),
        description=data.get("description", ""),
    )
    validate_scenario(sc, source)
    return sc


def validate_scenario(sc: Scenario, source: str = "<scenario>") -> MissionConfig:
    """Semantic checks; returns the resolved mission config."""
    cfg = sc.mission_config()
    cx, cy = cfg.map_center if cfg.map_center is not None else (
        (sc.start.x + sc.target[0]) / 2, (sc.start.y + sc.target[1]) / 2)
    h = cfg.D / 2
    bounds = {"xmin": cx - h, "xmax": cx + h, "ymin": cy - h, "ymax": cy + h}
    for label, (x, y) in (("target", sc.target), ("start", (sc.start.x, sc.start.y))):
        if not x > bounds["xmin"]:
            raise ScenarioParseError(f"{source}: {label} x={x} violates bound xmin={bounds['xmin']}")
        if not x < bounds["xmax"]:
            raise ScenarioParseError(f"{source}: {label} x={x} violates bound xmax={bounds['xmax']}")
        if not y > bounds["ymin"]:
            raise ScenarioParseError(f"{source}: {label} y={y} violates bound ymin={bounds['ymin']}")
        if not y < bounds["ymax"]:
            raise ScenarioParseError(f"{source}: {label} y={y} violates bound ymax={bounds['ymax']}")
    if math.hypot(sc.target[0] - sc.start.x, sc.target[1] - sc.start.y) == 0:
        raise ScenarioParseError(f"{source}: target coincides with the start position")
    return cfg


def loads_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioParseError(f"{source}: {exc}") from None
    return scenario_from_dict(data, source)


def bundled_names() -> list[str]:
    root = resources.files("hpfnav") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("hpfnav") / "scenarios" / f"{name}.toml"))


def load_scenario(path: str | Path) -> Scenario:
    """Load a scenario file; a bare bundled name such as ``trap_180`` also works."""
    p = Path(path)
    if not p.exists() and str(path) in bundled_names():
        p = bundled_path(str(path))
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario {path}: {exc.strerror}") from None
    return loads_scenario(text, str(p))


def dumps_scenario(sc: Scenario) -> str:
    return tomli_w.dumps(sc.to_dict())


def save_scenario(sc: Scenario, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dumps_scenario(sc), encoding="utf-8")
    return path
