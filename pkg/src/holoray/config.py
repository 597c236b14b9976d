"""Experiment configuration: a YAML document parsed into plain frozen data.

The document has nested sections ``scene``, ``geometry``, ``plan``, ``noise``,
``output``, ``checks``; every validation error names the offending field path.
Parsing applies defaults, so ``parse_config(serialize_config(cfg)) == cfg``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import yaml

DEFAULT_S_GRID = (1000.0, 2000.0, 4000.0)
REPORT_FORMATS = ("csv", "csv+json")


class ConfigError(ValueError):
    """Malformed or invalid configuration; the message names the field path."""


@dataclass(frozen=True)
class SceneConfig:
    wave: tuple[float, float, float]
    entries: tuple[tuple[int, int, float, float], ...]
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    r_min: float = 1.0


@dataclass(frozen=True)
class RayGeometry:
    start: tuple[float, float, float]
    direction: tuple[float, float, float]


@dataclass(frozen=True)
class PlaneGeometry:
    point: tuple[float, float, float]
    tangents: tuple[tuple[float, float, float], tuple[float, float, float]]
    targets: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class PlanConfig:
    s_grid: tuple[float, ...] = DEFAULT_S_GRID
    tau: float | str = "auto"
    order: int = 2
    richardson: bool = True


@dataclass(frozen=True)
class NoiseConfig:
    amplitude: float
    seed: int = 0


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    format: str = "csv"


@dataclass(frozen=True)
class ChecksConfig:
    tolerance: float | None = None
    slope_range: tuple[float, float] | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    id: str
    scene: SceneConfig
    geometry: RayGeometry | PlaneGeometry
    plan: PlanConfig = PlanConfig()
    noise: NoiseConfig | None = None
    output: OutputConfig = OutputConfig()
    checks: ChecksConfig | None = None


def _require_map(node, path):
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(node).__name__}")
    return node


def _number(node, path):
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {node!r}")
    value = float(node)
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite")
    return value


def _integer(node, path):
    if isinstance(node, bool) or not isinstance(node, int):
        raise ConfigError(f"{path}: expected an integer, got {node!r}")
    return int(node)


def _vec3(node, path):
    if not isinstance(node, (list, tuple)) or len(node) != 3:
        raise ConfigError(f"{path}: expected a list of 3 numbers")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(node))


def _unknown_keys(node, allowed, path):
    extra = sorted(set(node) - set(allowed))
    if extra:
        raise ConfigError(f"{path}: unknown keys {extra}")


def _parse_scene(node, path) -> SceneConfig:
    node = _require_map(node, path)
    _unknown_keys(node, ("wave", "entries", "center", "r_min"), path)
    if "wave" not in node:
        raise ConfigError(f"{path}.wave: required key missing")
    wave = _vec3(node["wave"], f"{path}.wave")
    if all(v == 0.0 for v in wave):
        raise ConfigError(f"{path}.wave: must be nonzero")
    raw_entries = node.get("entries", [])
    if not isinstance(raw_entries, list):
        raise ConfigError(f"{path}.entries: expected a list")
    entries = []
    for i, item in enumerate(raw_entries):
        epath = f"{path}.entries[{i}]"
        if not isinstance(item, (list, tuple)) or len(item) != 4:
            raise ConfigError(f"{epath}: expected [l, m, re, im]")
        l = _integer(item[0], f"{epath}[0]")
        m = _integer(item[1], f"{epath}[1]")
        re = _number(item[2], f"{epath}[2]")
        im = _number(item[3], f"{epath}[3]")
        if l < 0 or l > 8:
            raise ConfigError(f"{epath}: degree l={l} outside 0..8")
        if abs(m) > l:
            raise ConfigError(f"{epath}: entry (l={l}, m={m}) violates |m| <= l")
        entries.append((l, m, re, im))
    center = _vec3(node.get("center", [0.0, 0.0, 0.0]), f"{path}.center")
    r_min = _number(node.get("r_min", 1.0), f"{path}.r_min")
    if r_min <= 0.0:
        raise ConfigError(f"{path}.r_min: must be positive")
    return SceneConfig(wave, tuple(entries), center, r_min)


def _check_exterior(point, scene: SceneConfig, path):
    dist = math.dist(point, scene.center)
    if dist < scene.r_min:
        raise ConfigError(
            f"{path}: point at distance {dist:g} from the source center lies "
            f"inside the exclusion ball (r_min={scene.r_min:g})"
        )


def _parse_geometry(node, scene: SceneConfig, path):
    node = _require_map(node, path)
    keys = set(node)
    if keys == {"ray"}:
        ray = _require_map(node["ray"], f"{path}.ray")
        _unknown_keys(ray, ("start", "direction"), f"{path}.ray")
        for key in ("start", "direction"):
            if key not in ray:
                raise ConfigError(f"{path}.ray.{key}: required key missing")
        start = _vec3(ray["start"], f"{path}.ray.start")
        direction = _vec3(ray["direction"], f"{path}.ray.direction")
        if all(v == 0.0 for v in direction):
            raise ConfigError(f"{path}.ray.direction: must be nonzero")
        _check_exterior(start, scene, f"{path}.ray.start")
        return RayGeometry(start, direction)
    if keys == {"plane"}:
        plane = _require_map(node["plane"], f"{path}.plane")
        _unknown_keys(plane, ("point", "tangents", "targets"), f"{path}.plane")
        for key in ("point", "tangents", "targets"):
            if key not in plane:
                raise ConfigError(f"{path}.plane.{key}: required key missing")
        point = _vec3(plane["point"], f"{path}.plane.point")
        tangents = plane["tangents"]
        if not isinstance(tangents, list) or len(tangents) != 2:
            raise ConfigError(f"{path}.plane.tangents: expected two 3-vectors")
        t1 = _vec3(tangents[0], f"{path}.plane.tangents[0]")
        t2 = _vec3(tangents[1], f"{path}.plane.tangents[1]")
        for name, t in (("tangents[0]", t1), ("tangents[1]", t2)):
            if abs(math.sqrt(sum(v * v for v in t)) - 1.0) > 1e-10:
                raise ConfigError(f"{path}.plane.{name}: must be a unit vector")
        if abs(sum(a * b for a, b in zip(t1, t2))) > 1e-10:
            raise ConfigError(f"{path}.plane.tangents: must be orthogonal")
        raw_targets = plane["targets"]
        if not isinstance(raw_targets, list) or not raw_targets:
            raise ConfigError(f"{path}.plane.targets: expected a nonempty list")
        targets = tuple(
            _vec3(t, f"{path}.plane.targets[{i}]") for i, t in enumerate(raw_targets)
        )
        _check_exterior(point, scene, f"{path}.plane.point")
        for i, t in enumerate(targets):
            _check_exterior(t, scene, f"{path}.plane.targets[{i}]")
        return PlaneGeometry(point, (t1, t2), targets)
    raise ConfigError(f"{path}: expected exactly one of 'ray' or 'plane', got {sorted(keys)}")


def _parse_plan(node, path) -> PlanConfig:
    if node is None:
        return PlanConfig()
    node = _require_map(node, path)
    _unknown_keys(node, ("s_grid", "tau", "order", "richardson"), path)
    raw_grid = node.get("s_grid")
    if raw_grid is None:
        s_grid = DEFAULT_S_GRID
    else:
        if not isinstance(raw_grid, list) or not raw_grid:
            raise ConfigError(f"{path}.s_grid: expected a nonempty list of radii")
        s_grid = tuple(_number(v, f"{path}.s_grid[{i}]") for i, v in enumerate(raw_grid))
        if any(s <= 0.0 for s in s_grid):
            raise ConfigError(f"{path}.s_grid: radii must be positive")
        if any(b <= a for a, b in zip(s_grid, s_grid[1:])):
            raise ConfigError(f"{path}.s_grid: must be strictly ascending")
    tau = node.get("tau", "auto")
    if tau != "auto":
        tau = _number(tau, f"{path}.tau")
        if tau <= 0.0:
            raise ConfigError(f"{path}.tau: must be positive or 'auto'")
        if s_grid[0] < 10.0 * tau:
            raise ConfigError(
                f"{path}.tau: min(s_grid)={s_grid[0]:g} violates min(s_grid) >= 10*tau"
            )
    order = _integer(node.get("order", 2), f"{path}.order")
    if order < 1:
        raise ConfigError(f"{path}.order: must be a positive integer")
    richardson = node.get("richardson", True)
    if not isinstance(richardson, bool):
        raise ConfigError(f"{path}.richardson: expected true or false")
    return PlanConfig(s_grid, tau, order, richardson)


def _parse_noise(node, path) -> NoiseConfig | None:
    if node is None:
        return None
    node = _require_map(node, path)
    _unknown_keys(node, ("amplitude", "seed"), path)
    if "amplitude" not in node:
        raise ConfigError(f"{path}.amplitude: required key missing")
    amplitude = _number(node["amplitude"], f"{path}.amplitude")
    if amplitude < 0.0:
        raise ConfigError(f"{path}.amplitude: must be nonnegative")
    seed = _integer(node.get("seed", 0), f"{path}.seed")
    if seed < 0:
        raise ConfigError(f"{path}.seed: must be nonnegative")
    return NoiseConfig(amplitude, seed)


def _parse_output(node, path) -> OutputConfig:
    if node is None:
        return OutputConfig()
    node = _require_map(node, path)
    _unknown_keys(node, ("directory", "format"), path)
    directory = node.get("directory", "out")
    if not isinstance(directory, str) or not directory:
        raise ConfigError(f"{path}.directory: expected a nonempty string")
    fmt = node.get("format", "csv")
    if fmt not in REPORT_FORMATS:
        raise ConfigError(f"{path}.format: expected one of {list(REPORT_FORMATS)}, got {fmt!r}")
    return OutputConfig(directory, fmt)


def _parse_checks(node, path) -> ChecksConfig | None:
    if node is None:
        return None
    node = _require_map(node, path)
    _unknown_keys(node, ("tolerance", "slope_range"), path)
    tolerance = node.get("tolerance")
    if tolerance is not None:
        tolerance = _number(tolerance, f"{path}.tolerance")
        if tolerance <= 0.0:
            raise ConfigError(f"{path}.tolerance: must be positive")
    slope_range = node.get("slope_range")
    if slope_range is not None:
        if not isinstance(slope_range, list) or len(slope_range) != 2:
            raise ConfigError(f"{path}.slope_range: expected [low, high]")
        low = _number(slope_range[0], f"{path}.slope_range[0]")
        high = _number(slope_range[1], f"{path}.slope_range[1]")
        if low >= high:
            raise ConfigError(f"{path}.slope_range: low must be below high")
        slope_range = (low, high)
    return ChecksConfig(tolerance, slope_range)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a YAML experiment document."""
    try:
        root = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"document is not valid YAML: {exc}") from exc
    root = _require_map(root, "config")
    _unknown_keys(
        root, ("id", "scene", "geometry", "plan", "noise", "output", "checks"), "config"
    )
    exp_id = root.get("id", "experiment")
    if not isinstance(exp_id, str) or not exp_id:
        raise ConfigError("config.id: expected a nonempty string")
    if "scene" not in root:
        raise ConfigError("config.scene: required section missing")
    if "geometry" not in root:
        raise ConfigError("config.geometry: required section missing")
    scene = _parse_scene(root["scene"], "scene")
    geometry = _parse_geometry(root["geometry"], scene, "geometry")
    plan = _parse_plan(root.get("plan"), "plan")
    noise = _parse_noise(root.get("noise"), "noise")
    output = _parse_output(root.get("output"), "output")
    checks = _parse_checks(root.get("checks"), "checks")
    return ExperimentConfig(exp_id, scene, geometry, plan, noise, output, checks)


def serialize_config(config: ExperimentConfig) -> str:
    """Render a config back to YAML; parsing the result reproduces it."""
    doc: dict = {"id": config.id}
    doc["scene"] = {
        "wave": list(config.scene.wave),
        "entries": [list(e) for e in config.scene.entries],
        "center": list(config.scene.center),
        "r_min": config.scene.r_min,
    }
    if isinstance(config.geometry, RayGeometry):
        doc["geometry"] = {
            "ray": {
                "start": list(config.geometry.start),
                "direction": list(config.geometry.direction),
            }
        }
    else:
        doc["geometry"] = {
            "plane": {
                "point": list(config.geometry.point),
                "tangents": [list(t) for t in config.geometry.tangents],
                "targets": [list(t) for t in config.geometry.targets],
            }
        }
    doc["plan"] = {
        "s_grid": list(config.plan.s_grid),
        "tau": config.plan.tau,
        "order": config.plan.order,
        "richardson": config.plan.richardson,
    }
    if config.noise is not None:
        doc["noise"] = {"amplitude": config.noise.amplitude, "seed": config.noise.seed}
    doc["output"] = {
        "directory": config.output.directory,
        "format": config.output.format,
    }
    if config.checks is not None:
        checks: dict = {}
        if config.checks.tolerance is not None:
            checks["tolerance"] = config.checks.tolerance
        if config.checks.slope_range is not None:
            checks["slope_range"] = list(config.checks.slope_range)
        doc["checks"] = checks
    return yaml.safe_dump(doc, sort_keys=False)
