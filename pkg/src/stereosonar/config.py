"""YAML run configuration.

Angles are given in degrees and distances in metres; everything is
converted to radians when the document is parsed. Omitted sections fall
back to the simulation defaults (see ``stereosonar.geometry``). Example::

    direction: fl2ss
    observation:
      range_m: 5.0
      azimuth_deg: 0.0
    sidescan:
      r_max_m: 50
    pose:
      roll_deg: 0
      pitch_deg: 90
      yaw_deg: 0
      solve:
        source_distance_m: 5
        target_distance_m: 15
    resolution:
      arc_samples: 2048
    output: out/
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from . import crossmodal
from .geometry import (
    FORWARD_LOOKING,
    SIDESCAN,
    FlObservation,
    RelativePose,
    SonarIntrinsics,
    SsObservation,
)
from .sweep import DIRECTIONS, rotation_from_rpy, solve_translation


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


@dataclass(frozen=True)
class Resolution:
    arc_samples: int = crossmodal.DEFAULT_ARC_SAMPLES
    surface_theta_samples: int = crossmodal.DEFAULT_SURFACE_SAMPLES[0]
    surface_phi_samples: int = crossmodal.DEFAULT_SURFACE_SAMPLES[1]
    area_cells: int = crossmodal.DEFAULT_AREA_CELLS


@dataclass(frozen=True)
class RunConfig:
    direction: str | None = None
    observation: FlObservation | SsObservation | None = None
    intr_fl: SonarIntrinsics = FORWARD_LOOKING
    intr_ss: SonarIntrinsics = SIDESCAN
    pose: RelativePose = field(default_factory=RelativePose.identity)
    resolution: Resolution = Resolution()
    output: str | None = None


_TOP_KEYS = {"direction", "observation", "forward_looking", "sidescan", "pose", "resolution", "output"}
_SONAR_KEYS = ("r_min_m", "r_max_m", "azimuth_aperture_deg", "elevation_aperture_deg")
_POSE_KEYS = {"roll_deg", "pitch_deg", "yaw_deg", "translation_m", "solve"}
_SOLVE_KEYS = {"source_distance_m", "target_distance_m"}


def _section(doc: dict, key: str, allowed) -> dict:
    value = doc.get(key, {})
    if value is None:
        value = {}
    if not isinstance(value, dict):
        raise ConfigError(f"{key}: expected a mapping")
    unknown = set(value) - set(allowed)
    if unknown:
        raise ConfigError(f"{key}: unknown key(s) {sorted(unknown)}")
    return value


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{name}: must be finite")
    return float(value)


def _count(value: Any, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{name}: must be >= {minimum}, got {value}")
    return value


def _sonar(doc: dict, key: str, default: SonarIntrinsics) -> SonarIntrinsics:
    sec = _section(doc, key, _SONAR_KEYS)
    r_min = _number(sec.get("r_min_m", default.r_min), f"{key}.r_min_m")
    r_max = _number(sec.get("r_max_m", default.r_max), f"{key}.r_max_m")
    az_deg = _number(sec.get("azimuth_aperture_deg", 1.0), f"{key}.azimuth_aperture_deg")
    el_deg = _number(sec.get("elevation_aperture_deg", 1.0), f"{key}.elevation_aperture_deg")
    if r_min < 0:
        raise ConfigError(f"{key}.r_min_m: must be >= 0, got {r_min}")
    if r_min >= r_max:
        raise ConfigError(f"{key}.r_max_m: must exceed r_min_m ({r_min}), got {r_max}")
    if not 0 < az_deg <= 360:
        raise ConfigError(f"{key}.azimuth_aperture_deg: must lie in (0, 360], got {az_deg}")
    if not 0 < el_deg <= 180:
        raise ConfigError(f"{key}.elevation_aperture_deg: must lie in (0, 180], got {el_deg}")
    # unset apertures keep the default's radian value untouched
    az = math.radians(az_deg) if "azimuth_aperture_deg" in sec else default.azimuth_aperture
    el = math.radians(el_deg) if "elevation_aperture_deg" in sec else default.elevation_aperture
    return SonarIntrinsics(r_min, r_max, az, el)


def _pose(doc: dict) -> RelativePose:
    sec = _section(doc, "pose", _POSE_KEYS)
    rpy = [math.radians(_number(sec.get(k, 0.0), f"pose.{k}")) for k in ("roll_deg", "pitch_deg", "yaw_deg")]
    R = rotation_from_rpy(*rpy)
    if "translation_m" in sec and "solve" in sec:
        raise ConfigError("pose: give either translation_m or solve, not both")
    if "solve" in sec:
        solve = _section(sec, "solve", _SOLVE_KEYS)
        missing = _SOLVE_KEYS - set(solve)
        if missing:
            raise ConfigError(f"pose.solve: missing {sorted(missing)}")
        d_src = _number(solve["source_distance_m"], "pose.solve.source_distance_m")
        d_tgt = _number(solve["target_distance_m"], "pose.solve.target_distance_m")
        if d_src <= 0 or d_tgt <= 0:
            raise ConfigError("pose.solve: distances must be positive")
        t = solve_translation((d_src, 0.0, 0.0), (d_tgt, 0.0, 0.0), R)
    else:
        raw = sec.get("translation_m", [0.0, 0.0, 0.0])
        if not isinstance(raw, list) or len(raw) != 3:
            raise ConfigError("pose.translation_m: expected a list of 3 numbers")
        t = np.array([_number(v, f"pose.translation_m[{i}]") for i, v in enumerate(raw)])
    return RelativePose(R, t)


def _observation(doc: dict, direction: str | None):
    if "observation" not in doc:
        return None
    sec = _section(doc, "observation", {"range_m", "azimuth_deg"})
    if "range_m" not in sec:
        raise ConfigError("observation.range_m: required")
    r = _number(sec["range_m"], "observation.range_m")
    if r < 0:
        raise ConfigError(f"observation.range_m: must be >= 0, got {r}")
    if direction == "ss2fl":
        if "azimuth_deg" in sec:
            raise ConfigError("observation.azimuth_deg: a sidescan observation has range only")
        return SsObservation(r)
    if direction is None:
        raise ConfigError("observation: needs a direction to interpret it")
    return FlObservation(r, math.radians(_number(sec.get("azimuth_deg", 0.0), "observation.azimuth_deg")))


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML configuration document.

    Raises:
        ConfigError: on malformed YAML (message carries the line number) or
            on any invalid value (message names the offending field).
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"malformed config at {where}: {exc.problem or exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be a mapping")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"config: unknown key(s) {sorted(unknown)}")

    direction = doc.get("direction")
    if direction is not None and direction not in DIRECTIONS:
        raise ConfigError(f"direction: must be one of {list(DIRECTIONS)}, got {direction!r}")

    intr_fl = _sonar(doc, "forward_looking", FORWARD_LOOKING)
    intr_ss = _sonar(doc, "sidescan", SIDESCAN)
    res = _section(doc, "resolution", Resolution.__dataclass_fields__)
    resolution = Resolution(
        **{k: _count(v, f"resolution.{k}", 1 if k == "area_cells" else 2) for k, v in res.items()}
    )
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output: expected a path string")
    return RunConfig(
        direction=direction,
        observation=_observation(doc, direction),
        intr_fl=intr_fl,
        intr_ss=intr_ss,
        pose=_pose(doc),
        resolution=resolution,
        output=output,
    )


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
