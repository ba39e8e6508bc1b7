"""Sweeps over relative rotation and feature distance.

Each grid point places the feature on the boresight of both sonars at a
chosen fraction of each sonar's maximum range, builds the relative rotation
from roll/pitch/yaw, solves for the translation that makes the two
placements coincide, and records the size of the projection region (range
span for forward-looking to sidescan, image area for sidescan to
forward-looking).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import crossmodal
from .geometry import (
    FORWARD_LOOKING,
    SIDESCAN,
    FlObservation,
    RelativePose,
    SonarIntrinsics,
    SsObservation,
)

ANGLES = ("roll", "pitch", "yaw")
DIRECTIONS = ("fl2ss", "ss2fl")

DEFAULT_SINGLE_SAMPLES = 181
DEFAULT_PAIR_SAMPLES = 91
TENTHS = tuple(k / 10 for k in range(1, 10))


def rotation_from_rpy(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """``Rz(yaw) @ Ry(pitch) @ Rx(roll)``."""
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def solve_translation(
    feature_in_source, feature_in_target, rotation: np.ndarray, convention: str = "forward"
) -> np.ndarray:
    """Translation that makes a feature land where it is wanted in both frames.

    With the default ``"forward"`` convention the result satisfies
    ``rotation @ feature_in_source + t == feature_in_target``, i.e. it is
    consistent with :class:`~stereosonar.geometry.RelativePose`. The
    ``"literal"`` convention returns ``feature_in_source - rotation @ feature_in_target``
    instead, for experiments with the other reading of the relation.
    """
    src = _vec(feature_in_source)
    dst = _vec(feature_in_target)
    R = np.asarray(rotation, dtype=float)
    if convention == "forward":
        return dst - R @ src
    if convention == "literal":
        return src - R @ dst
    raise ValueError(f"unknown translation convention {convention!r}")


def _vec(p) -> np.ndarray:
    if hasattr(p, "as_array"):
        return p.as_array()
    return np.asarray(p, dtype=float).reshape(3)


@dataclass(frozen=True)
class SweepScenario:
    """One sweep: which angles vary, and which feature distances are used.

    ``swept`` maps an angle name to its sample count over ``[0, pi]``; the
    order of ``swept`` is the order of the record sort key. Distances are
    fractions of each sonar's maximum range.
    """

    direction: str
    swept: tuple[tuple[str, int], ...]
    source_fracs: tuple[float, ...]
    target_fracs: tuple[float, ...]
    fixed: tuple[tuple[str, float], ...] = ()
    index: int = 0
    intr_fl: SonarIntrinsics = FORWARD_LOOKING
    intr_ss: SonarIntrinsics = SIDESCAN
    n_arc: int = crossmodal.DEFAULT_ARC_SAMPLES
    n_theta: int = crossmodal.DEFAULT_SURFACE_SAMPLES[0]
    n_phi: int = crossmodal.DEFAULT_SURFACE_SAMPLES[1]
    area_cells: int = crossmodal.DEFAULT_AREA_CELLS
    translation_convention: str = "forward"

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        names = [name for name, _ in self.swept]
        if not 1 <= len(names) <= 2:
            raise ValueError("a scenario sweeps one or two angles")
        if len(set(names)) != len(names) or not set(names) <= set(ANGLES):
            raise ValueError(f"bad swept angles {names}")
        for name, count in self.swept:
            if count < 2:
                raise ValueError(f"{name} needs at least 2 samples, got {count}")
        for name, _ in self.fixed:
            if name not in ANGLES or name in names:
                raise ValueError(f"bad fixed angle {name!r}")
        for label, fracs in (("source_fracs", self.source_fracs), ("target_fracs", self.target_fracs)):
            if not fracs:
                raise ValueError(f"{label} is empty")
            if any(not 0 < f < 1 for f in fracs):
                raise ValueError(f"{label} must lie in (0, 1), got {fracs}")

    @property
    def source(self) -> SonarIntrinsics:
        return self.intr_fl if self.direction == "fl2ss" else self.intr_ss

    @property
    def target(self) -> SonarIntrinsics:
        return self.intr_ss if self.direction == "fl2ss" else self.intr_fl

    @property
    def swept_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.swept)

    def angle_grid(self) -> list[dict[str, float]]:
        """Angle assignments in sort order of the swept angles."""
        axes = [crossmodal.sample_interval(0.0, math.pi, n) for _, n in self.swept]
        base = {name: 0.0 for name in ANGLES}
        base.update(dict(self.fixed))
        out = []
        for values in itertools.product(*axes):
            angles = dict(base)
            angles.update(zip(self.swept_names, map(float, values)))
            out.append(angles)
        return out

    def describe(self) -> str:
        swept = " x ".join(f"{n}[{c}]" for n, c in self.swept)
        return (
            f"scenario {self.index} {self.direction}: sweep {swept}, "
            f"source fracs {list(self.source_fracs)}, target fracs {list(self.target_fracs)}"
        )


@dataclass(frozen=True)
class SweepRecord:
    roll: float
    pitch: float
    yaw: float
    d_source: float
    d_target: float
    metric: float
    visible: bool

    @property
    def not_visible(self) -> bool:
        return not self.visible


def _projector(s: SweepScenario, d_source: float) -> crossmodal.Projector:
    if s.direction == "fl2ss":
        cands = crossmodal.fl_back_project(FlObservation(d_source, 0.0), s.intr_fl, s.n_arc)
        return crossmodal.Projector(cands, s.intr_ss)
    cands = crossmodal.ss_back_project(SsObservation(d_source), s.intr_ss, s.n_theta, s.n_phi)
    dr, dtheta = crossmodal.default_cell_size(s.intr_fl, s.area_cells)
    return crossmodal.Projector(cands, s.intr_fl, dr, dtheta)


def run_scenario(s: SweepScenario) -> list[SweepRecord]:
    """Evaluate every (angles, source distance, target distance) grid point.

    Records come out sorted by swept angles, then source distance, then
    target distance.
    """
    d_sources = sorted(f * s.source.r_max for f in s.source_fracs)
    d_targets = sorted(f * s.target.r_max for f in s.target_fracs)
    projectors = {d: _projector(s, d) for d in d_sources}
    records = []
    for angles in s.angle_grid():
        R = rotation_from_rpy(angles["roll"], angles["pitch"], angles["yaw"])
        for d_src in d_sources:
            project = projectors[d_src]
            for d_tgt in d_targets:
                t = solve_translation((d_src, 0.0, 0.0), (d_tgt, 0.0, 0.0), R, s.translation_convention)
                region = project(RelativePose(R, t))
                records.append(
                    SweepRecord(
                        angles["roll"], angles["pitch"], angles["yaw"],
                        d_src, d_tgt, region.metric, region.visible,
                    )
                )
    return records


def standard_suite(
    single_samples: int = DEFAULT_SINGLE_SAMPLES,
    pair_samples: int = DEFAULT_PAIR_SAMPLES,
    **resolution,
) -> list[SweepScenario]:
    """The nine forward-looking-to-sidescan sweeps followed by their nine mirrors.

    Scenarios 1-3 sweep roll, pitch, yaw with the source sonar at half range
    and the target distance at 10%..90%; 4-6 swap which distance varies;
    7-9 sweep the (roll, pitch), (pitch, yaw) and (yaw, roll) pairs with
    both distances at half range. ``resolution`` is forwarded to every
    :class:`SweepScenario`.
    """
    half = (0.5,)
    layouts = []
    for name in ANGLES:
        layouts.append((((name, single_samples),), half, TENTHS))
    for name in ANGLES:
        layouts.append((((name, single_samples),), TENTHS, half))
    for a, b in (("roll", "pitch"), ("pitch", "yaw"), ("yaw", "roll")):
        layouts.append((((a, pair_samples), (b, pair_samples)), half, half))
    return [
        SweepScenario(direction, swept, src, tgt, index=i, **resolution)
        for direction in DIRECTIONS
        for i, (swept, src, tgt) in enumerate(layouts, start=1)
    ]


def find_scenario(suite: Sequence[SweepScenario], direction: str, index: int) -> SweepScenario:
    for s in suite:
        if s.direction == direction and s.index == index:
            return s
    raise KeyError(f"no scenario {index} for direction {direction!r}")
