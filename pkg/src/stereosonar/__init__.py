"""Projection geometry for stereo forward-looking / sidescan sonar pairs."""

from .geometry import (
    FORWARD_LOOKING,
    SIDESCAN,
    CartesianPoint,
    FlObservation,
    RelativePose,
    SonarIntrinsics,
    SphericalPoint,
    SsObservation,
    cartesian_to_spherical,
    in_fov,
    project_fl,
    project_ss,
    spherical_to_cartesian,
    transfer_spherical,
    transform_point,
)
from .crossmodal import (
    CandidateSet,
    ObservationError,
    ProjectionRegion,
    ValidSet,
    clip_to_fov,
    fl_back_project,
    fl_to_ss,
    region_area,
    span_length,
    ss_back_project,
    ss_to_fl,
)
from .sweep import (
    SweepRecord,
    SweepScenario,
    standard_suite,
    rotation_from_rpy,
    run_scenario,
    solve_translation,
)

__version__ = "0.1.0"
