"""Cross-modal projection between a forward-looking and a sidescan sonar.

A feature observed by one sonar is back-projected into the set of 3D points
consistent with the measurement (an elevation arc for forward-looking, a
constant-range surface patch for sidescan), moved into the other sonar's
frame, clipped to that sonar's field of view and projected into its
measurement space.

Continuous arcs and surfaces are represented by uniform, endpoint-inclusive
samples. Sample ``k`` of ``n`` over ``[lo, hi]`` is ``lo + (hi - lo) * (k / (n - 1))``,
which makes the grid for ``2n - 1`` samples contain the grid for ``n``
samples bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    FlObservation,
    RelativePose,
    SonarIntrinsics,
    SphericalPoint,
    SsObservation,
    in_fov_mask,
    sph2cart,
    transfer,
    transfer_closed_form,
    transform,
    cart2sph,
)

DEFAULT_ARC_SAMPLES = 1024
DEFAULT_SURFACE_SAMPLES = (512, 64)
DEFAULT_AREA_CELLS = 512

# Absorbs round-off from the frame transfer when clipping.
CLIP_TOL = 1e-12


class ObservationError(ValueError):
    """Observation lies outside the field of view of the sonar that made it."""


def sample_interval(lo: float, hi: float, n: int) -> np.ndarray:
    """``n >= 2`` uniform samples over ``[lo, hi]``, both ends included."""
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    k = np.arange(n, dtype=float)
    out = lo + (hi - lo) * (k / (n - 1))
    out[0], out[-1] = lo, hi
    return out


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """Sampled back-projection of an observation, in the source sonar frame.

    ``points`` holds ``[r, theta, phi]`` rows. For surfaces the rows are laid
    out theta-major, i.e. ``points.reshape(n_theta, n_phi, 3)``.
    """

    points: np.ndarray
    parameterization: str  # "arc" | "surface"
    source_obs: FlObservation | SsObservation
    shape: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.points)

    def as_points(self) -> list[SphericalPoint]:
        return [SphericalPoint(*map(float, row)) for row in self.points]


@dataclass(frozen=True, eq=False)
class ValidSet:
    """Candidates that survive clipping, in the target sonar frame.

    ``index`` gives, for each surviving row, its position in the candidate
    set it came from.
    """

    points: np.ndarray
    index: np.ndarray

    def __len__(self) -> int:
        return len(self.points)

    def as_points(self) -> list[SphericalPoint]:
        return [SphericalPoint(*map(float, row)) for row in self.points]


@dataclass(frozen=True, eq=False)
class ProjectionRegion:
    """Where a feature seen by one sonar may appear in the other sonar's data.

    ``kind`` is ``"ss_span"`` (a range interval on the sidescan range axis)
    or ``"fl_region"`` (a set of range/azimuth samples in the forward-looking
    image). An empty valid set gives ``visible=False`` with a zero metric.
    """

    kind: str
    visible: bool
    valid: ValidSet
    ss_span: tuple[float, float] | None = None
    ss_ranges: np.ndarray = field(default_factory=lambda: np.empty(0))
    fl_samples: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    span_length: float = 0.0
    area: float = 0.0

    @property
    def not_visible(self) -> bool:
        return not self.visible

    @property
    def metric(self) -> float:
        return self.span_length if self.kind == "ss_span" else self.area


# ---------------------------------------------------------------------------
# Back-projection
# ---------------------------------------------------------------------------


def fl_back_project(
    obs: FlObservation, intr_fl: SonarIntrinsics, n_phi: int = DEFAULT_ARC_SAMPLES
) -> CandidateSet:
    """Elevation arc of points consistent with a forward-looking measurement."""
    if not (intr_fl.r_min <= obs.r <= intr_fl.r_max and abs(obs.theta) <= intr_fl.azimuth_aperture / 2):
        raise ObservationError(f"{obs} is outside the forward-looking field of view")
    phi = sample_interval(intr_fl.phi_min, intr_fl.phi_max, n_phi)
    pts = np.empty((n_phi, 3))
    pts[:, 0] = obs.r
    pts[:, 1] = obs.theta
    pts[:, 2] = phi
    return CandidateSet(pts, "arc", obs, (n_phi,))


def ss_back_project(
    obs: SsObservation,
    intr_ss: SonarIntrinsics,
    n_theta: int = DEFAULT_SURFACE_SAMPLES[0],
    n_phi: int = DEFAULT_SURFACE_SAMPLES[1],
) -> CandidateSet:
    """Constant-range surface patch consistent with a sidescan measurement."""
    if not (intr_ss.r_min <= obs.r <= intr_ss.r_max):
        raise ObservationError(f"{obs} is outside the sidescan range limits")
    theta = sample_interval(intr_ss.theta_min, intr_ss.theta_max, n_theta)
    phi = sample_interval(intr_ss.phi_min, intr_ss.phi_max, n_phi)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    pts = np.stack([np.full(tt.size, obs.r), tt.ravel(), pp.ravel()], axis=-1)
    return CandidateSet(pts, "surface", obs, (n_theta, n_phi))


# ---------------------------------------------------------------------------
# Clipping and projection
# ---------------------------------------------------------------------------


def _clip(xyz_source: np.ndarray, pose: RelativePose, intr_target: SonarIntrinsics) -> ValidSet:
    rtp, degenerate = cart2sph(transform(xyz_source, pose.rotation, pose.translation))
    keep = in_fov_mask(rtp, intr_target, tol=CLIP_TOL) & ~degenerate
    index = np.flatnonzero(keep)
    return ValidSet(rtp[index], index)


def clip_to_fov(cands: CandidateSet, pose: RelativePose, intr_target: SonarIntrinsics) -> ValidSet:
    """Transfer candidates into the target frame and keep those it can see.

    Order is preserved. Points landing exactly on the target origin are
    dropped regardless of ``r_min``.
    """
    return _clip(sph2cart(cands.points), pose, intr_target)


def span_length(valid: ValidSet) -> float:
    """Spread of target ranges: ``max(r) - min(r)``, 0 for fewer than two points."""
    if len(valid) < 2:
        return 0.0
    r = valid.points[:, 0]
    return float(r.max() - r.min())


def _ss_region(valid: ValidSet) -> ProjectionRegion:
    if len(valid) == 0:
        return ProjectionRegion("ss_span", False, valid)
    ranges = valid.points[:, 0]
    lo, hi = float(ranges.min()), float(ranges.max())
    return ProjectionRegion(
        "ss_span", True, valid, ss_span=(lo, hi), ss_ranges=ranges, span_length=hi - lo
    )


def fl_to_ss(
    obs: FlObservation,
    pose: RelativePose,
    intr_fl: SonarIntrinsics,
    intr_ss: SonarIntrinsics,
    n_phi: int = DEFAULT_ARC_SAMPLES,
) -> ProjectionRegion:
    """Range interval in the sidescan data where a forward-looking feature can appear."""
    cands = fl_back_project(obs, intr_fl, n_phi)
    return _ss_region(clip_to_fov(cands, pose, intr_ss))


def _cell_shape(intr_fl: SonarIntrinsics, dr: float, dtheta: float) -> tuple[int, int]:
    n_r = max(1, math.ceil((intr_fl.r_max - intr_fl.r_min) / dr - 1e-9))
    n_t = max(1, math.ceil(intr_fl.azimuth_aperture / dtheta - 1e-9))
    return n_r, n_t


def default_cell_size(intr_fl: SonarIntrinsics, cells: int = DEFAULT_AREA_CELLS) -> tuple[float, float]:
    return (intr_fl.r_max - intr_fl.r_min) / cells, intr_fl.azimuth_aperture / cells


def marked_cells(samples: np.ndarray, intr_fl: SonarIntrinsics, dr: float, dtheta: float) -> np.ndarray:
    """Boolean ``(n_r, n_theta)`` raster of polar image cells holding a sample."""
    if dr <= 0 or dtheta <= 0:
        raise ValueError("cell sizes must be positive")
    n_r, n_t = _cell_shape(intr_fl, dr, dtheta)
    grid = np.zeros((n_r, n_t), dtype=bool)
    samples = np.asarray(samples, dtype=float).reshape(-1, 2)
    if len(samples):
        i = np.clip(np.floor((samples[:, 0] - intr_fl.r_min) / dr).astype(np.int64), 0, n_r - 1)
        j = np.clip(np.floor((samples[:, 1] - intr_fl.theta_min) / dtheta).astype(np.int64), 0, n_t - 1)
        grid[i, j] = True
    return grid


def cells_area(grid: np.ndarray, intr_fl: SonarIntrinsics, dr: float, dtheta: float) -> float:
    """Metric area of the marked cells of a raster from :func:`marked_cells`."""
    r_center = intr_fl.r_min + (np.arange(grid.shape[0]) + 0.5) * dr
    # fixed summation order: per-ring counts, then rings in index order
    return float(np.sum(r_center * grid.sum(axis=1)) * dr * dtheta)


def region_area(
    samples: np.ndarray, intr_fl: SonarIntrinsics, dr: float | None = None, dtheta: float | None = None
) -> float:
    """Approximate metric area covered by range/azimuth samples in the image.

    The image is split into polar cells of ``dr`` by ``dtheta`` starting at
    ``(r_min, -azimuth_aperture / 2)``; each cell holding at least one sample
    contributes ``r_center * dr * dtheta``.
    """
    d_r, d_t = default_cell_size(intr_fl)
    dr = d_r if dr is None else dr
    dtheta = d_t if dtheta is None else dtheta
    return cells_area(marked_cells(samples, intr_fl, dr, dtheta), intr_fl, dr, dtheta)


def _fl_region(valid: ValidSet, intr_fl: SonarIntrinsics, dr: float, dtheta: float) -> ProjectionRegion:
    if len(valid) == 0:
        return ProjectionRegion("fl_region", False, valid)
    samples = valid.points[:, :2]
    return ProjectionRegion(
        "fl_region", True, valid, fl_samples=samples, area=region_area(samples, intr_fl, dr, dtheta)
    )


def ss_to_fl(
    obs: SsObservation,
    pose: RelativePose,
    intr_ss: SonarIntrinsics,
    intr_fl: SonarIntrinsics,
    n_theta: int = DEFAULT_SURFACE_SAMPLES[0],
    n_phi: int = DEFAULT_SURFACE_SAMPLES[1],
    dr: float | None = None,
    dtheta: float | None = None,
) -> ProjectionRegion:
    """Image region in the forward-looking sonar where a sidescan feature can appear."""
    cands = ss_back_project(obs, intr_ss, n_theta, n_phi)
    d_r, d_t = default_cell_size(intr_fl)
    return _fl_region(
        clip_to_fov(cands, pose, intr_fl),
        intr_fl,
        d_r if dr is None else dr,
        d_t if dtheta is None else dtheta,
    )


# ---------------------------------------------------------------------------
# Expanded single-expression forms
# ---------------------------------------------------------------------------


def sidescan_range_closed_form(obs: FlObservation, phi: np.ndarray, pose: RelativePose) -> np.ndarray:
    """Sidescan range of the arc point at elevation ``phi``, one expression."""
    phi = np.asarray(phi, dtype=float)
    rtp = np.stack(np.broadcast_arrays(obs.r, obs.theta, phi), axis=-1)
    return transfer_closed_form(rtp, pose)[0][..., 0]


def forward_looking_closed_form(
    obs: SsObservation, theta: np.ndarray, phi: np.ndarray, pose: RelativePose
) -> np.ndarray:
    """Forward-looking ``[range, azimuth]`` of the surface point at ``(theta, phi)``."""
    rtp = np.stack(np.broadcast_arrays(obs.r, np.asarray(theta, float), np.asarray(phi, float)), axis=-1)
    return transfer_closed_form(rtp, pose)[0][..., :2]


def pipeline_transfer(cands: CandidateSet, pose: RelativePose) -> np.ndarray:
    """Step-by-step transfer of every candidate (unclipped), for cross-checks."""
    return transfer(cands.points, pose)[0]


# ---------------------------------------------------------------------------
# Reusable back-projections for repeated projection with many poses
# ---------------------------------------------------------------------------


class Projector:
    """Back-projects once and projects the same candidates under many poses.

    Gives the same results as :func:`fl_to_ss` / :func:`ss_to_fl` while
    skipping the repeated spherical-to-Cartesian step in sweeps.
    """

    def __init__(self, cands: CandidateSet, intr_target: SonarIntrinsics, dr=None, dtheta=None):
        self.cands = cands
        self.intr_target = intr_target
        self.xyz = sph2cart(cands.points)
        d_r, d_t = default_cell_size(intr_target)
        self.dr = d_r if dr is None else dr
        self.dtheta = d_t if dtheta is None else dtheta

    def __call__(self, pose: RelativePose) -> ProjectionRegion:
        valid = _clip(self.xyz, pose, self.intr_target)
        if self.cands.parameterization == "arc":
            return _ss_region(valid)
        return _fl_region(valid, self.intr_target, self.dr, self.dtheta)
