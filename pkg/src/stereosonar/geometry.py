"""Coordinate systems, sonar intrinsics, relative poses and projection models.

Frame convention (every sonar): +x is the boresight, azimuth ``theta`` is
measured in the x-y plane from +x toward +y, elevation ``phi`` is measured
from the x-y plane toward +z. Angles are radians throughout.

Two layers are provided:

* scalar value types (:class:`SphericalPoint`, :class:`CartesianPoint`, ...)
  and operations on them, convenient for single points;
* array functions operating on ``(..., 3)`` arrays of ``[r, theta, phi]`` or
  ``[x, y, z]``, used by the back-projection and sweep code.

The scalar operations are thin wrappers over the array functions so the two
layers cannot disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

ORTHONORMAL_TOL = 1e-9


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphericalPoint:
    """A point as (range, azimuth, elevation).

    ``degenerate`` is set when the point came from converting the origin,
    where both angles are undefined and reported as 0 by convention.
    """

    r: float
    theta: float
    phi: float
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError(f"non-finite spherical point {self!r}")
        if self.r < 0:
            raise ValueError(f"range must be >= 0, got {self.r}")
        if not (-math.pi < self.theta <= math.pi):
            raise ValueError(f"azimuth must lie in (-pi, pi], got {self.theta}")
        if not (-math.pi / 2 <= self.phi <= math.pi / 2):
            raise ValueError(f"elevation must lie in [-pi/2, pi/2], got {self.phi}")

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.theta, self.phi], dtype=float)


@dataclass(frozen=True)
class CartesianPoint:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite cartesian point {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class SonarIntrinsics:
    """Field of view of a sonar: range limits and full-width apertures.

    Apertures are centred on the boresight, so the azimuth limits are
    ``[-azimuth_aperture / 2, +azimuth_aperture / 2]`` and likewise for
    elevation.
    """

    r_min: float
    r_max: float
    azimuth_aperture: float
    elevation_aperture: float

    def __post_init__(self) -> None:
        for name in ("r_min", "r_max", "azimuth_aperture", "elevation_aperture"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not (0 <= self.r_min < self.r_max):
            raise ValueError(f"need 0 <= r_min < r_max, got r_min={self.r_min}, r_max={self.r_max}")
        if not (0 < self.azimuth_aperture <= 2 * math.pi):
            raise ValueError(f"azimuth_aperture must lie in (0, 2*pi], got {self.azimuth_aperture}")
        if not (0 < self.elevation_aperture <= math.pi):
            raise ValueError(f"elevation_aperture must lie in (0, pi], got {self.elevation_aperture}")

    @classmethod
    def from_degrees(
        cls, r_min: float, r_max: float, azimuth_deg: float, elevation_deg: float
    ) -> "SonarIntrinsics":
        return cls(r_min, r_max, math.radians(azimuth_deg), math.radians(elevation_deg))

    @property
    def theta_min(self) -> float:
        return -self.azimuth_aperture / 2

    @property
    def theta_max(self) -> float:
        return self.azimuth_aperture / 2

    @property
    def phi_min(self) -> float:
        return -self.elevation_aperture / 2

    @property
    def phi_max(self) -> float:
        return self.elevation_aperture / 2


# Simulation parameters used for the published analysis.
FORWARD_LOOKING = SonarIntrinsics.from_degrees(0.1, 10.0, 60.0, 12.0)
SIDESCAN = SonarIntrinsics.from_degrees(0.1, 30.0, 130.0, 0.3)


@dataclass(frozen=True, eq=False)
class RelativePose:
    """Rigid transform taking sonar-1 coordinates into sonar-2's frame.

    ``p2 = rotation @ p1 + translation``.
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self) -> None:
        R = np.array(self.rotation, dtype=float)
        t = np.array(self.translation, dtype=float).reshape(-1)
        if R.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got shape {R.shape}")
        if t.shape != (3,):
            raise ValueError(f"translation must be a 3-vector, got shape {t.shape}")
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(t))):
            raise ValueError("pose contains non-finite values")
        if np.max(np.abs(R @ R.T - np.eye(3))) > ORTHONORMAL_TOL:
            raise ValueError("rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > ORTHONORMAL_TOL:
            raise ValueError("rotation must have determinant +1")
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RelativePose":
        return cls(np.eye(3), np.zeros(3))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RelativePose):
            return NotImplemented
        return bool(
            np.array_equal(self.rotation, other.rotation)
            and np.array_equal(self.translation, other.translation)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class FlObservation:
    """Feature measured by a forward-looking sonar: range and azimuth."""

    r: float
    theta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and math.isfinite(self.theta)):
            raise ValueError("observation must be finite")
        if self.r < 0:
            raise ValueError(f"range must be >= 0, got {self.r}")


@dataclass(frozen=True)
class SsObservation:
    """Feature measured by a sidescan sonar: range only."""

    r: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.r):
            raise ValueError("observation must be finite")
        if self.r < 0:
            raise ValueError(f"range must be >= 0, got {self.r}")


# ---------------------------------------------------------------------------
# Array functions
# ---------------------------------------------------------------------------


def normalize_angle(theta):
    """Wrap angles into (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), 2 * np.pi)
    return wrapped if np.ndim(wrapped) else float(wrapped)


def sph2cart(rtp: np.ndarray) -> np.ndarray:
    """``[r, theta, phi]`` rows to ``[x, y, z]`` rows."""
    rtp = np.asarray(rtp, dtype=float)
    r, theta, phi = rtp[..., 0], rtp[..., 1], rtp[..., 2]
    cos_phi = np.cos(phi)
    return np.stack(
        [r * np.cos(theta) * cos_phi, r * np.sin(theta) * cos_phi, r * np.sin(phi)],
        axis=-1,
    )


def cart2sph(xyz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``[x, y, z]`` rows to ``[r, theta, phi]`` rows.

    Azimuth uses the full-quadrant arctangent and is wrapped into (-pi, pi],
    so points behind the sensor come out with ``|theta| > pi/2``.

    Returns:
        ``(rtp, degenerate)`` where ``degenerate`` marks inputs at the origin;
        those rows are ``(0, 0, 0)``.
    """
    xyz = np.asarray(xyz, dtype=float)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    r = np.hypot(np.hypot(x, y), z)
    degenerate = r == 0.0
    theta = np.arctan2(y, x)
    theta = np.where(theta == -np.pi, np.pi, theta)
    with np.errstate(invalid="ignore", divide="ignore"):
        phi = np.arcsin(np.clip(z / r, -1.0, 1.0))
    theta = np.where(degenerate, 0.0, theta)
    phi = np.where(degenerate, 0.0, phi)
    return np.stack([r, theta, phi], axis=-1), degenerate


def transform(xyz: np.ndarray, rotation: np.ndarray, translation: np.ndarray) -> np.ndarray:
    """Apply ``R @ p + t`` to every row."""
    xyz = np.asarray(xyz, dtype=float)
    return xyz @ np.asarray(rotation, dtype=float).T + np.asarray(translation, dtype=float)


def transfer(rtp: np.ndarray, pose: RelativePose) -> tuple[np.ndarray, np.ndarray]:
    """Spherical points in frame 1 to spherical points in frame 2, step by step."""
    return cart2sph(transform(sph2cart(rtp), pose.rotation, pose.translation))


def transfer_closed_form(rtp: np.ndarray, pose: RelativePose) -> tuple[np.ndarray, np.ndarray]:
    """Same mapping as :func:`transfer`, written out as one expression per output.

    Each transformed coordinate is
    ``R_i1 r cos(theta) cos(phi) + R_i2 r sin(theta) cos(phi) + R_i3 r sin(phi) + t_i``;
    range is the root of their sum of squares, azimuth is ``atan2`` of the
    second over the first and elevation is ``asin`` of the third over range.
    """
    rtp = np.asarray(rtp, dtype=float)
    r, theta, phi = rtp[..., 0], rtp[..., 1], rtp[..., 2]
    R, t = pose.rotation, pose.translation
    a = r * np.cos(theta) * np.cos(phi)
    b = r * np.sin(theta) * np.cos(phi)
    c = r * np.sin(phi)
    row = [R[i, 0] * a + R[i, 1] * b + R[i, 2] * c + t[i] for i in range(3)]
    rng = np.sqrt(sum(comp**2 for comp in row))
    degenerate = rng == 0.0
    az = np.arctan2(row[1], row[0])
    az = np.where(az == -np.pi, np.pi, az)
    with np.errstate(invalid="ignore", divide="ignore"):
        el = np.arcsin(np.clip(row[2] / rng, -1.0, 1.0))
    az = np.where(degenerate, 0.0, az)
    el = np.where(degenerate, 0.0, el)
    return np.stack([rng, az, el], axis=-1), degenerate


def in_fov_mask(rtp: np.ndarray, intr: SonarIntrinsics, tol: float = 0.0) -> np.ndarray:
    """Boolean mask of rows inside the field of view.

    ``tol`` widens every limit by an absolute amount (metres for range,
    radians for angles).
    """
    rtp = np.asarray(rtp, dtype=float)
    r, theta, phi = rtp[..., 0], rtp[..., 1], rtp[..., 2]
    return (
        (r >= intr.r_min - tol)
        & (r <= intr.r_max + tol)
        & (np.abs(theta) <= intr.azimuth_aperture / 2 + tol)
        & (np.abs(phi) <= intr.elevation_aperture / 2 + tol)
    )


# ---------------------------------------------------------------------------
# Scalar operations
# ---------------------------------------------------------------------------


def project_ss(p: SphericalPoint) -> float:
    """Sidescan measurement of a point: its range."""
    return p.r


def project_fl(p: SphericalPoint) -> tuple[float, float]:
    """Forward-looking measurement of a point: range and azimuth."""
    return p.r, p.theta


def spherical_to_cartesian(p: SphericalPoint) -> CartesianPoint:
    x, y, z = sph2cart(p.as_array())
    return CartesianPoint(float(x), float(y), float(z))


def _to_spherical(rtp: np.ndarray, degenerate) -> SphericalPoint:
    return SphericalPoint(float(rtp[0]), float(rtp[1]), float(rtp[2]), degenerate=bool(degenerate))


def cartesian_to_spherical(p: CartesianPoint) -> SphericalPoint:
    """Convert to spherical; the origin maps to ``(0, 0, 0)`` flagged degenerate."""
    rtp, degenerate = cart2sph(p.as_array())
    return _to_spherical(rtp, degenerate)


def transform_point(p: CartesianPoint, pose: RelativePose) -> CartesianPoint:
    x, y, z = transform(p.as_array(), pose.rotation, pose.translation)
    return CartesianPoint(float(x), float(y), float(z))


def transfer_spherical(
    p: SphericalPoint, pose: RelativePose, method: str = "pipeline"
) -> SphericalPoint:
    """Express a spherical point from sonar 1 in sonar 2's spherical frame.

    ``method`` selects the chained conversion (``"pipeline"``) or the
    expanded single-expression form (``"closed_form"``); both agree to
    rounding error.
    """
    if method == "pipeline":
        rtp, degenerate = transfer(p.as_array(), pose)
    elif method == "closed_form":
        rtp, degenerate = transfer_closed_form(p.as_array(), pose)
    else:
        raise ValueError(f"unknown transfer method {method!r}")
    return _to_spherical(rtp, degenerate)


def in_fov(p: SphericalPoint, intr: SonarIntrinsics) -> bool:
    return bool(in_fov_mask(p.as_array(), intr))
