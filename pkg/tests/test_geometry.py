import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stereosonar.geometry import (
    FORWARD_LOOKING,
    SIDESCAN,
    CartesianPoint,
    FlObservation,
    RelativePose,
    SonarIntrinsics,
    SphericalPoint,
    SsObservation,
    cart2sph,
    cartesian_to_spherical,
    in_fov,
    in_fov_mask,
    normalize_angle,
    project_fl,
    project_ss,
    sph2cart,
    spherical_to_cartesian,
    transfer,
    transfer_closed_form,
    transfer_spherical,
    transform,
    transform_point,
)
from stereosonar.sweep import rotation_from_rpy

from cases import random_rotation


def Rx(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def Ry(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def Rz(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


# ── value types ─────────────────────────────────────────────────────────


def test_table_intrinsics():
    assert FORWARD_LOOKING.r_min == 0.1 and FORWARD_LOOKING.r_max == 10.0
    assert FORWARD_LOOKING.azimuth_aperture == pytest.approx(math.radians(60))
    assert FORWARD_LOOKING.elevation_aperture == pytest.approx(math.radians(12))
    assert SIDESCAN.r_min == 0.1 and SIDESCAN.r_max == 30.0
    assert SIDESCAN.azimuth_aperture == pytest.approx(math.radians(130))
    assert SIDESCAN.elevation_aperture == pytest.approx(math.radians(0.3))
    assert SIDESCAN.theta_min == -SIDESCAN.theta_max
    assert FORWARD_LOOKING.phi_max == pytest.approx(math.radians(6))


@pytest.mark.parametrize(
    "args",
    [
        (-0.1, 10, 1, 1),
        (5, 5, 1, 1),
        (6, 5, 1, 1),
        (0, 10, 0, 1),
        (0, 10, 7, 1),
        (0, 10, 1, 0),
        (0, 10, 1, 3.2),
    ],
)
def test_intrinsics_rejects_invalid(args):
    with pytest.raises(ValueError):
        SonarIntrinsics(*args)


@pytest.mark.parametrize("r, theta, phi", [(-1, 0, 0), (1, -math.pi, 0), (1, 4, 0), (1, 0, 1.6), (math.nan, 0, 0)])
def test_spherical_point_rejects_invalid(r, theta, phi):
    with pytest.raises(ValueError):
        SphericalPoint(r, theta, phi)


def test_spherical_point_accepts_pi():
    assert SphericalPoint(1, math.pi, -math.pi / 2).theta == math.pi


def test_pose_validation():
    RelativePose(Rz(0.3), [1, 2, 3])
    with pytest.raises(ValueError):
        RelativePose(np.diag([1, 1, -1]), np.zeros(3))  # reflection
    with pytest.raises(ValueError):
        RelativePose(2 * np.eye(3), np.zeros(3))
    with pytest.raises(ValueError):
        RelativePose(np.eye(3), np.zeros(2))
    pose = RelativePose.identity()
    with pytest.raises(ValueError):
        pose.rotation[0, 0] = 2.0


def test_observations_reject_negative_range():
    with pytest.raises(ValueError):
        FlObservation(-1, 0)
    with pytest.raises(ValueError):
        SsObservation(-0.5)


# ── projection models ───────────────────────────────────────────────────


@pytest.mark.parametrize(
    "p, expected", [((5, 0.3, -0.1), 5), ((0, 0, 0), 0), ((17.2, 1.0, 0.002), 17.2)]
)
def test_project_ss(p, expected):
    assert project_ss(SphericalPoint(*p)) == expected


@pytest.mark.parametrize(
    "p, expected", [((5, 0.3, -0.1), (5, 0.3)), ((1, 0, 0), (1, 0)), ((9.9, -0.5, 0.1), (9.9, -0.5))]
)
def test_project_fl(p, expected):
    assert project_fl(SphericalPoint(*p)) == expected


@given(
    st.floats(0, 1e3),
    st.floats(-math.pi, math.pi).filter(lambda t: t > -math.pi),
    st.floats(-math.pi / 2, math.pi / 2),
)
def test_ss_is_first_component_of_fl(r, theta, phi):
    p = SphericalPoint(r, theta, phi)
    assert project_ss(p) == project_fl(p)[0]


# ── coordinate conversions ──────────────────────────────────────────────


def test_spherical_to_cartesian_examples():
    assert spherical_to_cartesian(SphericalPoint(1, 0, 0)) == CartesianPoint(1, 0, 0)
    q = spherical_to_cartesian(SphericalPoint(2, math.pi / 2, 0))
    assert (q.x, q.y, q.z) == pytest.approx((0, 2, 0), abs=1e-15)
    # scalar evaluation of x = r cos t cos p, y = r sin t cos p, z = r sin p
    q = spherical_to_cartesian(SphericalPoint(3, 0.4, -0.2))
    assert (q.x, q.y, q.z) == pytest.approx((2.70810328912638, 1.1449677062851449, -0.5960079923851836), rel=1e-14)


def test_cartesian_to_spherical_examples():
    assert cartesian_to_spherical(CartesianPoint(1, 0, 0)) == SphericalPoint(1, 0, 0)
    down = cartesian_to_spherical(CartesianPoint(0, 0, -4))
    assert (down.r, down.theta, down.phi) == (4, 0, -math.pi / 2)
    back = cartesian_to_spherical(CartesianPoint(-1, -1, 0))
    assert back.r == pytest.approx(math.sqrt(2))
    assert back.theta == pytest.approx(-3 * math.pi / 4)  # not the two-quadrant pi/4
    assert back.phi == 0


def test_origin_is_degenerate():
    p = cartesian_to_spherical(CartesianPoint(0, 0, 0))
    assert (p.r, p.theta, p.phi) == (0, 0, 0)
    assert p.degenerate
    assert not cartesian_to_spherical(CartesianPoint(1e-300, 0, 0)).degenerate
    assert not in_fov(p, FORWARD_LOOKING)


def test_azimuth_normalized_to_half_open_interval():
    rtp, _ = cart2sph(np.array([-1.0, -0.0, 0.0]))
    assert rtp[1] == math.pi
    assert normalize_angle(-math.pi) == math.pi
    assert normalize_angle(3 * math.pi) == pytest.approx(math.pi)
    np.testing.assert_allclose(normalize_angle(np.array([0.1, -0.1, 2 * math.pi + 0.1])), [0.1, -0.1, 0.1])


def test_round_trip_10k():
    rng = np.random.default_rng(7)
    n = 10_000
    rtp = np.stack(
        [
            rng.uniform(1e-6, 1e3, n),
            rng.uniform(-math.pi, math.pi, n),
            rng.uniform(-(math.pi / 2 - 1e-6), math.pi / 2 - 1e-6, n),
        ],
        axis=-1,
    )
    back, degenerate = cart2sph(sph2cart(rtp))
    assert not degenerate.any()
    np.testing.assert_allclose(back, rtp, rtol=1e-9, atol=0)


@given(
    st.floats(1e-6, 1e3),
    st.floats(-math.pi, math.pi).filter(lambda t: t > -math.pi),
    st.floats(-(math.pi / 2 - 1e-6), math.pi / 2 - 1e-6),
)
def test_round_trip_scalar(r, theta, phi):
    back = cartesian_to_spherical(spherical_to_cartesian(SphericalPoint(r, theta, phi)))
    assert back.r == pytest.approx(r, rel=1e-9)
    # angles near zero carry absolute, not relative, rounding error
    assert back.theta == pytest.approx(theta, rel=1e-9, abs=1e-12)
    assert back.phi == pytest.approx(phi, rel=1e-9, abs=1e-12)


# ── rigid transform ─────────────────────────────────────────────────────


def test_transform_point_examples():
    p = CartesianPoint(1, 2, 3)
    assert transform_point(p, RelativePose.identity()) == p
    moved = transform_point(CartesianPoint(1, 0, 0), RelativePose(np.eye(3), [0, 0, -2]))
    assert moved == CartesianPoint(1, 0, -2)
    # hand multiply: Rz(pi/2) (1, 2, 3) = (-2, 1, 3); plus (1, 1, 1)
    q = transform_point(p, RelativePose(Rz(math.pi / 2), [1, 1, 1]))
    assert (q.x, q.y, q.z) == pytest.approx((-1, 2, 4), abs=1e-14)


def test_isometry():
    rng = np.random.default_rng(3)
    for _ in range(200):
        R, t = random_rotation(rng), rng.normal(scale=20, size=3)
        p, q = rng.normal(scale=50, size=(2, 3))
        d = np.linalg.norm(transform(p, R, t) - transform(q, R, t))
        assert abs(d - np.linalg.norm(p - q)) <= 1e-9


# ── transfer between frames ─────────────────────────────────────────────


@pytest.mark.parametrize("method", ["pipeline", "closed_form"])
def test_transfer_examples(method):
    pose = RelativePose.identity()
    p = SphericalPoint(5, 0.2, -0.05)
    q = transfer_spherical(p, pose, method)
    assert (q.r, q.theta, q.phi) == pytest.approx((5, 0.2, -0.05), rel=1e-14)

    behind = transfer_spherical(SphericalPoint(5, 0, 0), RelativePose(np.eye(3), [-10, 0, 0]), method)
    assert (behind.r, behind.theta, behind.phi) == (5, math.pi, 0)

    # scalar oracle for R = Rx(0.3) Ry(0.1), t = (0.5, -1, 2)
    q = transfer_spherical(SphericalPoint(5, 0.2, 0.05), RelativePose(Rx(0.3) @ Ry(0.1), [0.5, -1, 2]), method)
    assert (q.r, q.theta, q.phi) == pytest.approx(
        (5.776078063085167, 0.003467610730451304, 0.3654039465289913), rel=1e-12
    )


def test_transfer_to_origin_is_flagged():
    pose = RelativePose(np.eye(3), [-5, 0, 0])
    for method in ("pipeline", "closed_form"):
        q = transfer_spherical(SphericalPoint(5, 0, 0), pose, method)
        assert q.degenerate and q.r == 0


def test_transfer_unknown_method():
    with pytest.raises(ValueError):
        transfer_spherical(SphericalPoint(1, 0, 0), RelativePose.identity(), "magic")


def test_closed_form_matches_pipeline_10k():
    rng = np.random.default_rng(11)
    n = 10_000
    rtp = np.stack(
        [rng.uniform(0.1, 30, n), rng.uniform(-math.pi, math.pi, n), rng.uniform(-1.5, 1.5, n)], axis=-1
    )
    worst = 0.0
    for chunk in np.array_split(np.arange(n), 100):
        pose = RelativePose(random_rotation(rng), rng.normal(scale=10, size=3))
        a, _ = transfer(rtp[chunk], pose)
        b, _ = transfer_closed_form(rtp[chunk], pose)
        worst = max(worst, float(np.max(np.abs(a - b))))
    assert worst <= 1e-9


# ── field of view ───────────────────────────────────────────────────────


def test_in_fov_examples():
    assert in_fov(SphericalPoint(5, 0, 0), FORWARD_LOOKING)
    assert not in_fov(SphericalPoint(5, 0, 0.2), FORWARD_LOOKING)  # 11.5 deg > 6 deg
    assert not in_fov(SphericalPoint(0.05, 0, 0), FORWARD_LOOKING)
    assert not in_fov(SphericalPoint(0.05, 0, 0), SIDESCAN)


def test_in_fov_limits_are_inclusive():
    fl = FORWARD_LOOKING
    assert in_fov(SphericalPoint(fl.r_min, fl.theta_max, fl.phi_min), fl)
    assert in_fov(SphericalPoint(fl.r_max, fl.theta_min, fl.phi_max), fl)
    assert not in_fov(SphericalPoint(math.nextafter(fl.r_max, 11), 0, 0), fl)


@given(
    st.floats(0, 40),
    st.floats(0, math.pi).filter(lambda t: t < math.pi),
    st.floats(0, math.pi / 2),
    st.sampled_from([FORWARD_LOOKING, SIDESCAN]),
)
def test_in_fov_symmetric(r, theta, phi, intr):
    results = {in_fov(SphericalPoint(r, s * theta, u * phi), intr) for s in (1, -1) for u in (1, -1)}
    assert len(results) == 1


def test_in_fov_mask_matches_scalar():
    rng = np.random.default_rng(5)
    rtp = np.stack([rng.uniform(0, 12, 500), rng.uniform(-1, 1, 500), rng.uniform(-0.2, 0.2, 500)], axis=-1)
    mask = in_fov_mask(rtp, FORWARD_LOOKING)
    assert mask.any() and not mask.all()
    assert list(mask) == [in_fov(SphericalPoint(*row), FORWARD_LOOKING) for row in rtp]


def test_rotation_helper_consistency():
    np.testing.assert_allclose(rotation_from_rpy(0.3, 0.2, 0.1), Rz(0.1) @ Ry(0.2) @ Rx(0.3), atol=1e-15)
