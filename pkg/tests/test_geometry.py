import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccpj.geometry import (
    BeadSpec,
    GeometryError,
    bead_points,
    manifold_angle,
    manifold_disp,
    manifold_slope,
    max_two_point_disp,
    two_point_angle,
)

DEG = math.pi / 180


def unit_face(theta_deg):
    """Bead whose face length is exactly 1."""
    th = theta_deg * DEG
    return BeadSpec(outer_radius=math.sin(th), inner_radius=0.01, length=1.0, cone_angle=th)


def test_spec_rejects_bad_values():
    for kw in (
        {"inner_radius": 8e-3},
        {"length": 0.0},
        {"cone_angle": 0.0},
        {"cone_angle": 2.0},
        {"friction": -0.1},
        {"density": 0.0},
        {"edge_radius": -1.0},
    ):
        with pytest.raises(GeometryError):
            BeadSpec(**kw)


def test_face_length_is_slant_of_cone():
    s = BeadSpec(outer_radius=7.5e-3, cone_angle=40 * DEG)
    assert s.face_length == pytest.approx(7.5e-3 / math.sin(40 * DEG))


def test_max_disp_zero_rotation():
    assert max_two_point_disp(unit_face(40), 0.0) == 0.0
    assert max_two_point_disp(unit_face(45), 0.0) == 0.0


def test_max_disp_ten_degrees():
    # independent high-precision evaluation of the law-of-sines closure
    with mpmath.workdps(30):
        expect = 1 - mpmath.sin(mpmath.pi - mpmath.radians(10) - 2 * mpmath.radians(40)) / mpmath.sin(mpmath.radians(80))
    got = max_two_point_disp(unit_face(40), 10 * DEG)
    assert got == pytest.approx(float(expect), abs=1e-12)
    assert got == pytest.approx(-0.01543, abs=1e-5)


def test_max_disp_domain():
    with pytest.raises(GeometryError):
        max_two_point_disp(unit_face(90), 0.0)
    with pytest.raises(GeometryError):
        max_two_point_disp(unit_face(40), math.pi - 80 * DEG)


def test_two_point_angle_examples():
    s = unit_face(40)
    assert two_point_angle(s, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert two_point_angle(s, 1.0) == pytest.approx(80 * DEG)
    with mpmath.workdps(30):
        expect = mpmath.radians(60) - mpmath.asin(mpmath.mpf("0.9") * mpmath.sin(mpmath.radians(60)))
    got = two_point_angle(unit_face(30), 0.1)
    assert got == pytest.approx(float(expect), abs=1e-12)
    assert math.degrees(got) == pytest.approx(8.79, abs=5e-3)


def test_two_point_angle_reports_bad_argument():
    with pytest.raises(GeometryError, match="arcsin argument"):
        two_point_angle(unit_face(40), -0.5)


@given(st.floats(5.0, 45.0), st.floats(0.0, 0.99))
def test_closed_form_pair_returns_negated_angle(theta_deg, frac):
    # substituting one closed form in the other gives 2t - asin(sin(2t + phi)),
    # which equals -phi while 2t + phi stays below 90 deg
    s = unit_face(theta_deg)
    th = theta_deg * DEG
    phi = frac * (math.pi / 2 - 2 * th)
    back = two_point_angle(s, max_two_point_disp(s, phi))
    assert back == pytest.approx(-phi, abs=1e-9)


@given(st.floats(5.0, 89.0), st.floats(0.0, 1.0))
def test_manifold_inverse(theta_deg, frac):
    s = unit_face(theta_deg)
    th = theta_deg * DEG
    phi = frac * (math.pi - 2 * th) * 0.999
    d = manifold_disp(s, phi)
    upper = 2 * th + phi >= math.pi / 2
    assert manifold_angle(s, d, upper=upper) == pytest.approx(phi, abs=1e-9)


@given(st.floats(5.0, 85.0), st.floats(0.0, 1.0))
def test_manifold_matches_closed_form_for_positive_disp(theta_deg, frac):
    s = unit_face(theta_deg)
    th = theta_deg * DEG
    phi = frac * (math.pi - 2 * th) * 0.999
    d = manifold_disp(s, phi)
    if d >= 0.0:
        assert d == pytest.approx(max_two_point_disp(s, phi), abs=1e-12)


@given(st.floats(5.0, 85.0), st.floats(0.01, 0.98))
def test_manifold_slope_is_derivative(theta_deg, frac):
    s = unit_face(theta_deg)
    phi = frac * (math.pi - 2 * theta_deg * DEG)
    h = 1e-6
    fd = (manifold_disp(s, phi + h) - manifold_disp(s, phi - h)) / (2 * h)
    assert manifold_slope(s, phi) == pytest.approx(fd, rel=1e-5, abs=1e-7)


def test_manifold_flat_bead_is_unbounded():
    assert manifold_disp(unit_face(90), 0.1) == math.inf


def test_bead_points_origin():
    f = bead_points(BeadSpec(), 0.0, 0.0, (0.0, 0.0))
    assert np.array_equal(f.corner, [0.0, 0.0])


def test_bead_points_displaced_corner():
    f = bead_points(BeadSpec(cone_angle=40 * DEG), 0.0, 0.001, (0.0, 0.0))
    assert f.corner == pytest.approx([-0.001 * math.cos(40 * DEG), -0.001 * math.sin(40 * DEG)])


def test_bead_points_rotated_front_corner():
    # rotations are clockwise here, so the axis of a bead at +10 deg points 10 deg below x
    s = BeadSpec(cone_angle=40 * DEG, length=0.015)
    f = bead_points(s, 10 * DEG, 0.0, (0.0, 0.0))
    assert f.front_corner - f.corner == pytest.approx([0.015 * math.cos(10 * DEG), -0.015 * math.sin(10 * DEG)])


def test_tip_forms():
    s = BeadSpec()
    th, w, R = s.cone_angle, s.length, s.outer_radius
    phi = 0.3
    f = bead_points(s, phi, 0.0, (0.0, 0.0))
    face = f.front_corner + (R / math.sin(th)) * np.array([math.cos(th - phi), math.sin(th - phi)])
    alt = np.array([(w + R) * math.cos(phi), (w + R * math.tan(th)) * math.sin(phi)])
    assert f.pos == pytest.approx(face)
    assert f.tip_bead_model == pytest.approx(alt)
    # the two constructions disagree even for a straight bead
    f0 = bead_points(s, 0.0, 0.0, (0.0, 0.0))
    assert not np.allclose(f0.pos, f0.tip_bead_model)


@given(
    st.floats(10.0, 90.0),
    st.floats(0.0, 1.2),
    st.floats(-5e-3, 5e-3),
    st.floats(-1.0, 1.0),
    st.floats(-1.0, 1.0),
)
def test_frame_points_finite(theta_deg, phi, disp, x, y):
    f = bead_points(BeadSpec(cone_angle=theta_deg * DEG), phi, disp, (x, y))
    for v in (f.corner, f.front_corner, f.pos, f.tip_bead_model):
        assert np.all(np.isfinite(v))
