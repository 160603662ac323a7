"""Bead geometry in the 2D midplane and the two-point contact couplings.

Conventions used throughout the package:

* SI units (m, N, rad).
* The chain runs along +x from the fixed base; gravity and the indenter act
  along -y.
* A bead orientation ``alpha`` is measured clockwise (sagging is positive),
  so the bead axis is ``(cos alpha, -sin alpha)`` and the lower face
  direction is ``(cos(theta - alpha), sin(theta - alpha))``.
* ``theta`` is the cone angle between a conical face and the bead axis;
  90 deg is a flat (non-concave) bead.

Bead-local coordinates put the front tip (the virtual apex of the convex
cone) at the origin with the axis along +x.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    """Raised when a geometric formula is evaluated outside its domain."""


class ContactMode(str, enum.Enum):
    SURFACE = "surface"
    TWO_POINT = "two_point"
    ONE_POINT = "one_point"


@dataclass(frozen=True)
class BeadSpec:
    """Geometry and material of one concavo-convex bead.

    outer_radius, inner_radius, length and edge_radius are in metres,
    cone_angle in radians, density in kg/m^3. ``edge_radius`` is carried
    for bookkeeping only; the rigid model uses sharp corners.
    """

    outer_radius: float = 7.5e-3
    inner_radius: float = 0.39e-3
    length: float = 15.0e-3
    cone_angle: float = math.radians(40.0)
    friction: float = 0.1
    density: float = 1000.0
    edge_radius: float = 0.0

    def __post_init__(self):
        R, r, w, th = self.outer_radius, self.inner_radius, self.length, self.cone_angle
        if not (0.0 < r < R):
            raise GeometryError(f"need 0 < inner_radius < outer_radius, got r={r}, R={R}")
        if not w > 0.0:
            raise GeometryError(f"bead length must be positive, got {w}")
        if not (0.0 < th <= math.pi / 2 + 1e-15):
            raise GeometryError(f"cone angle must lie in (0, pi/2], got {th}")
        if self.friction < 0.0:
            raise GeometryError(f"friction must be non-negative, got {self.friction}")
        if not self.density > 0.0:
            raise GeometryError(f"density must be positive, got {self.density}")
        if self.edge_radius < 0.0:
            raise GeometryError(f"edge radius must be non-negative, got {self.edge_radius}")

    @property
    def face_length(self) -> float:
        """Slanted face length from the outer rim to the cone apex."""
        return self.outer_radius / math.sin(self.cone_angle)

    @property
    def cone_depth(self) -> float:
        """Axial depth of the cone, R cot(theta)."""
        return self.outer_radius / math.tan(self.cone_angle)

    @property
    def is_flat(self) -> bool:
        return abs(self.cone_angle - math.pi / 2) < 1e-12

    @property
    def volume(self) -> float:
        # convex tip and concave socket have the same volume and cancel
        return math.pi * (self.outer_radius**2 - self.inner_radius**2) * self.length

    @property
    def mass(self) -> float:
        return self.density * self.volume

    def local_points(self) -> dict[str, np.ndarray]:
        """Named midplane points in bead-local coordinates (tip at origin)."""
        return _local_points(self)


@functools.lru_cache(maxsize=256)
def _local_points(spec: BeadSpec) -> dict[str, np.ndarray]:
    R, r, w = spec.outer_radius, spec.inner_radius, spec.length
    c = spec.cone_depth
    rc = r / math.tan(spec.cone_angle)
    pts = {
        "tip": np.array([0.0, 0.0]),
        "front_bottom": np.array([-c, -R]),
        "front_top": np.array([-c, R]),
        "back_bottom": np.array([-c - w, -R]),
        "back_top": np.array([-c - w, R]),
        "socket": np.array([-w, 0.0]),
        "front_hole_top": np.array([-rc, r]),
        "front_hole_bottom": np.array([-rc, -r]),
        "back_hole_top": np.array([-w - rc, r]),
        "back_hole_bottom": np.array([-w - rc, -r]),
        "centroid": np.array([-w / 2.0, 0.0]),
        "top_middle": np.array([-c - w / 2.0, R]),
    }
    for v in pts.values():
        v.flags.writeable = False
    return pts


@dataclass(frozen=True)
class PairKinematics:
    """Relative state of a bead with respect to the bead behind it."""

    phi: float = 0.0
    disp: float = 0.0
    mode: ContactMode = ContactMode.SURFACE


def rotation(alpha: float) -> np.ndarray:
    """Local-to-global rotation for a clockwise orientation ``alpha``."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, s], [-s, c]])


def axis_dir(alpha: float) -> np.ndarray:
    return np.array([math.cos(alpha), -math.sin(alpha)])


def face_dir(theta: float, alpha: float) -> np.ndarray:
    """Lower face direction (outer rim towards apex) of a bead at ``alpha``."""
    return np.array([math.cos(theta - alpha), math.sin(theta - alpha)])


def _check_cone(theta: float) -> None:
    s2 = math.sin(2.0 * theta)
    if abs(s2) < 1e-12:
        raise GeometryError(f"sin(2*theta) vanishes for theta={theta}; use the one-point path")


def max_two_point_disp(spec: BeadSpec, phi: float) -> float:
    """Largest corner displacement compatible with rotation ``phi``.

    Law of sines on the triangle formed by the two contact points and the
    socket apex of the front bead::

        disp = L - sin(pi - phi - 2 theta) * L / sin(2 theta)
    """
    th = spec.cone_angle
    _check_cone(th)
    if not (0.0 <= phi < math.pi - 2.0 * th):
        raise GeometryError(f"phi={phi} outside [0, pi - 2 theta) for theta={th}")
    L = spec.face_length
    return L - math.sin(math.pi - phi - 2.0 * th) * L / math.sin(2.0 * th)


def two_point_angle(spec: BeadSpec, disp: float) -> float:
    """Rotation recovered from a corner displacement (law of cosines form).

    ``phi = 2 theta - arcsin((L - disp) sin(2 theta) / L)``. Despite the
    name this is not the inverse of :func:`max_two_point_disp` except at
    45 deg; :func:`manifold_angle` is.
    """
    th = spec.cone_angle
    _check_cone(th)
    L = spec.face_length
    arg = (L - disp) * math.sin(2.0 * th) / L
    if not -1.0 <= arg <= 1.0:
        raise GeometryError(f"arcsin argument {arg!r} outside [-1, 1] (disp={disp})")
    return 2.0 * th - math.asin(arg)


def manifold_disp(spec: BeadSpec, phi: float) -> float:
    """Exact two-point displacement used by the chain kinematics.

    For ``disp >= 0`` the lower contact is the rear bead's corner on the
    front bead's socket face and this equals :func:`max_two_point_disp`.
    For ``disp < 0`` the front bead's corner rides on the rear bead's face
    and the triangle gives ``L sin(2 theta) / sin(2 theta + phi) - L``.
    Returns ``inf`` when the tip can no longer reach the socket face
    (flat beads, or ``2 theta + phi >= pi``).
    """
    th = spec.cone_angle
    if spec.is_flat or 2.0 * th + phi >= math.pi:
        return math.inf
    L = spec.face_length
    s2 = math.sin(2.0 * th)
    sp = math.sin(2.0 * th + phi)
    if sp <= s2:
        return L - sp * L / s2
    return L * s2 / sp - L


def manifold_slope(spec: BeadSpec, phi: float) -> float:
    """Derivative of :func:`manifold_disp` with respect to ``phi``."""
    th = spec.cone_angle
    if spec.is_flat or 2.0 * th + phi >= math.pi:
        return 0.0
    L = spec.face_length
    s2 = math.sin(2.0 * th)
    sp = math.sin(2.0 * th + phi)
    cp = math.cos(2.0 * th + phi)
    if sp <= s2:
        return -L * cp / s2
    return -L * s2 * cp / (sp * sp)


def manifold_angle(spec: BeadSpec, disp: float, upper: bool = True) -> float:
    """Rotation on the two-point manifold for a given displacement.

    The manifold is not one-to-one for cone angles below 45 deg: two
    rotations share each displacement. ``upper`` selects the branch with
    ``2 theta + phi >= pi/2``; the lower branch exists only when
    ``2 theta < pi/2``.
    """
    th = spec.cone_angle
    _check_cone(th)
    L = spec.face_length
    s2 = math.sin(2.0 * th)
    s = (L - disp) * s2 / L if disp >= 0.0 else L * s2 / (L + disp)
    if not -1.0 <= s <= 1.0:
        raise GeometryError(f"displacement {disp} is not reachable in two-point contact")
    a = math.asin(s)
    phi = math.pi - a - 2.0 * th if upper else a - 2.0 * th
    if phi < -1e-12:
        raise GeometryError(f"displacement {disp} has no {'upper' if upper else 'lower'} branch")
    return max(phi, 0.0)


@dataclass(frozen=True)
class BeadFrame:
    corner: np.ndarray  # lower back corner G (x_c)
    front_corner: np.ndarray  # lower front corner H
    pos: np.ndarray  # front tip, consistent with the chain kinematics
    tip_bead_model: np.ndarray  # front tip, alternative closed form


def bead_points(spec: BeadSpec, phi: float, disp: float, contact_point) -> BeadFrame:
    """Corner, front corner and tip of a bead from its contact point.

    ``phi`` here is the bead's absolute (clockwise) orientation. Two tip
    constructions circulate for this model and they disagree away from
    ``phi = 0``::

        pos   = H + (R / sin theta)(cos(theta - phi), sin(theta - phi))
        x_t   = x_c + w(cos phi, sin phi) + R(cos phi, sin phi tan theta)

    ``pos`` is consistent with the rest of the kinematics and is what the
    chain uses; ``x_t`` is returned verbatim for comparison only.
    """
    th = spec.cone_angle
    p = np.asarray(contact_point, dtype=float)
    if disp >= 0.0:
        corner = p - disp * face_dir(th, phi)
    else:
        corner = p.copy()
    front = corner + spec.length * axis_dir(phi)
    pos = front + spec.face_length * face_dir(th, phi)
    x_t = (
        corner
        + spec.length * np.array([math.cos(phi), math.sin(phi)])
        + spec.outer_radius * np.array([math.cos(phi), math.sin(phi) * math.tan(th)])
    )
    return BeadFrame(corner=corner, front_corner=front, pos=pos, tip_bead_model=x_t)
