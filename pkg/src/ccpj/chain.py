"""Kinematic state of a bead chain anchored at a fixed base bead."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    BeadSpec,
    ContactMode,
    GeometryError,
    PairKinematics,
    face_dir,
    manifold_disp,
    rotation,
)

GRAVITY = 9.81
# slack allowed when checking the two-point constraint and mode labels
DISP_TOL = 1e-9
PHI_TOL = 1e-12


@dataclass
class ChainState:
    """Base bead (index 0) plus ``n`` free beads.

    ``phi[k-1]`` and ``disp[k-1]`` describe joint ``k`` between bead ``k-1``
    and bead ``k``. The base has its tip at the origin and zero rotation.
    """

    specs: list[BeadSpec]
    phi: np.ndarray
    disp: np.ndarray
    modes: list[ContactMode]
    gravity: float = GRAVITY
    alpha: np.ndarray = field(init=False, repr=False)
    pos: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.disp = np.asarray(self.disp, dtype=float)
        self.update()

    @property
    def n_beads(self) -> int:
        return len(self.specs) - 1

    @property
    def kinematics(self) -> list[PairKinematics]:
        return [PairKinematics(float(p), float(d), m) for p, d, m in zip(self.phi, self.disp, self.modes)]

    def copy(self) -> "ChainState":
        return ChainState(list(self.specs), self.phi.copy(), self.disp.copy(), list(self.modes), self.gravity)

    def update(self) -> None:
        """Recompute global poses from the joint coordinates."""
        self.alpha, self.pos = _poses(self.specs, self.phi, self.disp)

    def point(self, bead: int, name: str) -> np.ndarray:
        local = self.specs[bead].local_points()[name]
        return self.pos[bead] + rotation(self.alpha[bead]) @ local

    def to_global(self, bead: int, local) -> np.ndarray:
        return self.pos[bead] + rotation(self.alpha[bead]) @ np.asarray(local, dtype=float)

    def contact_point(self, k: int) -> np.ndarray:
        """Lower contact point of joint ``k`` (1-based)."""
        if self.disp[k - 1] >= 0.0:
            return self.point(k - 1, "front_bottom")
        return self.point(k, "back_bottom")

    def slide_dir(self, k: int) -> np.ndarray:
        """Unit vector along which the front bead moves when disp decreases."""
        th = self.specs[k].cone_angle
        if self.disp[k - 1] >= 0.0:
            return face_dir(th, self.alpha[k])
        return face_dir(th, self.alpha[k - 1])

    def total_mass(self) -> float:
        return sum(s.mass for s in self.specs[1:])


def _poses(specs, phi, disp):
    n = len(specs) - 1
    alpha = np.zeros(n + 1)
    pos = np.zeros((n + 1, 2))
    a_prev = 0.0
    px, py = 0.0, 0.0
    for k in range(1, n + 1):
        sp, sk = specs[k - 1], specs[k]
        a = a_prev + phi[k - 1]
        d = disp[k - 1]
        # lower front corner of the rear bead
        ca, sa = math.cos(a_prev), math.sin(a_prev)
        hx = -sp.cone_depth
        hy = -sp.outer_radius
        Hx = px + ca * hx + sa * hy
        Hy = py - sa * hx + ca * hy
        th = sk.cone_angle
        ref = a if d >= 0.0 else a_prev
        Gx = Hx - d * math.cos(th - ref)
        Gy = Hy - d * math.sin(th - ref)
        # tip of the front bead from its lower back corner
        c, s = math.cos(a), math.sin(a)
        bx = -sk.cone_depth - sk.length
        by = -sk.outer_radius
        px = Gx - (c * bx + s * by)
        py = Gy - (-s * bx + c * by)
        alpha[k] = a
        pos[k, 0], pos[k, 1] = px, py
        a_prev = a
    return alpha, pos


def classify(spec: BeadSpec, phi: float, disp: float, tol: float = DISP_TOL) -> ContactMode:
    if phi <= PHI_TOL and abs(disp) <= tol:
        return ContactMode.SURFACE
    dm = manifold_disp(spec, phi)
    # relative near zero rotation, where the manifold itself is within tol of the face
    if math.isfinite(dm) and abs(disp - dm) <= min(tol, 1e-6 * abs(dm)):
        return ContactMode.TWO_POINT
    return ContactMode.ONE_POINT


def check_joint(spec: BeadSpec, phi: float, disp: float, tol: float = 1e-7) -> None:
    """Raise if a joint configuration interpenetrates or leaves the face."""
    if phi < -tol:
        raise GeometryError(f"negative relative rotation {phi}")
    if not spec.is_flat and 2.0 * spec.cone_angle + phi >= math.pi:
        raise GeometryError(f"rotation {phi} folds the joint shut")
    if spec.is_flat and phi >= math.pi / 2:
        raise GeometryError(f"rotation {phi} folds the joint shut")
    L = spec.face_length
    if not -L <= disp <= L:
        raise GeometryError(f"displacement {disp} leaves the face of length {L}")
    dm = manifold_disp(spec, max(phi, 0.0))
    if disp > dm + tol:
        raise GeometryError(f"displacement {disp} exceeds two-point limit {dm}: beads overlap")


def assemble(specs, initial_kinematics=None, gravity: float = GRAVITY) -> ChainState:
    """Build a chain from the base outwards.

    ``specs`` includes the base bead; ``initial_kinematics`` holds one
    :class:`PairKinematics` per free bead (defaults to a straight chain).
    """
    specs = list(specs)
    if len(specs) < 1:
        raise ValueError("need at least the base bead")
    n = len(specs) - 1
    base = specs[0]
    for s in specs[1:]:
        if not (math.isclose(s.cone_angle, base.cone_angle) and math.isclose(s.outer_radius, base.outer_radius)):
            raise ValueError("all beads in a chain must share cone angle and outer radius")
    if initial_kinematics is None:
        initial_kinematics = [PairKinematics() for _ in range(n)]
    initial_kinematics = list(initial_kinematics)
    if len(initial_kinematics) != n:
        raise ValueError(f"expected {n} joint states, got {len(initial_kinematics)}")
    phi = np.array([k.phi for k in initial_kinematics], dtype=float)
    disp = np.array([k.disp for k in initial_kinematics], dtype=float)
    for k in range(n):
        check_joint(specs[k + 1], phi[k], disp[k])
    modes = [classify(specs[k + 1], phi[k], disp[k]) for k in range(n)]
    return ChainState(specs, phi, disp, modes, gravity)


def straight_chain(spec: BeadSpec, n_beads: int, gravity: float = GRAVITY) -> ChainState:
    return assemble([spec] * (n_beads + 1), gravity=gravity)


def alignment_error_value(offset: float, outer_diameter: float) -> float:
    """Lateral offset normalised by the bead outer diameter."""
    return offset / outer_diameter


def alignment_error(chain: ChainState) -> float:
    """Offset of the top bead centre from the base bead axis, over D_O."""
    top = chain.point(chain.n_beads, "centroid")
    base = chain.point(0, "centroid")
    # base axis is +x
    offset = abs(top[1] - base[1])
    return alignment_error_value(offset, 2.0 * chain.specs[0].outer_radius)


def gravity_loads(chain: ChainState) -> list[tuple[np.ndarray, np.ndarray]]:
    """Weight of every free bead at its centroid. The base is held rigidly."""
    out = []
    for b in range(1, chain.n_beads + 1):
        w = chain.specs[b].mass * chain.gravity
        out.append((chain.point(b, "centroid"), np.array([0.0, -w])))
    return out


def gravity_potential(chain: ChainState) -> float:
    return sum(
        chain.specs[b].mass * chain.gravity * chain.point(b, "centroid")[1] for b in range(1, chain.n_beads + 1)
    )


def with_joints(chain: ChainState, phi, disp) -> ChainState:
    """Copy of ``chain`` with new joint coordinates and refreshed labels."""
    phi = np.asarray(phi, dtype=float)
    disp = np.asarray(disp, dtype=float)
    modes = [classify(chain.specs[k + 1], phi[k], disp[k]) for k in range(chain.n_beads)]
    return ChainState(list(chain.specs), phi.copy(), disp.copy(), modes, chain.gravity)


__all__ = [
    "ChainState",
    "assemble",
    "straight_chain",
    "alignment_error",
    "alignment_error_value",
    "gravity_loads",
    "gravity_potential",
    "classify",
    "check_joint",
    "with_joints",
]
