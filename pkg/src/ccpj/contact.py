"""Force balance at a single bead interface for each contact mode.

``theta`` below is the angle of the contact normal measured from the
chain axis. For the conical faces of a bead with cone angle ``c`` the
normal sits at ``pi/2 - c``; :func:`normal_angle` does that conversion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ContactMode


class DegenerateContact(ValueError):
    """The interface equations are singular for the given angles."""


class SeparationError(ValueError):
    """A contact would have to pull to balance the load."""


class _Departed:
    def __repr__(self):
        return "Departed"


# returned by surface_moment_locus when the force locus leaves the face
Departed = _Departed()


@dataclass
class InterfaceForces:
    F_top: float = 0.0
    F_bot: float = 0.0
    F_norm: float = 0.0
    F_fric: float = 0.0
    M: float = 0.0
    q: float = math.nan
    residual_Fy: float = 0.0
    sliding: bool = False
    separated: bool = False


def normal_angle(cone_angle: float) -> float:
    return math.pi / 2.0 - cone_angle


def _scale(*forces) -> float:
    return max(1.0, *(abs(f) for f in forces))


def solve_surface(theta: float, F_x: float, F_y: float) -> InterfaceForces:
    """Split an interface load into two normal face forces.

    Solves ``F_x = (F_top + F_bot) cos theta`` and
    ``F_y = (F_top - F_bot) sin theta``. A negative force sets ``separated``.
    """
    c, s = math.cos(theta), math.sin(theta)
    if abs(c) < 1e-12 or abs(s) < 1e-12:
        raise DegenerateContact(f"surface contact is singular at theta={theta}")
    total = F_x / c
    diff = F_y / s
    top = 0.5 * (total + diff)
    bot = 0.5 * (total - diff)
    tol = 1e-12 * _scale(F_x, F_y)
    return InterfaceForces(F_top=top, F_bot=bot, separated=top < -tol or bot < -tol)


def surface_moment_locus(forces: InterfaceForces, M: float, face_length: float):
    """Distance along the face at which the surface forces act.

    The top and bottom loci mirror each other about the face midpoint, so the
    moment balance gives ``q = (L F_top + M) / (F_top + F_bot)``. Returns
    :data:`Departed` once the locus would leave ``[0, L]``: the face can no
    longer carry the moment and the interface opens.
    """
    total = forces.F_top + forces.F_bot
    if total <= 0.0:
        return Departed if M != 0.0 else 0.5 * face_length
    q = (face_length * forces.F_top + M) / total
    if q > face_length or q < 0.0:
        return Departed
    return q


def solve_two_point(theta: float, phi: float, F_x: float, F_y: float) -> InterfaceForces:
    """Forces at the tip and corner contacts of an interlocked pair.

    ``F_x = F_top cos(theta - phi) + F_bot cos theta`` and
    ``F_y = F_top sin(theta - phi) - F_bot sin theta``.
    A zero or negative ``F_top`` means the tip contact lifts off.
    """
    A = np.array([[math.cos(theta - phi), math.cos(theta)], [math.sin(theta - phi), -math.sin(theta)]])
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) < 1e-12:
        raise DegenerateContact(f"two-point contact is singular at theta={theta}, phi={phi}")
    top = (F_x * A[1, 1] - A[0, 1] * F_y) / det
    bot = (A[0, 0] * F_y - A[1, 0] * F_x) / det
    tol = 1e-12 * _scale(F_x, F_y)
    return InterfaceForces(F_top=top, F_bot=bot, separated=top < -tol or bot < -tol)


def solve_one_point(theta: float, mu: float, F_x: float, F_y: float) -> InterfaceForces:
    """Normal and friction force at a single contact.

    The friction direction is taken orthogonal to the normal,
    ``(sin theta, -cos theta)``. If the required friction exceeds
    ``mu * F_norm`` it is capped, the x balance is kept, and the unbalanced
    y component is returned as ``residual_Fy`` with ``sliding`` set.
    """
    if mu < 0.0:
        raise ValueError("friction coefficient must be non-negative")
    c, s = math.cos(theta), math.sin(theta)
    N = F_x * c + F_y * s
    f = F_x * s - F_y * c
    tol = 1e-12 * _scale(F_x, F_y)
    if N < -tol:
        raise SeparationError(f"normal force {N} < 0: contact separates")
    N = max(N, 0.0)
    cap = mu * N
    if abs(f) <= cap + tol:
        return InterfaceForces(F_norm=N, F_fric=f)
    sign = 1.0 if f > 0.0 else -1.0
    den = c + sign * mu * s
    if abs(den) < 1e-12:
        raise DegenerateContact(f"one-point contact is singular at theta={theta}, mu={mu}")
    N = F_x / den
    if N < -tol:
        raise SeparationError(f"normal force {N} < 0: contact separates")
    f = sign * mu * N
    res = F_y - (N * s - f * c)
    return InterfaceForces(F_norm=N, F_fric=f, residual_Fy=res, sliding=True)


def initial_mode(cone_angle: float) -> ContactMode:
    """Mode an interface enters when it first leaves surface contact."""
    if cone_angle <= math.pi / 4 + 1e-12:
        return ContactMode.TWO_POINT
    return ContactMode.ONE_POINT
