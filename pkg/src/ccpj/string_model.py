"""String routing through the bead bores, tension laws and kink forces."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

# nylon string used for the beams
STRING_DIAMETER = 0.55e-3
STRING_REST_LENGTH = 0.380


class Contact(str, enum.Enum):
    TOP = "top"
    BOTTOM = "bottom"
    NONE = "none"


# -- tension laws -----------------------------------------------------------


@dataclass(frozen=True)
class LinearSpring:
    stiffness: float  # N/m


@dataclass(frozen=True)
class LookupTable:
    """Piecewise-linear force against stretch, clamped at the table ends."""

    stretch: tuple  # m
    force: tuple  # N

    def __post_init__(self):
        s = np.asarray(self.stretch, dtype=float)
        f = np.asarray(self.force, dtype=float)
        if s.ndim != 1 or s.shape != f.shape or len(s) < 2:
            raise ValueError("lookup table needs two equal-length columns with at least two rows")
        if np.any(np.diff(s) <= 0):
            raise ValueError("lookup table stretch must be strictly increasing")
        if np.any(f < 0) or np.any(np.diff(f) < 0):
            raise ValueError("lookup table force must be non-negative and non-decreasing")
        object.__setattr__(self, "stretch", tuple(s.tolist()))
        object.__setattr__(self, "force", tuple(f.tolist()))

    @classmethod
    def from_csv(cls, path) -> "LookupTable":
        """Read a two-column CSV of stretch [mm] and force [N]; a header row is skipped."""
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]) * 1e-3, float(row[1])))
                except ValueError:
                    if rows:
                        raise
        s, f = zip(*rows)
        return cls(s, f)

    @property
    def max_force(self) -> float:
        return self.force[-1]

    def force_at(self, stretch: float) -> float:
        if stretch <= 0.0:
            return 0.0
        return float(np.interp(stretch, self.stretch, self.force))

    def energy_at(self, stretch: float) -> float:
        if stretch <= 0.0:
            return 0.0
        xs = [0.0] + [x for x in self.stretch if x > 0.0 and x < stretch] + [stretch]
        fs = [self.force_at(x) for x in xs]
        return float(np.trapezoid(fs, xs))


@dataclass(frozen=True)
class OgdenParams:
    mu: tuple  # Pa
    alpha: tuple
    d: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (len(self.mu) == len(self.alpha) == len(self.d)):
            raise ValueError("Ogden parameter arrays must have equal length")
        if any(x != 0.0 for x in self.d):
            raise ValueError("only the incompressible Ogden form (all D_i = 0) is supported")


# three-term incompressible fit of the nylon string
NYLON_OGDEN = OgdenParams(mu=(-4.185e10, 2.676e10, 1.536e10), alpha=(7.504, 8.961, 4.722), d=(0.0, 0.0, 0.0))


def ogden_initial_shear_modulus(params: OgdenParams) -> float:
    return float(sum(params.mu))


def ogden_nominal_stress(params: OgdenParams, stretch_ratio: float) -> float:
    """Uniaxial nominal stress of an incompressible Ogden solid."""
    lam = stretch_ratio
    return sum(2.0 * m / a * (lam ** (a - 1.0) - lam ** (-a / 2.0 - 1.0)) for m, a in zip(params.mu, params.alpha))


def ogden_energy_density(params: OgdenParams, stretch_ratio: float) -> float:
    lam = stretch_ratio
    return sum(2.0 * m / a**2 * (lam**a + 2.0 * lam ** (-a / 2.0) - 3.0) for m, a in zip(params.mu, params.alpha))


@dataclass(frozen=True)
class OgdenUniaxial:
    params: OgdenParams = NYLON_OGDEN
    diameter: float = STRING_DIAMETER

    @property
    def area(self) -> float:
        return math.pi * self.diameter**2 / 4.0


TensionModel = Union[LinearSpring, LookupTable, OgdenUniaxial]


def tension_from_stretch(model: TensionModel, current_length: float, rest_length: float) -> float:
    """String tension for a given path length; zero when slack."""
    if current_length <= 0.0:
        raise ValueError(f"string length must be positive, got {current_length}")
    stretch = current_length - rest_length
    if stretch <= 0.0:
        return 0.0
    if isinstance(model, LinearSpring):
        return model.stiffness * stretch
    if isinstance(model, LookupTable):
        return model.force_at(stretch)
    if isinstance(model, OgdenUniaxial):
        return max(0.0, ogden_nominal_stress(model.params, current_length / rest_length) * model.area)
    raise TypeError(f"unknown tension model {model!r}")


def string_energy(model: TensionModel, current_length: float, rest_length: float) -> float:
    """Elastic energy stored in the string."""
    stretch = current_length - rest_length
    if stretch <= 0.0:
        return 0.0
    if isinstance(model, LinearSpring):
        return 0.5 * model.stiffness * stretch**2
    if isinstance(model, LookupTable):
        return model.energy_at(stretch)
    if isinstance(model, OgdenUniaxial):
        return ogden_energy_density(model.params, current_length / rest_length) * model.area * rest_length
    raise TypeError(f"unknown tension model {model!r}")


def stretch_for_tension(model: TensionModel, tension: float, rest_length: float, tol: float = 1e-6) -> float:
    """Invert the monotone tension law by bisection."""
    from scipy.optimize import brentq

    if tension < 0.0:
        raise ValueError("tension must be non-negative")
    if tension == 0.0:
        return 0.0
    if isinstance(model, LinearSpring):
        return tension / model.stiffness
    if isinstance(model, LookupTable) and tension > model.max_force:
        raise ValueError(f"tension {tension} N exceeds the lookup table maximum {model.max_force} N")
    hi = 1e-3 * rest_length
    while tension_from_stretch(model, rest_length + hi, rest_length) < tension:
        hi *= 2.0
        if hi > 10.0 * rest_length:
            raise ValueError(f"tension {tension} N is unreachable for {model!r}")
    f = lambda s: tension_from_stretch(model, rest_length + s, rest_length) - tension
    return brentq(f, 0.0, hi, xtol=1e-15, rtol=1e-14)


# -- routing ----------------------------------------------------------------


@dataclass
class Tendon:
    """A string of given rest length tied to the top bead and held at ``stand``."""

    model: TensionModel
    rest_length: float = STRING_REST_LENGTH
    stand: np.ndarray = field(default_factory=lambda: np.array([-0.25, 0.0]))


@dataclass
class StringPath:
    nodes: np.ndarray  # (2 * (n_beads + 2), 2)
    contact: list[Contact]
    owner: list[int]  # bead index per node, -1 for the stand end
    tension: float
    rest_length: float
    vertices: np.ndarray  # taut polyline from stand to anchor
    vertex_nodes: list[int]  # node index of each polyline vertex

    @property
    def length(self) -> float:
        return polyline_length(self.vertices)


def polyline_length(points) -> float:
    p = np.asarray(points, dtype=float)
    return float(np.sum(np.hypot(*np.diff(p, axis=0).T)))


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _tri(a, b, c):
    # > 0 when c lies clockwise of a->b
    return _cross(c[0] - a[0], c[1] - a[1], b[0] - a[0], b[1] - a[1])


def taut_path(start, windows, end, eps: float = 1e-15):
    """Shortest path from ``start`` to ``end`` through ordered windows.

    ``windows`` is a sequence of ``(top, bottom)`` point pairs. Returns the
    list of polyline vertices as ``(point, window_index, side)`` with side in
    {"top", "bottom", None} (None for the two ends). Funnel algorithm.
    """
    portals = [(start, start)] + [(w[0], w[1]) for w in windows] + [(end, end)]
    m = len(portals)
    apex = portals[0][0]
    left, right = portals[0]
    apex_i = left_i = right_i = 0
    out = [(apex, -1, None)]
    i = 1
    while i < m:
        pl, pr = portals[i]
        # tighten the right (bottom) side
        if _tri(apex, right, pr) <= eps:
            same = abs(apex[0] - right[0]) + abs(apex[1] - right[1]) < 1e-18
            if same or _tri(apex, left, pr) > eps:
                right, right_i = pr, i
            else:
                if left_i == m - 1:
                    break
                apex, apex_i = left, left_i
                out.append((apex, apex_i - 1, "top"))
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        # tighten the left (top) side
        if _tri(apex, left, pl) >= -eps:
            same = abs(apex[0] - left[0]) + abs(apex[1] - left[1]) < 1e-18
            if same or _tri(apex, right, pl) < -eps:
                left, left_i = pl, i
            else:
                if right_i == m - 1:
                    break
                apex, apex_i = right, right_i
                out.append((apex, apex_i - 1, "bottom"))
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        i += 1
    out.append((end, m - 2, None))
    return out


def _windows(chain):
    """Bore openings in routing order: back then front of every bead."""
    wins, owners = [], []
    for b in range(chain.n_beads + 1):
        for side in ("back", "front"):
            wins.append((chain.point(b, f"{side}_hole_top"), chain.point(b, f"{side}_hole_bottom")))
            owners.append(b)
    return wins, owners


def _segment_hit(a, b, top, bottom):
    """Point where segment a-b crosses the line through a window."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    ex, ey = top[0] - bottom[0], top[1] - bottom[1]
    den = _cross(dx, dy, ex, ey)
    if abs(den) < 1e-300:
        return 0.5 * (np.asarray(top) + np.asarray(bottom))
    t = _cross(bottom[0] - a[0], bottom[1] - a[1], ex, ey) / den
    t = min(max(t, 0.0), 1.0)
    return np.array([a[0] + t * dx, a[1] + t * dy])


def route(chain, stand, tension: float = 0.0, rest_length: float = STRING_REST_LENGTH) -> StringPath:
    """Route the string from the stand point to the top-bead anchor."""
    wins, owners = _windows(chain)
    anchor = chain.point(chain.n_beads, "tip")
    stand = np.asarray(stand, dtype=float)
    verts = taut_path(stand, wins, anchor)
    n_nodes = len(wins) + 2
    nodes = np.zeros((n_nodes, 2))
    contact = [Contact.NONE] * n_nodes
    owner = [-1] + owners + [chain.n_beads]
    nodes[0] = stand
    nodes[-1] = anchor
    fixed = {}
    for p, wi, side in verts[1:-1]:
        fixed[wi] = (p, side)
    vpos = [v[1] for v in verts]
    vpts = [np.asarray(v[0], dtype=float) for v in verts]
    vertex_nodes = [0]
    seg = 0
    for wi in range(len(wins)):
        node = wi + 1
        if wi in fixed:
            p, side = fixed[wi]
            nodes[node] = p
            contact[node] = Contact.TOP if side == "top" else Contact.BOTTOM
            vertex_nodes.append(node)
            continue
        while seg + 1 < len(vpos) - 1 and vpos[seg + 1] < wi:
            seg += 1
        nodes[node] = _segment_hit(vpts[seg], vpts[seg + 1], wins[wi][0], wins[wi][1])
    vertex_nodes.append(n_nodes - 1)
    # keep vertex_nodes sorted with the vertex list
    vertices = np.array(vpts)
    return StringPath(nodes, contact, owner, tension, rest_length, vertices, vertex_nodes)


def default_stand(chain, offset: float = 0.0) -> np.ndarray:
    """Point on the base axis behind its back opening."""
    return chain.point(0, "back_hole_top") * np.array([1.0, 0.0]) - np.array([offset, 0.0])


def straight_stand(chain, rest_length: float = STRING_REST_LENGTH) -> np.ndarray:
    """Stand point on the base axis at which the straight chain's string is exactly at rest."""
    from .chain import with_joints

    n = chain.n_beads
    straight = with_joints(chain, np.zeros(n), np.zeros(n))
    inner = route(straight, default_stand(straight)).length
    return default_stand(straight, max(rest_length - inner, 0.0))


def route_string(chain, tension: float, stand=None, rest_length: float = STRING_REST_LENGTH) -> StringPath:
    """Route the string through ``chain`` and label contacts at every opening.

    With ``stand`` omitted the fixed end is placed on the base axis so that
    the unloaded straight string has exactly its rest length.
    """
    if stand is None:
        stand = straight_stand(chain, rest_length)
    return route(chain, stand, tension, rest_length)


def route_tendon(chain, tendon: Tendon) -> StringPath:
    p = route(chain, tendon.stand, 0.0, tendon.rest_length)
    p.tension = tension_from_stretch(tendon.model, p.length, tendon.rest_length)
    return p


def kink_force_magnitude(tension: float, half_angle: float) -> float:
    """Force on a pulley point where the string turns with half-angle ``half_angle``.

    ``half_angle`` is half the angle enclosed between the two segments:
    pi/2 for a straight string, 0 for a string doubled back on itself.
    """
    return 2.0 * tension * math.cos(half_angle)


def corner_forces(path: StringPath) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """Force the string applies at each contacted opening.

    Returns ``(node, point, force)`` for every contacted node; the force is
    the vector sum of the two adjacent unit tensions times ``T``.
    """
    out = []
    v = path.vertices
    for j in range(1, len(v) - 1):
        node = path.vertex_nodes[j]
        if path.contact[node] is Contact.NONE:
            continue
        out.append((node, v[j].copy(), path.tension * (_unit(v[j - 1] - v[j]) + _unit(v[j + 1] - v[j]))))
    return out


def end_forces(path: StringPath) -> tuple[np.ndarray, np.ndarray]:
    """Pull of the string on the stand and on the top-bead anchor."""
    v = path.vertices
    return path.tension * _unit(v[1] - v[0]), path.tension * _unit(v[-2] - v[-1])


def _unit(v):
    n = math.hypot(v[0], v[1])
    if n < 1e-300:
        return np.zeros(2)
    return np.asarray(v, dtype=float) / n


def kink_half_angle(path: StringPath, node: int) -> float:
    j = path.vertex_nodes.index(node)
    v = path.vertices
    a = _unit(v[j - 1] - v[j])
    b = _unit(v[j + 1] - v[j])
    return 0.5 * math.acos(max(-1.0, min(1.0, float(a @ b))))
