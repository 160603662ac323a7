"""Quasi-static equilibrium of a tensioned bead chain and loading protocols.

Each joint has two coordinates (rotation ``phi`` and corner displacement
``disp``). The generalized forces on them are the virtual work of all loads
on the beads in front of the joint. The solver relaxes the coordinates
along those forces with fixed gains, respecting the contact constraints:

* ``phi >= 0`` (beads never rotate past straight),
* ``disp <= manifold_disp(phi)`` (no interpenetration; equality is the
  two-point mode),
* Coulomb friction on sliding in one-point mode.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .chain import DISP_TOL, PHI_TOL, ChainState, gravity_potential, with_joints
from .contact import initial_mode
from .geometry import ContactMode, manifold_disp, manifold_slope
from .string_model import (
    Tendon,
    corner_forces,
    end_forces,
    route_tendon,
    straight_stand,
    stretch_for_tension,
    string_energy,
    tension_from_stretch,
)

log = logging.getLogger("ccpj.solver")

# joint rotation below which a chain counts as straight [rad]
STRAIGHT_TOL = 1e-6


class NonConvergence(RuntimeError):
    def __init__(self, message, state=None, residual=math.inf, step=None):
        super().__init__(message)
        self.state = state
        self.residual = residual
        self.step = step


@dataclass
class SolverConfig:
    """Relaxation gains, tolerances and load stepping.

    Gains are in rad/(N m) and m/N. After ``coarse_steps`` iterations of an
    equilibrium solve both gains are multiplied by ``fine_scale``.
    """

    rotation_gain: float = 0.5
    disp_gain: float = 1e-4
    coarse_steps: int = 100
    fine_scale: float = 0.1
    force_tol: float = 1e-4
    moment_tol: float = 1e-6
    depth_tol: float = 1e-9
    max_iters: int = 20000
    force_increment: float = 0.1
    disp_increment: float = 1e-4
    max_rotation_step: float = 0.01
    max_disp_step: float = 1e-4
    # refine a displacement step when the reaction jumps by more than this
    jump_fraction: float = 0.05
    max_refine: int = 12

    def __post_init__(self):
        for name in (
            "rotation_gain",
            "disp_gain",
            "force_tol",
            "moment_tol",
            "depth_tol",
            "force_increment",
            "disp_increment",
            "max_rotation_step",
            "max_disp_step",
            "jump_fraction",
        ):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.coarse_steps < 0 or self.max_iters < 1 or self.max_refine < 0:
            raise ValueError("iteration counts must be non-negative")
        if not 0.0 < self.fine_scale < 1.0:
            raise ValueError("fine_scale must lie in (0, 1)")


@dataclass
class Indenter:
    """Frictionless line load pressing down on one point of a bead."""

    bead: int = -1  # -1 means the top bead
    point: str = "top_middle"

    def bead_index(self, chain: ChainState) -> int:
        return chain.n_beads if self.bead < 0 else self.bead

    def location(self, chain: ChainState) -> np.ndarray:
        return chain.point(self.bead_index(chain), self.point)


@dataclass
class Equilibrium:
    chain: ChainState
    path: object
    force: float
    residual: float
    iterations: int
    converged: bool
    dissipation: float = 0.0
    # distinct modes each joint passed through while relaxing
    mode_paths: list = field(default_factory=list)


def _merge_paths(first, second):
    out = []
    for a, b in zip(first, second):
        out.append(a + (b[1:] if b and a and b[0] is a[-1] else b))
    return out


@dataclass
class Forces:
    """Generalized forces on every joint (index ``k - 1`` for joint ``k``)."""

    q_phi: np.ndarray
    q_disp: np.ndarray
    normal: np.ndarray
    # the same quantities per unit downward indenter force
    g_phi: np.ndarray
    g_disp: np.ndarray
    g_normal: np.ndarray


def bead_loads(chain: ChainState, path, gravity: bool = True) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """All loads as ``(bead, point, force)`` except the indenter."""
    loads = []
    if path.tension > 0.0:
        for node, pt, f in corner_forces(path):
            b = path.owner[node]
            if b >= 0:
                loads.append((b, pt, f))
        _, anchor = end_forces(path)
        loads.append((chain.n_beads, path.vertices[-1], anchor))
    if gravity and chain.gravity != 0.0:
        for b in range(1, chain.n_beads + 1):
            w = chain.specs[b].mass * chain.gravity
            loads.append((b, chain.point(b, "centroid"), np.array([0.0, -w])))
    return loads


def generalized_forces(chain: ChainState, loads, indenter_point=None, indenter_bead=None) -> Forces:
    n = chain.n_beads
    fx = np.zeros(n + 2)
    fy = np.zeros(n + 2)
    m0 = np.zeros(n + 2)
    for b, p, f in loads:
        fx[b] += f[0]
        fy[b] += f[1]
        m0[b] += f[0] * p[1] - f[1] * p[0]
    # suffix sums: loads carried by joint k are those on beads k..n
    sfx = np.cumsum(fx[::-1])[::-1]
    sfy = np.cumsum(fy[::-1])[::-1]
    sm = np.cumsum(m0[::-1])[::-1]
    q_phi = np.zeros(n)
    q_disp = np.zeros(n)
    normal = np.zeros(n)
    g_phi = np.zeros(n)
    g_disp = np.zeros(n)
    g_normal = np.zeros(n)
    for k in range(1, n + 1):
        p = chain.contact_point(k)
        u = chain.slide_dir(k)
        nx, ny = u[1], -u[0]
        q_phi[k - 1] = sm[k] - (sfx[k] * p[1] - sfy[k] * p[0])
        q_disp[k - 1] = -(sfx[k] * u[0] + sfy[k] * u[1])
        normal[k - 1] = -(sfx[k] * nx + sfy[k] * ny)
        if indenter_point is not None and indenter_bead >= k:
            g_phi[k - 1] = indenter_point[0] - p[0]
            g_disp[k - 1] = u[1]
            g_normal[k - 1] = ny
    return Forces(q_phi, q_disp, normal, g_phi, g_disp, g_normal)


@dataclass
class _Step:
    dphi: float
    ddisp: float
    two_point: bool = False
    res_moment: float = 0.0
    res_force: float = 0.0


def _two_point_branch(chain, k, Q_phi, Q_d) -> bool:
    spec = chain.specs[k]
    phi, d = chain.phi[k - 1], chain.disp[k - 1]
    if phi <= PHI_TOL and abs(d) <= DISP_TOL:
        # leaving flush contact: the cone angle decides the mode
        return initial_mode(spec.cone_angle) is ContactMode.TWO_POINT and Q_d >= 0.0
    dm = manifold_disp(spec, phi)
    return math.isfinite(dm) and d >= dm - DISP_TOL and Q_d >= 0.0


def _joint_step(chain, k, fr: Forces, F: float, gr, gd) -> _Step:
    """Relaxation step for joint ``k`` under indenter force ``F``."""
    spec = chain.specs[k]
    i = k - 1
    gr, gd = gr[i], gd[i]
    phi = chain.phi[i]
    Qp = fr.q_phi[i] + F * fr.g_phi[i]
    Qd = fr.q_disp[i] + F * fr.g_disp[i]
    if _two_point_branch(chain, k, Qp, Qd):
        s = manifold_slope(spec, phi)
        Qt = Qp + s * Qd
        res = 0.0 if (phi <= PHI_TOL and Qt <= 0.0) else abs(Qt)
        dphi = gr * Qt
        return _Step(dphi, s * dphi, True, res_moment=res)
    N = fr.normal[i] + F * fr.g_normal[i]
    cap = spec.friction * max(N, 0.0)
    if phi <= PHI_TOL and abs(chain.disp[i]) <= DISP_TOL:
        # Flush faces lock sliding down the face. The interface opens when a
        # rotation, possibly combined with a slide up the face as far as the
        # two-point limit allows (slope s > 0 only above 45 deg), does
        # positive work. It opens by pivoting; any sliding follows.
        s = max(manifold_slope(spec, 0.0), 0.0)
        W = Qp + s * max(Qd - cap, 0.0)
        if W <= 0.0:
            return _Step(gr * Qp, 0.0)
        return _Step(gr * W, 0.0, res_moment=W)
    res_m = 0.0 if (phi <= PHI_TOL and Qp <= 0.0) else abs(Qp)
    dphi = gr * Qp
    excess = abs(Qd) - cap
    if excess <= 0.0:
        return _Step(dphi, 0.0, res_moment=res_m)
    sign = 1.0 if Qd > 0.0 else -1.0
    dd = gd * sign * excess
    # sliding up against the manifold is a constraint, not an imbalance
    dm = manifold_disp(spec, max(phi, 0.0))
    res_f = 0.0 if (sign > 0.0 and chain.disp[i] >= dm - DISP_TOL) else excess
    return _Step(dphi, dd, res_moment=res_m, res_force=res_f)


def _clamped(chain, steps):
    """Joint increments after enforcing phi >= 0 and the no-overlap limit."""
    out = []
    for i, st in enumerate(steps):
        spec = chain.specs[i + 1]
        phi, d = chain.phi[i], chain.disp[i]
        dphi = max(st.dphi, -phi)
        dd = st.ddisp
        if st.two_point:
            if st.dphi != 0.0:
                dd = st.ddisp * dphi / st.dphi
        elif dd != 0.0:
            L = spec.face_length
            new_d = max(min(d + dd, manifold_disp(spec, phi + dphi), L), -L)
            dd = new_d - d
        out.append((dphi, dd))
    return out


def _apply(chain: ChainState, steps: list[_Step], cfg: SolverConfig) -> ChainState:
    """Take the steps and enforce the constraints."""
    inc = _clamped(chain, steps)
    big = max(
        max((abs(a) for a, _ in inc), default=0.0) / cfg.max_rotation_step,
        max((abs(b) for _, b in inc), default=0.0) / cfg.max_disp_step,
    )
    shrink = 1.0 / big if big > 1.0 else 1.0
    phi = chain.phi.copy()
    disp = chain.disp.copy()
    for i, st in enumerate(steps):
        spec = chain.specs[i + 1]
        new_phi = max(phi[i] + shrink * inc[i][0], 0.0)
        dm = manifold_disp(spec, new_phi)
        limit = spec.face_length
        if st.two_point and math.isfinite(dm):
            new_d = dm
        else:
            new_d = disp[i] + shrink * inc[i][1]
        phi[i] = new_phi
        disp[i] = max(min(new_d, dm, limit), -limit)
    return with_joints(chain, phi, disp)


def _place(spec, phi, d):
    """'flush', 'manifold' or 'off' for the slip accounting."""
    if phi <= PHI_TOL and abs(d) <= DISP_TOL:
        return "flush"
    dm = manifold_disp(spec, phi)
    return "manifold" if math.isfinite(dm) and dm - d <= DISP_TOL else "off"


def slip_work(start: ChainState, end: ChainState, fr: Forces, F: float) -> float:
    """Friction work of the net face slip between two equilibria.

    The relaxation path between them is not a physical path, so only the
    end states count. Motion along the two-point manifold is frictionless,
    and so is leaving flush contact onto it where the cone angle makes that
    the departure mode. Every other change of ``disp`` is slip, except that
    a joint moving between the manifold and a point below it slid at most
    by its change in gap.
    """
    total = 0.0
    for i in range(end.n_beads):
        spec = end.specs[i + 1]
        a = _place(spec, start.phi[i], start.disp[i])
        b = _place(spec, end.phi[i], end.disp[i])
        pair = {a, b}
        if pair == {"manifold"}:
            continue
        if pair == {"flush", "manifold"} and initial_mode(spec.cone_angle) is ContactMode.TWO_POINT:
            continue
        slip = abs(end.disp[i] - start.disp[i])
        if pair == {"manifold", "off"}:
            gap0 = manifold_disp(spec, start.phi[i]) - start.disp[i]
            gap1 = manifold_disp(spec, end.phi[i]) - end.disp[i]
            slip = min(slip, abs(gap1 - gap0))
        N = fr.normal[i] + F * fr.g_normal[i]
        total += spec.friction * max(N, 0.0) * slip
    return total


def _height_change(chain, fr, F, gr, gd):
    steps = [_joint_step(chain, k, fr, F, gr, gd) for k in range(1, chain.n_beads + 1)]
    dh = 0.0
    for i, (dphi, dd) in enumerate(_clamped(chain, steps)):
        dh -= fr.g_phi[i] * dphi + fr.g_disp[i] * dd
    return dh, steps


def _indenter_force(chain, fr, gr, gd, rise, F_guess):
    """Indenter force for which the next relaxation step changes the contact height by ``rise``."""
    from scipy.optimize import brentq

    g = lambda F: _height_change(chain, fr, F, gr, gd)[0] - rise
    if g(0.0) <= 0.0:
        return 0.0
    hi = max(2.0 * F_guess, 1.0)
    while g(hi) > 0.0:
        hi *= 4.0
        if hi > 1e9:
            raise NonConvergence("indenter force diverged")
    return brentq(g, 0.0, hi, xtol=1e-12, rtol=1e-12)


def equilibrate(
    chain: ChainState,
    tendon: Tendon,
    config: SolverConfig | None = None,
    force: float = 0.0,
    target_y: float | None = None,
    indenter: Indenter | None = None,
    raise_on_failure: bool = False,
) -> Equilibrium:
    """Relax ``chain`` to equilibrium.

    With ``target_y`` set the indenter acts as a unilateral stop: the
    indenter point may not rise above ``target_y`` and the returned force
    is the (non-negative) reaction needed to hold it there. Otherwise a
    fixed downward ``force`` is applied.
    """
    cfg = config or SolverConfig()
    ind = indenter or Indenter()
    state = chain
    F = float(force)
    residual = math.inf
    path = route_tendon(state, tendon)
    visits = [[m] for m in state.modes]
    n = state.n_beads
    # per-joint damping, halved whenever a joint's step reverses direction
    damp_phi = np.ones(n)
    damp_d = np.ones(n)
    prev = None
    for it in range(cfg.max_iters):
        scale = 1.0 if it < cfg.coarse_steps else cfg.fine_scale
        gr = cfg.rotation_gain * scale * damp_phi
        gd = cfg.disp_gain * scale * damp_d
        b = ind.bead_index(state)
        P = ind.location(state)
        fr = generalized_forces(state, bead_loads(state, path), P, b)
        gap = 0.0
        if target_y is not None:
            F = _indenter_force(state, fr, gr, gd, target_y - P[1], F)
            gap = P[1] - target_y if F > 0.0 else max(P[1] - target_y, 0.0)
        steps = [_joint_step(state, k, fr, F, gr, gd) for k in range(1, state.n_beads + 1)]
        rm = max((s.res_moment for s in steps), default=0.0)
        rf = max((s.res_force for s in steps), default=0.0)
        residual = max(rm / cfg.moment_tol, rf / cfg.force_tol, abs(gap) / cfg.depth_tol)
        if residual <= 1.0:
            return Equilibrium(state, path, F, residual, it, True, slip_work(chain, state, fr, F), visits)
        if prev is not None:
            for i, (a, b) in enumerate(zip(prev, steps)):
                damp_phi[i] = 0.5 * damp_phi[i] if a.dphi * b.dphi < 0.0 else min(1.0, 1.1 * damp_phi[i])
                damp_d[i] = 0.5 * damp_d[i] if a.ddisp * b.ddisp < 0.0 else min(1.0, 1.1 * damp_d[i])
        prev = steps
        state = _apply(state, steps, cfg)
        path = route_tendon(state, tendon)
        for v, m in zip(visits, state.modes):
            if v[-1] is not m:
                # a revisited mode closes a loop of relaxation chatter; drop it
                if m in v:
                    del v[v.index(m) + 1 :]
                else:
                    v.append(m)
    eq = Equilibrium(state, path, F, residual, cfg.max_iters, False, 0.0, visits)
    if raise_on_failure:
        raise NonConvergence(f"no equilibrium after {cfg.max_iters} iterations (residual {residual:.3g})", eq, residual)
    return eq


# -- protocols ----------------------------------------------------------------


@dataclass
class StepRecord:
    """Energy bookkeeping for one recorded load step (energies relative to the start)."""

    step: int
    branch: str
    displacement: float
    force: float
    tension: float
    external_work: float
    string_energy: float
    gravity_energy: float
    dissipation: float
    gross_work: float
    iterations: int
    residual: float
    converged: bool
    modes: tuple

    @property
    def balance_error(self) -> float:
        """Mismatch of external work against stored plus dissipated energy.

        Normalised by the gross work done so far (sum of absolute increments),
        which stays meaningful when the net work returns to zero on unloading.
        """
        stored = self.string_energy + self.gravity_energy + self.dissipation
        scale = self.gross_work
        if scale == 0.0:
            return 0.0 if abs(stored) < 1e-12 else math.inf
        return abs(self.external_work - stored) / scale


@dataclass(frozen=True)
class TransitionEvent:
    step: int
    interface: int
    old: ContactMode
    new: ContactMode

    def line(self) -> str:
        return f"step={self.step} interface={self.interface} {self.old.value}->{self.new.value}"


@dataclass
class LoadCurve:
    loading: list = field(default_factory=list)  # (displacement [m], force [N])
    unloading: list = field(default_factory=list)
    pretension_record: tuple = (0.0, ())
    records: list = field(default_factory=list)
    events: list = field(default_factory=list)
    converged: bool = True

    def branches(self):
        yield "loading", self.loading
        yield "unloading", self.unloading

    def first_departures(self) -> dict[int, ContactMode]:
        """Mode each interface entered when it first left surface contact."""
        out = {}
        for ev in self.events:
            if ev.old is ContactMode.SURFACE and ev.interface not in out:
                out[ev.interface] = ev.new
        return out


def pretension(chain: ChainState, model, T_target: float, config: SolverConfig | None = None, rest_length=None):
    """Straighten ``chain`` and stretch the string to ``T_target``.

    The string end is then fixed. Returns ``(chain, path, tendon)``; the
    tendon carries the fixed end for later protocols.
    """
    from .string_model import STRING_REST_LENGTH

    rest = STRING_REST_LENGTH if rest_length is None else rest_length
    if T_target < 0.0:
        raise ValueError("pretension must be non-negative")
    n = chain.n_beads
    straight = with_joints(chain, np.zeros(n), np.zeros(n))
    stretch = stretch_for_tension(model, T_target, rest)
    tendon = Tendon(model, rest, straight_stand(straight, rest + stretch))
    path = route_tendon(straight, tendon)
    if abs(path.tension - T_target) > 0.1:
        raise ValueError(f"pretension reached {path.tension} N instead of {T_target} N")
    eq = equilibrate(straight, tendon, config)
    return eq.chain, eq.path, tendon


class _Tracker:
    """Accumulates records and mode transitions along a protocol."""

    def __init__(self, chain, path, tendon, indenter):
        self.tendon = tendon
        self.indenter = indenter
        self.y0 = indenter.location(chain)[1]
        self.U0 = string_energy(tendon.model, path.length, tendon.rest_length)
        self.V0 = gravity_potential(chain)
        self.work = 0.0
        self.gross_work = 0.0
        self.dissipation = 0.0
        self.modes = tuple(chain.modes)
        self.curve = LoadCurve(pretension_record=(path.tension, [path.tension]))
        self.step = 0

    def add_work(self, w):
        self.work += w
        self.gross_work += abs(w)

    def record(self, branch, eq: Equilibrium, displacement):
        self.step += 1
        path = eq.path
        modes = tuple(eq.chain.modes)
        paths = _merge_paths([[m] for m in self.modes], eq.mode_paths or [[m] for m in modes])
        for k, seq in enumerate(paths, start=1):
            for a, b in zip(seq, seq[1:]):
                ev = TransitionEvent(self.step, k, a, b)
                self.curve.events.append(ev)
                log.info("transition %s", ev.line())
        self.modes = modes
        rec = StepRecord(
            step=self.step,
            branch=branch,
            displacement=displacement,
            force=eq.force,
            tension=path.tension,
            external_work=self.work,
            string_energy=string_energy(self.tendon.model, path.length, self.tendon.rest_length) - self.U0,
            gravity_energy=gravity_potential(eq.chain) - self.V0,
            dissipation=self.dissipation,
            gross_work=self.gross_work,
            iterations=eq.iterations,
            residual=eq.residual,
            converged=eq.converged,
            modes=modes,
        )
        self.curve.records.append(rec)
        self.curve.pretension_record[1].append(path.tension)
        if not eq.converged:
            self.curve.converged = False
        return rec


def _depth_schedule(depth_max: float, inc: float) -> list[float]:
    n = max(1, int(math.ceil(depth_max / inc - 1e-9)))
    return [depth_max * i / n for i in range(1, n + 1)]


def bending_protocol(
    chain: ChainState,
    tendon: Tendon,
    indenter: Indenter | None = None,
    depth_max: float = 20e-3,
    config: SolverConfig | None = None,
    drive: str = "displacement",
) -> LoadCurve:
    """Load the top bead with the indenter to ``depth_max`` and unload.

    ``drive="displacement"`` steps the indenter position; ``"force"`` ramps
    a dead load until the indenter point has moved ``depth_max``.
    Raises :class:`NonConvergence` (carrying the partial curve) if a step
    fails to reach equilibrium.
    """
    cfg = config or SolverConfig()
    ind = indenter or Indenter()
    if depth_max < 0.0:
        raise ValueError("depth_max must be non-negative")
    if drive not in ("displacement", "force"):
        raise ValueError(f"unknown drive {drive!r}")
    eq0 = equilibrate(chain, tendon, cfg)
    tr = _Tracker(eq0.chain, eq0.path, tendon, ind)
    tr.curve.loading.append((0.0, 0.0))
    if depth_max == 0.0:
        tr.curve.unloading.append((0.0, 0.0))
        return tr.curve
    if drive == "displacement":
        _displacement_drive(tr, eq0, depth_max, cfg)
    else:
        _force_drive(tr, eq0, depth_max, cfg)
    return tr.curve


def _check(tr, eq, what):
    if not eq.converged:
        tr.curve.converged = False
        raise NonConvergence(
            f"{what}: no equilibrium at step {tr.step} (residual {eq.residual:.3g})", tr.curve, eq.residual, tr.step
        )


def _advance(tr, eq_a, depth_a, depth_b, cfg, level=0):
    """Move the indenter from ``depth_a`` to ``depth_b``, halving the step where the reaction jumps."""
    eq_b = equilibrate(eq_a.chain, tr.tendon, cfg, force=eq_a.force, target_y=tr.y0 - depth_b, indenter=tr.indenter)
    _check(tr, eq_b, "bending")
    straight = np.all(eq_b.chain.phi < STRAIGHT_TOL) and np.all(np.abs(eq_b.chain.disp) < STRAIGHT_TOL * 1e-2)
    if depth_b == 0.0 and eq_b.force > 0.0 and straight:
        # back at the start with a straight chain: the indenter only touches,
        # any force up to the breaking load balances, and the least one is zero
        n = eq_b.chain.n_beads
        flat = with_joints(eq_b.chain, np.zeros(n), np.zeros(n))
        rest = equilibrate(flat, tr.tendon, cfg, force=0.0, target_y=tr.y0, indenter=tr.indenter)
        if rest.converged and rest.force == 0.0:
            rest.mode_paths = _merge_paths(eq_b.mode_paths, rest.mode_paths)
            rest.dissipation += eq_b.dissipation
            eq_b = rest
    jump = abs(eq_b.force - eq_a.force)
    if level < cfg.max_refine and jump > cfg.jump_fraction * max(abs(eq_a.force), abs(eq_b.force)):
        mid = 0.5 * (depth_a + depth_b)
        eq_m = _advance(tr, eq_a, depth_a, mid, cfg, level + 1)
        eq_b = _advance(tr, eq_m, mid, depth_b, cfg, level + 1)
        eq_b.mode_paths = _merge_paths(eq_m.mode_paths, eq_b.mode_paths)
        return eq_b
    tr.add_work(0.5 * (eq_a.force + eq_b.force) * (depth_b - depth_a))
    tr.dissipation += eq_b.dissipation
    return eq_b


def _displacement_drive(tr, eq0, depth_max, cfg):
    eq = eq0
    depth = 0.0
    for target in _depth_schedule(depth_max, cfg.disp_increment):
        eq = _advance(tr, eq, depth, target, cfg)
        depth = target
        tr.record("loading", eq, depth)
        tr.curve.loading.append((depth, eq.force))
    tr.curve.unloading.append((depth, eq.force))
    for target in reversed([0.0] + _depth_schedule(depth_max, cfg.disp_increment)[:-1]):
        eq = _advance(tr, eq, depth, target, cfg)
        depth = target
        tr.record("unloading", eq, depth)
        tr.curve.unloading.append((depth, eq.force))


def _force_drive(tr, eq0, depth_max, cfg):
    eq = eq0
    F = 0.0
    depth = 0.0
    forces = []
    while depth < depth_max:
        F += cfg.force_increment
        new = equilibrate(eq.chain, tr.tendon, cfg, force=F, indenter=tr.indenter)
        _check(tr, new, "bending")
        d_new = tr.y0 - tr.indenter.location(new.chain)[1]
        tr.add_work(0.5 * (eq.force + F) * (d_new - depth))
        tr.dissipation += new.dissipation
        eq, depth = new, d_new
        forces.append(F)
        tr.record("loading", eq, depth)
        if not tr.curve.loading or depth > tr.curve.loading[-1][0]:
            tr.curve.loading.append((depth, F))
    tr.curve.unloading.append(tr.curve.loading[-1])
    for F in reversed([0.0] + forces[:-1]):
        new = equilibrate(eq.chain, tr.tendon, cfg, force=F, indenter=tr.indenter)
        _check(tr, new, "bending")
        d_new = tr.y0 - tr.indenter.location(new.chain)[1]
        tr.add_work(0.5 * (eq.force + F) * (d_new - depth))
        tr.dissipation += new.dissipation
        eq, depth = new, d_new
        tr.record("unloading", eq, depth)
        if depth < tr.curve.unloading[-1][0]:
            tr.curve.unloading.append((depth, F))


def axial_protocol(
    chain: ChainState,
    tendon: Tendon,
    direction: str = "tension",
    depth_max: float = 1e-3,
    config: SolverConfig | None = None,
    column_stiffness: float = 1e6,
) -> LoadCurve:
    """One-dimensional series model of axial loading of a straight chain.

    Tension stretches the string by the end displacement. Compression first
    relaxes the string; once it is slack the bead column carries the load
    with ``column_stiffness`` [N/m]. Forces are increments over the
    pretensioned state.
    """
    cfg = config or SolverConfig()
    if direction not in ("tension", "compression"):
        raise ValueError(f"unknown direction {direction!r}")
    if depth_max < 0.0:
        raise ValueError("depth_max must be non-negative")
    path = route_tendon(chain, tendon)
    L0 = path.length
    T0 = path.tension
    model, rest = tendon.model, tendon.rest_length

    def reaction(delta):
        if direction == "tension":
            return tension_from_stretch(model, L0 + delta, rest) - T0
        length = L0 - delta
        if length > rest:
            return T0 - tension_from_stretch(model, length, rest)
        return T0 + column_stiffness * (rest - length)

    curve = LoadCurve(pretension_record=(T0, [T0]))
    curve.loading.append((0.0, 0.0))
    if depth_max == 0.0:
        curve.unloading.append((0.0, 0.0))
        return curve
    steps = _depth_schedule(depth_max, cfg.disp_increment)
    curve.loading.extend((d, reaction(d)) for d in steps)
    curve.unloading.extend((d, reaction(d)) for d in reversed([0.0] + steps))
    return curve
